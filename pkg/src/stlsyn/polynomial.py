"""Sparse multivariate polynomials over named state variables.

A polynomial is a mapping from exponent tuples to float coefficients,
e.g. with variables (x, y) the function 2 - (x-5)^2 is stored as
{(0,0): -23.0, (1,0): 10.0, (2,0): -1.0}.
"""

from __future__ import annotations

import re


class PolynomialError(ValueError):
    pass


class Polynomial:
    __slots__ = ("nvars", "terms", "_partials")

    def __init__(self, nvars, terms):
        self.nvars = nvars
        self.terms = {e: float(c) for e, c in terms.items() if c != 0.0}
        self._partials = None

    @staticmethod
    def constant(nvars, c):
        return Polynomial(nvars, {(0,) * nvars: c} if c else {})

    @staticmethod
    def variable(nvars, i):
        e = [0] * nvars
        e[i] = 1
        return Polynomial(nvars, {tuple(e): 1.0})

    @property
    def is_zero(self):
        return not self.terms

    @property
    def support(self):
        """Indices of variables actually occurring."""
        dims = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    dims.add(i)
        return dims

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_linear(self):
        return self.degree() <= 1

    def axis_aligned_form(self):
        """For polynomials of shape c*x_i + b, return (i, c, b); else None."""
        if not self.is_linear():
            return None
        dims = self.support
        if len(dims) != 1:
            return None
        i = dims.pop()
        c = 0.0
        b = 0.0
        for e, coef in self.terms.items():
            if sum(e) == 0:
                b = coef
            else:
                c = coef
        return i, c, b

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.nvars, terms)

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Polynomial(self.nvars, terms)

    def pow(self, k):
        if k < 0:
            raise PolynomialError("negative exponents are not supported")
        out = Polynomial.constant(self.nvars, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def eval(self, x):
        if len(x) != self.nvars:
            raise PolynomialError(
                "state dimension %d does not match polynomial arity %d" % (len(x), self.nvars))
        total = 0.0
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k == 1:
                    v *= x[i]
                elif k > 1:
                    v *= x[i] ** k
            total += v
        return total

    def _raw_interval(self, box):
        lo_tot, hi_tot = 0.0, 0.0
        for e, c in self.terms.items():
            lo, hi = c, c
            for i, k in enumerate(e):
                if k == 0:
                    continue
                plo, phi = _pow_interval(box[i][0], box[i][1], k)
                cands = (lo * plo, lo * phi, hi * plo, hi * phi)
                lo, hi = min(cands), max(cands)
            lo_tot += lo
            hi_tot += hi
        return lo_tot, hi_tot

    def partial(self, i):
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            terms[tuple(e2)] = terms.get(tuple(e2), 0.0) + c * e[i]
        return Polynomial(self.nvars, terms)

    def eval_interval(self, box):
        """Sound bounds [lo, hi] over a box: intersection of the naive term
        product with the mean-value (centered) form, which avoids most of the
        dependency blowup on expanded polynomials."""
        lo1, hi1 = self._raw_interval(box)
        mid = tuple(0.5 * (lo + hi) for lo, hi in box)
        base = self.eval(mid)
        dev_lo = dev_hi = 0.0
        if self._partials is None:
            self._partials = {i: self.partial(i) for i in self.support}
        for i, dp in self._partials.items():
            g_lo, g_hi = dp._raw_interval(box)
            half = 0.5 * (box[i][1] - box[i][0])
            cands = (g_lo * half, -g_lo * half, g_hi * half, -g_hi * half)
            dev_lo += min(cands)
            dev_hi += max(cands)
        lo2, hi2 = base + dev_lo, base + dev_hi
        return max(lo1, lo2), min(hi1, hi2)

    def canonical_key(self):
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.canonical_key() == other.canonical_key())

    def __hash__(self):
        return hash((self.nvars, self.canonical_key()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0])):
            mono = "*".join(
                ("v%d" % i if k == 1 else "v%d^%d" % (i, k))
                for i, k in enumerate(e) if k)
            if mono:
                parts.append("%g*%s" % (c, mono))
            else:
                parts.append("%g" % c)
        return " + ".join(parts)

    def to_text(self, variables):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0])):
            mono = "*".join(
                (variables[i] if k == 1 else "%s^%d" % (variables[i], k))
                for i, k in enumerate(e) if k)
            if mono:
                if c == 1.0:
                    parts.append(mono)
                elif c == -1.0:
                    parts.append("-%s" % mono)
                else:
                    parts.append("%s*%s" % (_fmt(c), mono))
            else:
                parts.append(_fmt(c))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text


def _fmt(c):
    return ("%d" % c) if c == int(c) else repr(c)


def _pow_interval(lo, hi, k):
    a, b = lo ** k, hi ** k
    if k % 2 == 0 and lo < 0 < hi:
        return 0.0, max(a, b)
    return min(a, b), max(a, b)


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_]\w*)|(\*\*|[-+*^()]))")


def parse_polynomial(text, variables):
    """Parse an arithmetic expression (+, -, *, ^ or **, parentheses) into a
    Polynomial over the given ordered variable names."""
    var_index = {v: i for i, v in enumerate(variables)}
    nvars = len(variables)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise PolynomialError("bad character %r at column %d" % (text[pos], pos))
            break
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", float(num)))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", None))

    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        t = tokens[idx[0]]
        idx[0] += 1
        return t

    def parse_atom():
        kind, val = take()
        if kind == "num":
            return Polynomial.constant(nvars, val)
        if kind == "name":
            if val not in var_index:
                raise PolynomialError("unknown variable %r" % val)
            return Polynomial.variable(nvars, var_index[val])
        if kind == "op" and val == "(":
            p = parse_sum()
            k, v = take()
            if (k, v) != ("op", ")"):
                raise PolynomialError("expected ')'")
            return p
        if kind == "op" and val == "-":
            return -parse_power()
        if kind == "op" and val == "+":
            return parse_power()
        raise PolynomialError("unexpected token %r" % (val,))

    def parse_power():
        base = parse_atom()
        if peek() == ("op", "^"):
            take()
            k, v = take()
            if k != "num" or v != int(v):
                raise PolynomialError("exponent must be a nonnegative integer")
            return base.pow(int(v))
        return base

    def parse_product():
        p = parse_power()
        while peek() == ("op", "*"):
            take()
            p = p * parse_power()
        return p

    def parse_sum():
        p = parse_product()
        while peek()[0] == "op" and peek()[1] in "+-":
            _, op = take()
            q = parse_product()
            p = p + q if op == "+" else p - q
        return p

    result = parse_sum()
    if peek()[0] != "end":
        raise PolynomialError("trailing input after expression: %r" % (peek()[1],))
    return result
