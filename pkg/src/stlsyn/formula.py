"""Non-nested STL formulas over polynomial predicates.

A specification text has two blocks::

    variables: x y
    predicates:
        goal_x  = x - 3.5
        goal_xu = 4 - x
    formula:
        F[2,10](goal_x & goal_xu) & G[0,2](!goal_x)

Each predicate names a polynomial h over the state variables; the predicate
holds at x iff h(x) >= 0.  Temporal operators F[a,b], G[a,b], U[a,b] take a
time interval whose brackets choose open/closed endpoints ('['/'(' and
']'/')').  Temporal operators cannot be nested.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .intervals import TimeInterval, fmt_num
from .polynomial import Polynomial, PolynomialError, parse_polynomial


class StlSyntaxError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = "%s (at column %d)" % (message, pos)
        super().__init__(message)


class NestedTemporalError(StlSyntaxError):
    pass


class UnknownPredicateError(StlSyntaxError):
    pass


@dataclass(frozen=True)
class PredicateFn:
    """A named predicate gamma: true at x iff poly(x) >= 0."""

    name: str
    poly: Polynomial

    def __post_init__(self):
        if self.poly.is_zero:
            raise PolynomialError("predicate %r is identically zero" % self.name)

    @property
    def arity(self):
        return self.poly.nvars

    def eval(self, x):
        return self.poly.eval(x) >= 0.0


def eval_predicate(pred, x):
    """Sign test h(x) >= 0 for a predicate at a state."""
    return pred.eval(x)


# --- AST ------------------------------------------------------------------
# Frozen nodes with structural equality.  Or is retained sugar; NegUntil is
# the internal negation-normal form of a negated Until (it never comes out
# of the parser, only out of rewriting).

@dataclass(frozen=True)
class StlTrue:
    pass


@dataclass(frozen=True)
class StlPred:
    pred: PredicateFn


@dataclass(frozen=True)
class StlNot:
    child: object


@dataclass(frozen=True)
class StlAnd:
    children: tuple


@dataclass(frozen=True)
class StlOr:
    children: tuple


@dataclass(frozen=True)
class StlUntil:
    interval: TimeInterval
    left: object
    right: object


@dataclass(frozen=True)
class StlNegUntil:
    interval: TimeInterval
    left: object
    right: object


@dataclass(frozen=True)
class StlEventually:
    interval: TimeInterval
    child: object


@dataclass(frozen=True)
class StlGlobally:
    interval: TimeInterval
    child: object


TEMPORAL = (StlUntil, StlNegUntil, StlEventually, StlGlobally)


def make_and(children):
    flat = []
    for c in children:
        if isinstance(c, StlAnd):
            flat.extend(c.children)
        elif isinstance(c, StlTrue):
            continue
        else:
            flat.append(c)
    if not flat:
        return StlTrue()
    if len(flat) == 1:
        return flat[0]
    return StlAnd(tuple(flat))


def make_or(children):
    flat = []
    for c in children:
        if isinstance(c, StlOr):
            flat.extend(c.children)
        else:
            flat.append(c)
    if len(flat) == 1:
        return flat[0]
    return StlOr(tuple(flat))


def make_not(child):
    if isinstance(child, StlNot):
        return child.child
    return StlNot(child)


def is_propositional(f):
    if isinstance(f, (StlTrue, StlPred)):
        return True
    if isinstance(f, StlNot):
        return is_propositional(f.child)
    if isinstance(f, (StlAnd, StlOr)):
        return all(is_propositional(c) for c in f.children)
    return False


def check_well_formed(f, inside_temporal=False):
    """Enforce the non-nested fragment: no temporal operator in the scope of
    another, and temporal operands purely propositional."""
    if isinstance(f, TEMPORAL):
        if inside_temporal:
            raise NestedTemporalError("temporal operator nested inside another temporal operator")
        kids = (f.left, f.right) if isinstance(f, (StlUntil, StlNegUntil)) else (f.child,)
        for k in kids:
            check_well_formed(k, inside_temporal=True)
        if math.isinf(f.interval.hi):
            raise StlSyntaxError("temporal intervals must be bounded")
    elif isinstance(f, StlNot):
        check_well_formed(f.child, inside_temporal)
    elif isinstance(f, (StlAnd, StlOr)):
        for c in f.children:
            check_well_formed(c, inside_temporal)


def formula_horizon(f):
    """Largest interval upper bound over all temporal operators (0 if none)."""
    if isinstance(f, TEMPORAL):
        kids = (f.left, f.right) if isinstance(f, (StlUntil, StlNegUntil)) else (f.child,)
        return max([f.interval.hi] + [formula_horizon(k) for k in kids])
    if isinstance(f, StlNot):
        return formula_horizon(f.child)
    if isinstance(f, (StlAnd, StlOr)):
        return max((formula_horizon(c) for c in f.children), default=0.0)
    return 0.0


def predicates_of(f):
    """All PredicateFn objects occurring in a formula, in first-use order."""
    out = []
    seen = set()

    def walk(g):
        if isinstance(g, StlPred):
            if g.pred.name not in seen:
                seen.add(g.pred.name)
                out.append(g.pred)
        elif isinstance(g, StlNot):
            walk(g.child)
        elif isinstance(g, (StlAnd, StlOr)):
            for c in g.children:
                walk(c)
        elif isinstance(g, TEMPORAL):
            kids = (g.left, g.right) if isinstance(g, (StlUntil, StlNegUntil)) else (g.child,)
            for k in kids:
                walk(k)

    walk(f)
    return out


# --- concrete syntax ------------------------------------------------------

_FORMULA_TOKEN = re.compile(
    r"\s*(?:(->)|([&|!()])|([FGU])\s*([\[(])\s*([0-9.]+)\s*,\s*([0-9.]+)\s*([\])])"
    r"|(true|false)\b|([A-Za-z_]\w*))")


def _tokenize_formula(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _FORMULA_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise StlSyntaxError("unexpected character %r" % text[pos], pos)
            break
        arrow, punct, op, lb, lo, hi, rb, const, name = m.groups()
        start = m.start(0)
        if arrow:
            tokens.append(("arrow", None, start))
        elif punct:
            tokens.append((punct, None, start))
        elif op:
            try:
                iv = TimeInterval.make(float(lo), float(hi), lb == "[", rb == "]")
            except ValueError as e:
                raise StlSyntaxError(str(e), start)
            if iv is None:
                raise StlSyntaxError("empty time interval", start)
            tokens.append(("temporal", (op, iv), start))
        elif const:
            tokens.append(("const", const == "true", start))
        else:
            tokens.append(("name", name, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_stl(text, predicates):
    """Parse a formula string against declared predicates (a name->PredicateFn
    mapping).  Raises StlSyntaxError / NestedTemporalError /
    UnknownPredicateError."""
    tokens = _tokenize_formula(text)
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        t = tokens[idx[0]]
        idx[0] += 1
        return t

    def parse_atom():
        kind, val, pos = take()
        if kind == "name":
            if val not in predicates:
                raise UnknownPredicateError("undeclared predicate %r" % val, pos)
            return StlPred(predicates[val])
        if kind == "const":
            return StlTrue() if val else StlNot(StlTrue())
        if kind == "!":
            return make_not(parse_atom())
        if kind == "(":
            f = parse_implies()
            k, _, p = take()
            if k != ")":
                raise StlSyntaxError("expected ')'", p)
            return f
        if kind == "temporal":
            op, iv = val
            if op == "U":
                raise StlSyntaxError("until is written infix: phi U[a,b] psi", pos)
            k, _, p = peek()
            if k != "(":
                raise StlSyntaxError("%s[...] needs a parenthesized argument" % op, p)
            take()
            child = parse_implies()
            k, _, p = take()
            if k != ")":
                raise StlSyntaxError("expected ')'", p)
            return StlEventually(iv, child) if op == "F" else StlGlobally(iv, child)
        raise StlSyntaxError("unexpected token", pos)

    def parse_until():
        f = parse_atom()
        while peek()[0] == "temporal" and peek()[1][0] == "U":
            _, (_, iv), _ = take()
            g = parse_atom()
            f = StlUntil(iv, f, g)
        return f

    def parse_and():
        f = parse_until()
        while peek()[0] == "&":
            take()
            f = make_and([f, parse_until()])
        return f

    def parse_or():
        f = parse_and()
        while peek()[0] == "|":
            take()
            f = make_or([f, parse_and()])
        return f

    def parse_implies():
        f = parse_or()
        if peek()[0] == "arrow":
            take()
            g = parse_implies()
            return make_or([make_not(f), g])
        return f

    f = parse_implies()
    kind, _, pos = peek()
    if kind != "end":
        raise StlSyntaxError("trailing input after formula", pos)
    check_well_formed(f)
    return f


def to_text(f):
    """Render a formula in the concrete grammar (parse(to_text(f)) == f up to
    implication sugar, which the parser already desugars)."""

    def prop(g, parent_and=False):
        if not isinstance(g, (StlTrue, StlPred, StlNot, StlAnd, StlOr) + TEMPORAL):
            raise TypeError("not a formula: %r" % (g,))
        if isinstance(g, StlTrue):
            return "true"
        if isinstance(g, StlPred):
            return g.pred.name
        if isinstance(g, StlNot):
            if isinstance(g.child, StlTrue):
                return "false"
            inner = prop(g.child)
            if isinstance(g.child, (StlAnd, StlOr, StlUntil, StlNegUntil)):
                return "!(%s)" % render(g.child)
            return "!" + inner
        if isinstance(g, StlAnd):
            body = " & ".join(render(c, in_and=True) for c in g.children)
            return "(%s)" % body if parent_and else body
        if isinstance(g, StlOr):
            return "(%s)" % " | ".join(render(c, in_and=True) for c in g.children)
        return render(g)

    def render(g, in_and=False):
        if isinstance(g, StlEventually):
            return "F%s(%s)" % (g.interval, render(g.child))
        if isinstance(g, StlGlobally):
            return "G%s(%s)" % (g.interval, render(g.child))
        if isinstance(g, StlUntil):
            return "(%s) U%s (%s)" % (render(g.left), g.interval, render(g.right))
        if isinstance(g, StlNegUntil):
            return "!((%s) U%s (%s))" % (render(g.left), g.interval, render(g.right))
        return prop(g, parent_and=in_and)

    return render(f)


# --- specification files ----------------------------------------------------

@dataclass(frozen=True)
class StlSpec:
    """A parsed specification: state variables, predicate table, formula."""

    variables: tuple
    predicates: dict
    formula: object
    @property
    def arity(self):
        return len(self.variables)

    def horizon(self):
        return formula_horizon(self.formula)


def parse_spec_text(text):
    """Parse a spec file: 'variables:' line, 'predicates:' block with one
    `name = polynomial` per line, and a 'formula:' block."""
    variables = None
    predicates = {}
    formula_lines = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        low = stripped.lower()
        if low.startswith("variables:"):
            variables = tuple(stripped[len("variables:"):].replace(",", " ").split())
            section = None
            continue
        if low.startswith("predicates:"):
            section = "predicates"
            continue
        if low.startswith("formula:"):
            section = "formula"
            rest = stripped[len("formula:"):].strip()
            if rest:
                formula_lines.append(rest)
            continue
        if section == "predicates":
            if "=" not in stripped:
                raise StlSyntaxError("line %d: predicate lines are 'name = polynomial'" % lineno)
            name, expr = stripped.split("=", 1)
            name = name.strip()
            if variables is None:
                raise StlSyntaxError("line %d: 'variables:' must precede predicates" % lineno)
            if name in predicates:
                raise StlSyntaxError("line %d: duplicate predicate %r" % (lineno, name))
            try:
                poly = parse_polynomial(expr.strip(), variables)
            except PolynomialError as e:
                raise StlSyntaxError("line %d: %s" % (lineno, e))
            predicates[name] = PredicateFn(name, poly)
        elif section == "formula":
            formula_lines.append(stripped)
        else:
            raise StlSyntaxError("line %d: content outside any section" % lineno)
    if variables is None:
        raise StlSyntaxError("missing 'variables:' line")
    if not formula_lines:
        raise StlSyntaxError("missing 'formula:' block")
    formula = parse_stl(" ".join(formula_lines), predicates)
    return StlSpec(variables, predicates, formula)
