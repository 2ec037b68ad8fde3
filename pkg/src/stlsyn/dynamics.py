"""System models and fixed-step RK4 propagation with dense output.

States and controls are plain tuples; the planner's inner loop calls these
thousands of times per second, so everything here avoids array overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

RK_STEP = 0.01


@dataclass
class DynamicsModel:
    name: str
    state_dim: int
    control_dim: int
    vector_field: callable        # f(x, u) -> dx/dt, tuples
    state_bounds: tuple           # ((lo, hi) per state dim)
    control_bounds: tuple         # ((lo, hi) per control dim)
    state_names: tuple = ()

    def with_bounds(self, state_bounds=None, control_bounds=None):
        return DynamicsModel(
            self.name, self.state_dim, self.control_dim, self.vector_field,
            tuple(state_bounds) if state_bounds else self.state_bounds,
            tuple(control_bounds) if control_bounds else self.control_bounds,
            self.state_names)

    def in_bounds(self, x):
        return all(lo <= xi <= hi for xi, (lo, hi) in zip(x, self.state_bounds))


def _f_double_integrator(x, u):
    return (x[1], u[0])


def _f_unicycle2(x, u):
    # x = (x, y, phi, v), u = (omega, a)
    return (x[3] * math.cos(x[2]), x[3] * math.sin(x[2]), u[0], u[1])


def _f_kinematic_car(x, u, L=1.0):
    # x = (x, y, theta), u = (v, delta)
    return (u[0] * math.cos(x[2]), u[0] * math.sin(x[2]), u[0] / L * math.tan(u[1]))


_BUILTINS = {
    "double_integrator": DynamicsModel(
        "double_integrator", 2, 1, _f_double_integrator,
        ((-2.0, 6.0), (-4.0, 4.0)), ((-2.0, 2.0),), ("x", "y")),
    "unicycle2": DynamicsModel(
        "unicycle2", 4, 2, _f_unicycle2,
        ((0.0, 5.0), (0.0, 5.0), (-9.5, 9.5), (-2.0, 2.0)),
        ((-2.0, 2.0), (-1.0, 1.0)), ("x", "y", "phi", "v")),
    "kinematic_car": DynamicsModel(
        "kinematic_car", 3, 2, _f_kinematic_car,
        ((0.0, 12.0), (0.0, 12.0), (-9.5, 9.5)),
        ((-1.0, 3.0), (-1.1, 1.1)), ("x", "y", "theta")),
}


def builtin_dynamics(name):
    if name not in _BUILTINS:
        raise KeyError("unknown dynamics model %r (have: %s)"
                       % (name, ", ".join(sorted(_BUILTINS))))
    return _BUILTINS[name]


def rk4_segment(model, x0, u, dt, t0=0.0, h=RK_STEP):
    """Integrate under constant control for dt seconds.

    Returns knots [(t, x, f(x, u))] including both endpoints; knots are
    spaced by h with a shorter final step.  Raises no bound errors; the
    caller checks model.in_bounds on the knots.
    """
    f = model.vector_field
    knots = []
    x = tuple(x0)
    t = 0.0
    fx = f(x, u)
    knots.append((t0, x, fx))
    remaining = dt
    while remaining > 1e-12:
        step = h if remaining > h else remaining
        k1 = fx
        x2 = tuple(a + 0.5 * step * b for a, b in zip(x, k1))
        k2 = f(x2, u)
        x3 = tuple(a + 0.5 * step * b for a, b in zip(x, k2))
        k3 = f(x3, u)
        x4 = tuple(a + step * b for a, b in zip(x, k3))
        k4 = f(x4, u)
        x = tuple(a + step / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
                  for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4))
        t += step
        remaining -= step
        fx = f(x, u)
        knots.append((t0 + t, x, fx))
    return knots


def propagate(model, x0, controls, t0=0.0, h=RK_STEP):
    """Chain rk4_segment over a [(u, dt)] controller; returns segments
    suitable for Trajectory.from_segments."""
    segments = []
    x = tuple(x0)
    t = t0
    for u, dt in controls:
        knots = rk4_segment(model, x, tuple(u), dt, t0=t, h=h)
        segments.append((knots, tuple(u)))
        t = knots[-1][0]
        x = knots[-1][1]
    return segments
