"""Numerical integration of Hamilton's equations for V = w0/sqrt(u),
with conservation monitoring and singularity-proximity tracking.

All numeric evaluators are compiled from the exact catalog polynomials
specialized at the chosen (a, b, w0); every term is evaluated in binary64
with compensated summation.  The integrators take an abstract force
callable so they can be validated against closed-form systems (free
particle, isotropic oscillator) independently of the potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import A, B, COORDS, MOMENTA, PX, PY, PZ, W0, X, Y, Z, Polynomial
from .catalog import (
    ParamDomain,
    _check_param_domain,
    build_context,
    singular_lines,
)
from .radical import SingularPoint


class StepFailure(Exception):
    """Adaptive step size hit its floor."""


def _exact(v) -> Fraction:
    # binary64 inputs are converted exactly; 0.25 -> 1/4 etc.
    return v if isinstance(v, Fraction) else Fraction(v)


_SLOT_NAMES = ("x", "y", "z", "px", "py", "pz")


def _term_exprs(p: Polynomial, order: dict[int, int], powers_used: set) -> str:
    exprs = []
    for e, c in p.sorted_terms():
        factors = [repr(float(c))]
        for i, k in enumerate(e):
            if k:
                if i not in order:
                    raise ValueError(f"unspecialized variable index {i}")
                name = f"{_SLOT_NAMES[order[i]]}_{k}"
                powers_used.add((order[i], k))
                factors.append(name)
        exprs.append("*".join(factors))
    return "(" + ", ".join(exprs) + ("," if len(exprs) == 1 else "") + ")"


def compile_poly_group(polys, variables=(X, Y, Z, PX, PY, PZ)):
    """Generate a function evaluating several polynomials at once.

    Each polynomial is summed term-by-term in binary64 with math.fsum
    (exactly rounded, i.e. stronger than compensated summation); monomial
    powers are shared across the group.  The returned function takes one
    float per variable and returns a tuple of values.
    """
    order = {v: i for i, v in enumerate(variables)}
    powers: set = set()
    bodies = [_term_exprs(p, order, powers) for p in polys]
    args = ", ".join(_SLOT_NAMES[: len(variables)])
    lines = [f"def _eval({args}, _fsum=_fsum):"]
    max_pow: dict[int, int] = {}
    for slot, k in powers:
        max_pow[slot] = max(max_pow.get(slot, 0), k)
    for slot in sorted(max_pow):
        name = _SLOT_NAMES[slot]
        lines.append(f"    {name}_1 = {name}")
        for k in range(2, max_pow[slot] + 1):
            lines.append(f"    {name}_{k} = {name}_{k - 1} * {name}")
    rets = []
    for i, body in enumerate(bodies):
        if body == "()":
            rets.append("0.0")
        else:
            lines.append(f"    _t{i} = _fsum({body})")
            rets.append(f"_t{i}")
    lines.append("    return (" + ", ".join(rets) + ("," if len(rets) == 1 else "") + ")")
    ns = {"_fsum": math.fsum}
    exec("\n".join(lines), ns)
    return ns["_eval"]


class CompiledPoly:
    """Single specialized polynomial as a fast binary64 evaluator."""

    __slots__ = ("_fn", "_nvars")

    def __init__(self, p: Polynomial, variables=(X, Y, Z, PX, PY, PZ)):
        self._fn = compile_poly_group([p], variables)
        self._nvars = len(variables)

    def __call__(self, vals) -> float:
        return self._fn(*vals[: self._nvars])[0]


class ForceField:
    """Potential, force and u-evaluators for fixed (a, b, w0).

    One fused generated function evaluates u and its gradient together.
    """

    __slots__ = ("a", "b", "w0", "u_floor", "_eval")

    def __init__(self, a, b, w0, u_floor, fused_eval):
        self.a = float(a)
        self.b = float(b)
        self.w0 = float(w0)
        self.u_floor = u_floor
        self._eval = fused_eval

    def u(self, q) -> float:
        return self._eval(q[0], q[1], q[2])[0]

    def _u_checked(self, q) -> float:
        uval = self.u(q)
        if uval <= self.u_floor:
            raise SingularPoint(f"u = {uval!r} at q = {tuple(q)}")
        return uval

    def potential(self, q) -> float:
        return self.w0 / math.sqrt(self._u_checked(q))

    def __call__(self, q):
        """Force -grad V = (w0/2) u^(-3/2) grad u."""
        uval, gx, gy, gz = self._eval(q[0], q[1], q[2])
        if uval <= self.u_floor:
            raise SingularPoint(f"u = {uval!r} at q = {tuple(q)}")
        pref = 0.5 * self.w0 * uval**-1.5
        return (pref * gx, pref * gy, pref * gz)


def compile_force(a: float, b: float, w0: float, u_floor: float = 1e-10) -> ForceField:
    _check_param_domain(_exact(a), _exact(b))
    ctx = build_context()
    subs = {A: _exact(a), B: _exact(b)}
    u = ctx.u.specialize(subs)
    fused = compile_poly_group(
        [u] + [u.diff(v) for v in COORDS], variables=(X, Y, Z)
    )
    return ForceField(a, b, w0, u_floor, fused)


class IntegralEvaluator:
    """Numeric H, X1, X2 from the exact catalog forms at fixed (a, b, w0)."""

    def __init__(self, a: float, b: float, w0: float):
        ctx = build_context()
        subs = {A: _exact(a), B: _exact(b), W0: _exact(w0)}
        self.u_of = CompiledPoly(ctx.u.specialize(subs))
        self.kinetic = CompiledPoly(ctx.H.A.specialize(subs))
        self.x1_lead = CompiledPoly(ctx.x1_leading.specialize(subs))
        self.x2_lead = CompiledPoly(ctx.x2_leading.specialize(subs))
        self.m1_num = CompiledPoly(ctx.m1_numerator.specialize(subs))
        self.m2_num = CompiledPoly(ctx.m2_numerator.specialize(subs))
        self.w0 = float(w0)

    def __call__(self, q, p) -> tuple[float, float, float]:
        vals = (q[0], q[1], q[2], p[0], p[1], p[2])
        uval = self.u_of(vals)
        if uval <= 0.0:
            raise SingularPoint(f"u = {uval!r} at q = {tuple(q)}")
        rs = 1.0 / math.sqrt(uval)
        h = self.kinetic(vals) + self.w0 * rs
        x1 = self.x1_lead(vals) + self.m1_num(vals) * rs
        x2 = self.x2_lead(vals) + self.m2_num(vals) * rs
        return h, x1, x2

    def u(self, q) -> float:
        return self.u_of((q[0], q[1], q[2], 0.0, 0.0, 0.0))


def eval_integrals(state: "PhaseState", a: float, b: float, w0: float):
    return IntegralEvaluator(a, b, w0)(state.q, state.p)


# -- integrators -------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
    -92097 / 339200, 187 / 2100, 1 / 40,
)


@dataclass
class PhaseState:
    t: float
    q: np.ndarray
    p: np.ndarray

    @staticmethod
    def make(t, q, p) -> "PhaseState":
        return PhaseState(float(t), np.asarray(q, dtype=float).copy(),
                          np.asarray(p, dtype=float).copy())


def _rhs(force, y):
    f = force(y[:3])
    return (y[3], y[4], y[5], f[0], f[1], f[2])


def dp54_step(force, y0, h: float):
    """One raw Dormand-Prince 5(4) step from the packed state y0 = (q, p).

    Returns (y5, error_estimate) where the estimate is the difference
    between the 5th- and embedded 4th-order solutions (scales as h^5).
    States are 6-tuples of floats.
    """
    y0 = tuple(y0)
    ks = [_rhs(force, y0)]
    for i in range(1, 7):
        row = _DP_A[i]
        yi = tuple(
            y0[j] + h * sum(aij * k[j] for aij, k in zip(row, ks))
            for j in range(6)
        )
        ks.append(_rhs(force, yi))
    y5 = tuple(
        y0[j] + h * sum(bi * k[j] for bi, k in zip(_DP_B5, ks))
        for j in range(6)
    )
    y4 = tuple(
        y0[j] + h * sum(bi * k[j] for bi, k in zip(_DP_B4, ks))
        for j in range(6)
    )
    err = tuple(a - b for a, b in zip(y5, y4))
    return y5, err


class AdaptiveStepper:
    """Embedded Runge-Kutta 5(4) with proportional-integral step control."""

    def __init__(self, force, rel_tol=1e-12, abs_tol=1e-14,
                 h_init=1e-3, h_min=1e-12, h_max=1.0, safety=0.9):
        self.force = force
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.h = h_init
        self.h_min = h_min
        self.h_max = h_max
        self.safety = safety
        self._err_prev = 1.0

    def step(self, state: PhaseState, h_cap: float | None = None):
        """Advance one accepted step; returns (state', h_used, err_est)."""
        y0 = (*state.q, *state.p)
        while True:
            h = self.h if h_cap is None else min(self.h, h_cap)
            if h < self.h_min:
                raise StepFailure(f"step size {h:g} below floor {self.h_min:g}")
            y5, diff = dp54_step(self.force, y0, h)
            acc = 0.0
            for j in range(6):
                sc = self.abs_tol + self.rel_tol * max(abs(y0[j]), abs(y5[j]))
                acc += (diff[j] / sc) ** 2
            err = math.sqrt(acc / 6.0)
            if err <= 1.0 or h <= self.h_min:
                # PI controller (Gustafsson): orders 0.7/5 and 0.4/5
                e = max(err, 1e-10)
                factor = self.safety * e**-0.14 * self._err_prev**0.08
                self._err_prev = e
                self.h = min(max(self.h * min(max(factor, 0.2), 5.0), self.h_min),
                             self.h_max)
                new = PhaseState(state.t + h, np.array(y5[:3]), np.array(y5[3:]))
                return new, h, math.sqrt(sum(d * d for d in diff))
            self.h = max(h * max(0.2, self.safety * err**-0.2), self.h_min)
            if self.h >= h and h_cap is None:
                self.h = 0.5 * h


def step_leapfrog(state: PhaseState, h: float, force) -> PhaseState:
    """One velocity-Verlet (kick-drift-kick) step; symplectic, reversible."""
    p_half = state.p + 0.5 * h * np.asarray(force(state.q))
    q_new = state.q + h * p_half
    p_new = p_half + 0.5 * h * np.asarray(force(q_new))
    return PhaseState(state.t + h, q_new, p_new)


# -- simulation harness ------------------------------------------------


@dataclass
class SimConfig:
    a: float = 0.25
    b: float = 1.0
    w0: float = -1.0
    integrator: str = "adaptive"          # "adaptive" | "leapfrog"
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    fixed_step: float = 1e-3              # leapfrog only
    t_end: float = 100.0
    u_floor: float = 1e-10
    r_max: float = 1e3
    sample_interval: float = 1.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        _check_param_domain(_exact(self.a), _exact(self.b))


TRAJECTORY_HEADER = "t,x,y,z,px,py,pz,H,X1,X2,u,d_sing"


@dataclass
class TrajectoryRecord:
    rows: list[tuple]                      # matches TRAJECTORY_HEADER

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(TRAJECTORY_HEADER + "\n")
            for row in self.rows:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @staticmethod
    def read_csv(path) -> "TrajectoryRecord":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header != TRAJECTORY_HEADER:
                raise ValueError(f"malformed trajectory header: {header!r}")
            for line in fh:
                line = line.strip()
                if line:
                    rows.append(tuple(float(v) for v in line.split(",")))
        return TrajectoryRecord(rows)


@dataclass
class RunOutcome:
    classification: str                    # completed | singularity-approach | escape | step-failure
    drift_H: float
    drift_X1: float
    drift_X2: float
    min_u: float
    max_q: float
    t_final: float
    detail: str = ""


def distance_to_singular_lines(q, a: float, b: float) -> float:
    """Minimum Euclidean distance from q to the two singular lines."""
    best = math.inf
    q = np.asarray(q, dtype=float)
    for line in singular_lines(float(a), float(b)):
        p0 = np.array([float(v) for v in line.point])
        d = np.array([float(v) for v in line.direction])
        d /= np.linalg.norm(d)
        r = q - p0
        perp = r - np.dot(r, d) * d
        best = min(best, float(np.linalg.norm(perp)))
    return best


def _rel_drift(val: float, ref: float) -> float:
    return abs(val - ref) / max(abs(ref), 1e-3)


def simulate(config: SimConfig, initial: PhaseState):
    """Integrate to t_end or a stop condition, sampling conserved quantities.

    Failures are classified in the returned RunOutcome, not raised, except
    for an initial condition already inside the singularity cutoff.
    """
    force = compile_force(config.a, config.b, config.w0, config.u_floor)
    integrals = IntegralEvaluator(config.a, config.b, config.w0)
    force._u_checked(initial.q)  # reject ICs on/near the singular lines

    def sample_row(st: PhaseState):
        h, x1, x2 = integrals(st.q, st.p)
        uval = integrals.u(st.q)
        ds = distance_to_singular_lines(st.q, config.a, config.b)
        return (st.t, st.q[0], st.q[1], st.q[2], st.p[0], st.p[1], st.p[2],
                h, x1, x2, uval, ds)

    rows = [sample_row(initial)]
    h0, x10, x20 = rows[0][7], rows[0][8], rows[0][9]
    min_u = rows[0][10]
    max_q = float(np.linalg.norm(initial.q))
    drift = [0.0, 0.0, 0.0]

    state = initial
    stepper = AdaptiveStepper(force, config.rel_tol, config.abs_tol)
    next_sample = initial.t + config.sample_interval
    classification = "completed"
    detail = ""
    try:
        while state.t < config.t_end - 1e-12:
            cap = min(next_sample, config.t_end) - state.t
            if config.integrator == "leapfrog":
                h = min(config.fixed_step, cap)
                state = step_leapfrog(state, h, force)
            else:
                state, _, _ = stepper.step(state, h_cap=cap)
            min_u = min(min_u, force.u(state.q))
            max_q = max(max_q, float(np.linalg.norm(state.q)))
            if max_q > config.r_max:
                classification = "escape"
                detail = f"|q| = {max_q:.3g} exceeded r_max at t = {state.t:.6g}"
                break
            if state.t >= next_sample - 1e-12:
                row = sample_row(state)
                rows.append(row)
                drift[0] = max(drift[0], _rel_drift(row[7], h0))
                drift[1] = max(drift[1], _rel_drift(row[8], x10))
                drift[2] = max(drift[2], _rel_drift(row[9], x20))
                next_sample += config.sample_interval
    except SingularPoint as exc:
        classification = "singularity-approach"
        detail = str(exc)
    except StepFailure as exc:
        classification = "step-failure"
        detail = str(exc)

    outcome = RunOutcome(
        classification=classification,
        drift_H=drift[0], drift_X1=drift[1], drift_X2=drift[2],
        min_u=min_u, max_q=max_q, t_final=state.t, detail=detail,
    )
    return TrajectoryRecord(rows), outcome


SCAN_HEADER = "idx,x0,y0,z0,px0,py0,pz0,E,min_u,min_dsing,class"


def _scan_one(config: SimConfig, idx: int, ic):
    q0, p0 = ic
    state = PhaseState.make(0.0, q0, p0)
    integrals = IntegralEvaluator(config.a, config.b, config.w0)
    energy = integrals(state.q, state.p)[0]
    record, outcome = simulate(config, state)
    min_dsing = min(row[11] for row in record.rows)
    return (
        idx, *state.q, *state.p, energy,
        outcome.min_u, min_dsing, outcome.classification,
    )


def scan_singularity(config: SimConfig, initial_conditions, jobs: int = 1):
    """Batch simulations probing approach to the singular lines (w0 < 0).

    Purely exploratory: reports min u and min singular-line distance per
    run, with no claim about reachability.  Rows are ordered by input
    index regardless of completion order.
    """
    if config.w0 >= 0:
        raise ParamDomain("singularity scan requires w0 < 0")
    ics = list(initial_conditions)
    if jobs > 1 and len(ics) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_scan_one, config, idx, ic)
                for idx, ic in enumerate(ics)
            ]
            return [f.result() for f in futures]
    return [_scan_one(config, idx, ic) for idx, ic in enumerate(ics)]


def write_scan_csv(table, path):
    with open(path, "w") as fh:
        fh.write(SCAN_HEADER + "\n")
        for row in table:
            fields = [str(row[0])]
            fields += [f"{v:.17g}" for v in row[1:10]]
            fields.append(row[10])
            fh.write(",".join(fields) + "\n")
