"""Fixed-step simulator for linear closed loops with state resets.

Between resets the state flows under ``xdot = A x + B u(x)`` with the
homogeneous feedback; when the flow crosses the jump surface |H x| = r moving
outward (x' Q x > 0), the crossing time is located by bisection inside the
step, the linear reset x -> Pi x is applied, and integration restarts.
Fixed-step RK4 keeps records bit-for-bit reproducible for a given
configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .homnorm import hom_norm
from .synthesis import GainSet, PlantMatrices, homogeneous_feedback

ZENO_CAP = 100

# After a reset, event detection stays disarmed until the state has moved
# measurably inside the surface; prevents numerical re-triggering.
_REARM_LEVEL = -1e-9

_EVENT_TIME_TOL = 1e-12
_OVERSHOOT_FRAC = 1e-3


@dataclass
class JumpSpec:
    """Reset map and jump surface of the impulsive loop.

    The jump set is {x : |H x|^2 = r^2 and x' Q x > 0}; membership requires
    the indefinite form positive so only outward crossings fire.  Pi must map
    the jump set off itself (Pi' Q Pi = -Q guarantees that), which rules out
    instantaneous re-triggering.
    """

    Pi: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    r: float

    @classmethod
    def block_reflection(cls, n: int, r: float) -> "JumpSpec":
        """Standard instance: negate the first block on the sphere |x1| = r."""
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return cls(
            Pi=np.block([[-eye, zero], [zero, eye]]),
            H=np.block([[eye, zero], [zero, zero]]),
            Q=np.block([[zero, eye], [eye, zero]]),
            r=float(r),
        )

    def check(self) -> None:
        defect = float(np.linalg.norm(self.Pi.T @ self.Q @ self.Pi + self.Q))
        if defect > 1e-12:
            raise ValueError("reset map does not satisfy Pi' Q Pi = -Q")
        if self.r <= 0.0:
            raise ValueError("jump-surface radius must be positive")

    def surface_defect(self, x: np.ndarray) -> float:
        """|H x|^2 - r^2; negative inside the surface."""
        hx = self.H @ x
        return float(hx @ hx) - self.r * self.r

    def outward_form(self, x: np.ndarray) -> float:
        return float(x @ self.Q @ x)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return abs(self.surface_defect(x)) <= tol and self.outward_form(x) > 0.0


@dataclass
class JumpEvent:
    t: float
    x_minus: np.ndarray
    x_plus: np.ndarray
    norm_minus: float
    norm_plus: float
    # |Pi x_minus - x_plus|; zero for linear resets, reported for the
    # attitude simulator where the post-jump rate is recomputed physically.
    reset_mismatch: float = 0.0


@dataclass
class SimRecord:
    """Time-indexed log of a closed-loop run.

    Rows follow the integration grid; each reset contributes two extra rows
    at the event time, first the pre-jump state (flag 0) then the post-jump
    state (flag 1).  ``extras`` carries the attitude channels (omega, omega_d,
    M) when produced by the tracking simulator.
    """

    t: np.ndarray
    x: np.ndarray
    homnorm: np.ndarray
    jump_flag: np.ndarray
    events: list[JumpEvent] = field(default_factory=list)
    extras: dict[str, np.ndarray] = field(default_factory=dict)
    kind: str = "impulsive"
    settling: float | None = None

    @classmethod
    def empty(cls, kind: str = "impulsive", n_states: int = 6) -> "SimRecord":
        extras = {}
        if kind == "attitude":
            extras = {k: np.zeros((0, 3)) for k in ("omega", "omega_d", "M")}
        return cls(
            t=np.zeros(0), x=np.zeros((0, n_states)), homnorm=np.zeros(0),
            jump_flag=np.zeros(0), events=[], extras=extras, kind=kind,
        )

    @property
    def n_states(self) -> int:
        return self.x.shape[1]

    def header(self) -> list[str]:
        if self.kind == "attitude":
            names = [f"theta_e_{i}" for i in (1, 2, 3)]
            names += [f"thetadot_e_{i}" for i in (1, 2, 3)]
            names += [f"omega_{i}" for i in (1, 2, 3)]
            names += [f"omega_d_{i}" for i in (1, 2, 3)]
            names += [f"M_{i}" for i in (1, 2, 3)]
            return ["t"] + names + ["homnorm", "jump_flag"]
        return (["t"] + [f"x_{i + 1}" for i in range(self.n_states)]
                + ["homnorm", "event_flag"])

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        if name == "homnorm":
            return self.homnorm
        if name in ("jump_flag", "event_flag"):
            return self.jump_flag
        if name.startswith("x_"):
            return self.x[:, int(name[2:]) - 1]
        if name.startswith("theta_e_"):
            return self.x[:, int(name[-1]) - 1]
        if name.startswith("thetadot_e_"):
            return self.x[:, 3 + int(name[-1]) - 1]
        if name.startswith("omega_err_"):
            i = int(name[-1]) - 1
            return self.extras["omega_d"][:, i] - self.extras["omega"][:, i]
        for key in ("omega_d", "omega", "M"):
            if name.startswith(key + "_"):
                return self.extras[key][:, int(name[-1]) - 1]
        raise KeyError(name)

    def columns(self) -> list[tuple[str, np.ndarray]]:
        return [(name, self.column(name)) for name in self.header()]


def _rk4(f, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate_impulsive(plant: PlantMatrices, gains: GainSet, jump: JumpSpec,
                       x0: np.ndarray, T: float, dt: float = 1e-4) -> SimRecord:
    """Integrate the impulsive closed loop from x0 over [0, T].

    The initial state must satisfy |H x0| <= r.  Crossings of the jump
    surface are located by bisection to 1e-12 * T; each reset applies
    x -> Pi x and restarts the flow.  More than ``ZENO_CAP`` resets or an
    undetected overshoot of the surface aborts with a diagnostic.
    """
    jump.check()
    x = np.asarray(x0, dtype=float).copy()
    if jump.surface_defect(x) > 1e-9 * jump.r ** 2:
        raise ValueError("initial state lies outside the jump surface |H x| <= r")

    A, B = plant.A, plant.B

    def f(state: np.ndarray) -> np.ndarray:
        return A @ state + B @ homogeneous_feedback(gains, state)

    spec = gains.dilation
    n_steps = int(math.ceil(T / dt - 1e-9))
    time_tol = _EVENT_TIME_TOL * max(T, dt)

    rows_t: list[float] = []
    rows_x: list[np.ndarray] = []
    rows_norm: list[float] = []
    rows_flag: list[float] = []
    events: list[JumpEvent] = []

    def log(t: float, state: np.ndarray, flag: float, norm: float | None = None) -> None:
        rows_t.append(t)
        rows_x.append(state.copy())
        rows_norm.append(hom_norm(spec, state) if norm is None else norm)
        rows_flag.append(flag)

    armed = True

    def apply_reset(t: float, x_minus: np.ndarray) -> np.ndarray:
        nonlocal armed
        if len(events) >= ZENO_CAP:
            raise RuntimeError(
                f"more than {ZENO_CAP} resets at t={t:.6f}: Zeno-like behavior"
            )
        x_plus = jump.Pi @ x_minus
        nm, npl = hom_norm(spec, x_minus), hom_norm(spec, x_plus)
        events.append(JumpEvent(t=t, x_minus=x_minus.copy(), x_plus=x_plus.copy(),
                                norm_minus=nm, norm_plus=npl))
        log(t, x_minus, 0.0, nm)
        log(t, x_plus, 1.0, npl)
        armed = False
        return x_plus

    # An initial state already on the surface and moving outward resets at t=0.
    if jump.contains(x, tol=1e-9 * jump.r ** 2):
        x = apply_reset(0.0, x)

    log(0.0, x, 0.0)
    t = 0.0
    for k in range(n_steps):
        t_next = min(T, (k + 1) * dt)
        while t < t_next - 1e-15:
            h = t_next - t
            e_start = jump.surface_defect(x)
            x_trial = _rk4(f, x, h)
            e_end = jump.surface_defect(x_trial)
            if armed and e_start < 0.0 and e_end >= 0.0:
                lo, hi = 0.0, h
                while hi - lo > time_tol:
                    mid = 0.5 * (lo + hi)
                    if jump.surface_defect(_rk4(f, x, mid)) >= 0.0:
                        hi = mid
                    else:
                        lo = mid
                x_minus = _rk4(f, x, lo)
                if jump.outward_form(x_minus) > 0.0:
                    t = t + lo
                    x = apply_reset(t, x_minus)
                    continue
                # tangential touch without outward motion: keep flowing
            t = t_next
            x = x_trial
            if not armed and jump.surface_defect(x) < _REARM_LEVEL * jump.r ** 2:
                armed = True
            hx = jump.H @ x
            if math.sqrt(float(hx @ hx)) > jump.r * (1.0 + _OVERSHOOT_FRAC):
                raise RuntimeError(
                    f"undetected surface overshoot at t={t:.6f}: |H x| exceeds r"
                )
        log(t_next, x, 0.0)
        t = t_next

    return SimRecord(
        t=np.array(rows_t), x=np.array(rows_x), homnorm=np.array(rows_norm),
        jump_flag=np.array(rows_flag), events=events, kind="impulsive",
    )


def settling_estimate(gains: GainSet, norm0: float, r: float | None = None) -> float:
    """Worst-case convergence time from an initial homogeneous norm.

    Negative degree: finite landing time norm0**(-mu) / (-mu rho).  Zero
    degree: no finite settling (returns inf; the decay is exponential at rate
    rho).  Positive degree: time to enter the ball of homogeneous radius r,
    1 / (rho mu r**mu), uniform over initial states; r is then required.
    """
    if norm0 < 0.0:
        raise ValueError("initial norm must be nonnegative")
    mu, rho = gains.mu, gains.rho
    if mu < 0.0:
        return norm0 ** (-mu) / (-mu * rho)
    if mu == 0.0:
        return math.inf
    if r is None or r <= 0.0:
        raise ValueError("positive degree needs a target radius r > 0")
    return 1.0 / (rho * mu * r ** mu)


def measure_settling(rec: SimRecord, eps: float) -> float:
    """First logged time after which the homogeneous norm stays at or below eps.

    Returns inf when the final sample is still above the threshold.
    """
    if eps <= 0.0:
        raise ValueError("threshold must be positive")
    if rec.t.size == 0:
        return math.inf
    above = np.flatnonzero(rec.homnorm > eps)
    if above.size == 0:
        return float(rec.t[0])
    last = int(above[-1])
    if last == rec.t.size - 1:
        return math.inf
    return float(rec.t[last + 1])
