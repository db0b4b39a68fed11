"""Closed-form homogeneous gain design for the block double integrator.

The supported plant is the n-dimensional chain of two integrators,
A = [[0, I], [0, 0]], B = [[0], [I]].  For that structure the matrix design
equation

    A X + X A' + B Y + Y' B' + rho (G X + X G') = 0,   X > 0,  G X + X G' > 0

collapses to three scalar relations among the blocks of X = [[a, b], [b, c]]
and Y = [y1, y2] (each entry times the identity), so gains come out in closed
form; no semidefinite solver is involved.  Externally computed designs can be
loaded verbatim through :class:`GainSet` JSON and audited with
:func:`validate_design`.

The resulting feedback scales the state onto the unit sphere of the
homogeneous norm, applies a static gain there, and scales back.  Along the
unperturbed closed loop the homogeneous norm obeys d/dt |x| = -rho |x|**(1+mu)
exactly, which pins the convergence class: finite-time for mu < 0,
exponential for mu = 0, nearly fixed-time for mu > 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .homnorm import DilationSpec, hom_norm

# Minimal degree is excluded: at mu = -1 the feedback is discontinuous at the
# origin.  The upper limit is 1/2 for a controllability index of two.
MU_RANGE = (-1.0, 0.5)


@dataclass
class PlantMatrices:
    """Block double-integrator plant; the only structure the synthesis supports."""

    A: np.ndarray
    B: np.ndarray
    n: int

    @classmethod
    def double_integrator(cls, n: int) -> "PlantMatrices":
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.eye(n)
        B = np.zeros((2 * n, n))
        B[n:, :] = np.eye(n)
        return cls(A=A, B=B, n=n)

    def check(self) -> None:
        ref = PlantMatrices.double_integrator(self.n)
        if not (np.array_equal(self.A, ref.A) and np.array_equal(self.B, ref.B)):
            raise ValueError("plant is not the block double-integrator structure")
        ctrb = np.hstack([self.B, self.A @ self.B])
        if np.linalg.matrix_rank(ctrb) != 2 * self.n:
            raise ValueError("pair (A, B) is not controllable")


@dataclass
class GainSet:
    """Controller data produced by the synthesis and consumed by the feedback.

    G generates the dilation, P = inv(X) weights the norm, K0 is the linear
    pre-feedback (identically zero for the supported plant) and K the
    homogeneous gain.  X, Y are kept so external designs can be audited.
    Treat instances as immutable; they are shared freely across simulations.
    """

    mu: float
    rho: float
    G: np.ndarray
    P: np.ndarray
    K0: np.ndarray
    K: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    dilation: DilationSpec = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("G", "P", "K0", "K", "X", "Y"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.dilation = DilationSpec(self.G, self.P)

    @property
    def n(self) -> int:
        return self.K.shape[0]

    def to_json(self) -> str:
        payload = {"mu": self.mu, "rho": self.rho, "n": self.n}
        for name in ("G", "P", "K0", "K", "X", "Y"):
            payload[name] = [float(v) for v in getattr(self, name).ravel()]
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GainSet":
        raw = json.loads(text)
        n = int(raw["n"])
        shapes = {"G": (2 * n, 2 * n), "P": (2 * n, 2 * n), "K0": (n, 2 * n),
                  "K": (n, 2 * n), "X": (2 * n, 2 * n), "Y": (n, 2 * n)}
        kwargs = {"mu": float(raw["mu"]), "rho": float(raw["rho"])}
        for name, shape in shapes.items():
            kwargs[name] = np.array(raw[name], dtype=float).reshape(shape)
        return cls(**kwargs)


def solve_generator_equations(plant: PlantMatrices) -> tuple[np.ndarray, np.ndarray]:
    """Solve A G0 - G0 A + B Y0 = A together with G0 B = 0.

    For the block double integrator the solution is G0 = diag(-I, 0) and
    Y0 = 0; both residuals are verified below 1e-12 before returning.
    """
    plant.check()
    n = plant.n
    G0 = np.zeros((2 * n, 2 * n))
    G0[:n, :n] = -np.eye(n)
    Y0 = np.zeros((n, 2 * n))
    r1 = np.linalg.norm(plant.A @ G0 - G0 @ plant.A + plant.B @ Y0 - plant.A)
    r2 = np.linalg.norm(G0 @ plant.B)
    if max(r1, r2) >= 1e-12:
        raise RuntimeError("generator equations unsolved; unsupported plant structure")
    return G0, Y0


def dilation_generator(G0: np.ndarray, mu: float) -> np.ndarray:
    """Anti-Hurwitz generator I + mu G0 of the dilation group."""
    if not MU_RANGE[0] < mu <= MU_RANGE[1]:
        raise ValueError(f"degree mu must lie in ({MU_RANGE[0]}, {MU_RANGE[1]}]")
    G0 = np.asarray(G0, dtype=float)
    Gd = np.eye(G0.shape[0]) + mu * G0
    if float(np.min(np.linalg.eigvals(Gd).real)) <= 0.0:
        raise ValueError("generator I + mu G0 is not anti-Hurwitz")
    return Gd


def default_free_parameters(mu: float, rho: float) -> tuple[float, float]:
    """Feasible (a, c) with a factor-two margin on the binding positivity bound."""
    g1 = 1.0 - mu
    a = 1.0
    c = 2.0 * (g1 + 1.0) ** 2 * rho ** 2 * g1 ** 2 * a / (4.0 * g1)
    return a, c


def _design_residual(plant: PlantMatrices, gains_G: np.ndarray, X: np.ndarray,
                     Y: np.ndarray, rho: float) -> float:
    R = (plant.A @ X + X @ plant.A.T + plant.B @ Y + Y.T @ plant.B.T
         + rho * (gains_G @ X + X @ gains_G.T))
    return float(np.linalg.norm(R))


def synthesize_gains(plant: PlantMatrices, mu: float, rho: float,
                     a: float | None = None, c: float | None = None) -> GainSet:
    """Closed-form gain design for the block double integrator.

    Free parameters (a, c) are the diagonal blocks of X; the off-diagonal
    block and both gain blocks follow from the three scalar design relations

        b  = -rho g1 a,
        y1 = -c - rho (g1 + g2) b,
        y2 = -rho g2 c,

    with g1 = 1 - mu and g2 = 1 the dilation weights.  Positivity of X and of
    G X + X G' restricts (a, c); violations raise with the binding constraint
    named.  Defaults come from :func:`default_free_parameters`.
    """
    plant.check()
    if rho <= 0.0:
        raise ValueError("decay rate rho must be positive")
    G0, Y0 = solve_generator_equations(plant)
    Gd = dilation_generator(G0, mu)

    g1, g2 = 1.0 - mu, 1.0
    if a is None or c is None:
        da, dc = default_free_parameters(mu, rho)
        a = da if a is None else a
        c = dc if c is None else c
    if a <= 0.0:
        raise ValueError("free parameter a must be positive")
    if c <= 0.0:
        raise ValueError("free parameter c must be positive")
    b = -rho * g1 * a
    if a * c - b * b <= 0.0:
        raise ValueError("X positivity violated: need a c > (rho g1 a)^2")
    if 4.0 * g1 * g2 * a * c - ((g1 + g2) * b) ** 2 <= 0.0:
        raise ValueError(
            "G X + X G' positivity violated: need 4 g1 g2 a c > ((g1+g2) rho g1 a)^2"
        )

    n = plant.n
    eye = np.eye(n)
    y1 = -c - rho * (g1 + g2) * b
    y2 = -rho * g2 * c

    X = np.kron(np.array([[a, b], [b, c]]), eye)
    Y = np.kron(np.array([[y1, y2]]), eye)
    det = a * c - b * b
    P2 = np.array([[c, -b], [-b, a]]) / det
    P = np.kron(P2, eye)
    K = np.kron(np.array([[y1, y2]]) @ P2, eye)
    K0 = Y0 @ np.linalg.inv(G0 - np.eye(2 * n))

    gains = GainSet(mu=mu, rho=rho, G=Gd, P=P, K0=K0, K=K, X=X, Y=Y)
    gains.dilation.check()
    rel = _design_residual(plant, Gd, X, Y, rho) / float(np.linalg.norm(X))
    if rel >= 1e-10:
        raise RuntimeError(f"closed-form design residual {rel:.3e} out of tolerance")
    return gains


@dataclass
class DesignReport:
    """Audit numbers for a (possibly externally computed) gain set."""

    generator_residual: float       # linear structure equations for (G0, Y0)
    design_residual_rel: float      # design equation, relative to |X|_F
    min_eig_X: float
    min_eig_GX: float               # G X + X G'
    min_eig_monotone: float         # P G + G' P, required by the norm
    gain_mismatch: float            # |K - Y inv(X)|_F


def validate_design(gains: GainSet, plant: PlantMatrices) -> DesignReport:
    """Residual report for a candidate design; never raises on bad numbers."""
    G0, Y0 = solve_generator_equations(plant)
    gen_res = max(
        float(np.linalg.norm(plant.A @ G0 - G0 @ plant.A + plant.B @ Y0 - plant.A)),
        float(np.linalg.norm(G0 @ plant.B)),
    )
    rel = _design_residual(plant, gains.G, gains.X, gains.Y, gains.rho)
    rel /= float(np.linalg.norm(gains.X))
    sym = lambda M: 0.5 * (M + M.T)
    gx = gains.G @ gains.X + gains.X @ gains.G.T
    cert = gains.P @ gains.G + gains.G.T @ gains.P
    return DesignReport(
        generator_residual=gen_res,
        design_residual_rel=rel,
        min_eig_X=float(np.min(np.linalg.eigvalsh(sym(gains.X)))),
        min_eig_GX=float(np.min(np.linalg.eigvalsh(sym(gx)))),
        min_eig_monotone=float(np.min(np.linalg.eigvalsh(sym(cert)))),
        gain_mismatch=float(np.linalg.norm(gains.K - gains.Y @ np.linalg.inv(gains.X))),
    )


def homogeneous_feedback(gains: GainSet, xi: np.ndarray) -> np.ndarray:
    """Feedback K0 x + r**(1+mu) K d(-ln r) x with r the homogeneous norm of x.

    Scales the state onto the unit sphere, applies the static gain there, and
    scales the command back.  Exactly zero at the origin and continuous there
    for every admissible degree.
    """
    xi = np.asarray(xi, dtype=float)
    r = hom_norm(gains.dilation, xi)
    if r == 0.0:
        return np.zeros(gains.n)
    u = gains.K @ gains.dilation.apply(-math.log(r), xi)
    return gains.K0 @ xi + r ** (1.0 + gains.mu) * u
