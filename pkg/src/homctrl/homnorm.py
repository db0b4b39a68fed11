"""Linear dilations and the implicit homogeneous norm they induce.

A dilation is the one-parameter matrix group s -> expm(s G) for an
anti-Hurwitz generator G.  Paired with a weighted Euclidean norm
|x| = sqrt(x' P x) that certifies monotonicity (P G + G' P positive
definite), every nonzero state crosses the unit sphere under exactly one
group element: the homogeneous norm of x is e**s for the unique s with
|d(-s) x| = 1.  That scalar is the Lyapunov function of the feedback designs
in :mod:`homctrl.synthesis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

# math.exp overflows just above 709; beyond this the true quadratic is huge.
_EXP_CAP = 700.0

_NEWTON_STEPS = 5
_BISECT_STEPS = 60
_EVAL_BUDGET = 200


@dataclass
class DilationSpec:
    """Dilation group d(s) = expm(s G) with weighted norm sqrt(x' P x).

    ``check()`` verifies the assumptions behind the homogeneous norm: G is
    anti-Hurwitz, P is symmetric positive definite, and P G + G' P > 0 so
    that s -> |d(s) x| is strictly increasing.  Diagonal generators (the only
    kind the closed-form synthesis produces) get a fast evaluation path that
    never forms a matrix exponential.
    """

    G: np.ndarray
    P: np.ndarray
    _diag: np.ndarray | None = field(init=False, repr=False, default=None)
    _exps: np.ndarray | None = field(init=False, repr=False, default=None)
    _groups: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        self.G = np.asarray(self.G, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.G.ndim != 2 or self.G.shape[0] != self.G.shape[1]:
            raise ValueError("generator must be square")
        if self.P.shape != self.G.shape:
            raise ValueError("weight matrix must match the generator shape")
        off = self.G - np.diag(np.diag(self.G))
        if not off.any():
            w = np.diag(self.G).copy()
            exps, groups = np.unique(
                (w[:, None] + w[None, :]).ravel(), return_inverse=True
            )
            self._diag = w
            self._exps = exps
            self._groups = groups

    @property
    def n(self) -> int:
        return self.G.shape[0]

    def check(self) -> None:
        """Raise ValueError naming the first violated assumption."""
        if float(np.max(np.abs(self.P - self.P.T))) > 1e-12:
            raise ValueError("weight matrix P is not symmetric")
        if float(np.min(np.linalg.eigvalsh(self.P))) <= 0.0:
            raise ValueError("weight matrix P is not positive definite")
        if float(np.min(np.linalg.eigvals(self.G).real)) <= 0.0:
            raise ValueError("generator G is not anti-Hurwitz")
        cert = self.P @ self.G + self.G.T @ self.P
        if float(np.min(np.linalg.eigvalsh(0.5 * (cert + cert.T)))) <= 0.0:
            raise ValueError("monotonicity certificate P G + G' P is not positive definite")

    def weighted_norm(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return math.sqrt(max(0.0, float(x @ self.P @ x)))

    def matrix(self, s: float) -> np.ndarray:
        """Dilation matrix d(s)."""
        if self._diag is not None:
            return np.diag(np.exp(s * self._diag))
        return expm(s * self.G)

    def apply(self, s: float, x: np.ndarray) -> np.ndarray:
        """d(s) @ x without forming the matrix in the diagonal case."""
        if self._diag is not None:
            return np.exp(s * self._diag) * np.asarray(x, dtype=float)
        return self.matrix(s) @ np.asarray(x, dtype=float)

    def apply_transpose(self, s: float, x: np.ndarray) -> np.ndarray:
        """d(s)' @ x."""
        if self._diag is not None:
            return np.exp(s * self._diag) * np.asarray(x, dtype=float)
        return self.matrix(s).T @ np.asarray(x, dtype=float)


def dilate(spec: DilationSpec, s: float) -> np.ndarray:
    """Group element d(s) = expm(s G); d(0) = I and d(s1) d(s2) = d(s1+s2)."""
    return spec.matrix(s)


def _scalar_terms(spec: DilationSpec, x: np.ndarray) -> list[tuple[float, float]]:
    # For diagonal G the squared weighted norm of d(-s) x collapses to a sum
    # of exponentials: sum_k c_k exp(-e_k s).
    C = (spec.P * np.outer(x, x)).ravel()
    coeffs = np.bincount(spec._groups, weights=C, minlength=len(spec._exps))
    return [(float(e), float(c)) for e, c in zip(spec._exps, coeffs) if c != 0.0]


def hom_norm(spec: DilationSpec, x: np.ndarray, s_tol: float = 1e-12) -> float:
    """Canonical homogeneous norm of x under the dilation.

    Zero at the origin; otherwise e**s for the unique s that places d(-s) x
    on the unit sphere of the weighted norm.  The implicit equation is
    bracketed by doubling outward from log|x|, bisected, and polished with
    Newton steps; the result is verified to land on the unit sphere within
    1e-10 and a failure to do so signals a non-monotone specification.
    """
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return 0.0

    if spec._diag is not None:
        terms = _scalar_terms(spec, x)

        def g(s: float) -> float:
            total = -1.0
            for e, c in terms:
                arg = -e * s
                if arg > _EXP_CAP:
                    return math.inf
                total += c * math.exp(arg)
            return total

        def gprime(s: float) -> float:
            return -sum(e * c * math.exp(-e * s) for e, c in terms)

    else:
        P, G = spec.P, spec.G
        M = P @ G + G.T @ P

        def g(s: float) -> float:
            y = spec.apply(-s, x)
            return float(y @ P @ y) - 1.0

        def gprime(s: float) -> float:
            y = spec.apply(-s, x)
            return -float(y @ M @ y)

    wn = spec.weighted_norm(x)
    if wn == 0.0:
        return 0.0
    s0 = math.log(wn)

    evals = 0

    def geval(s: float) -> float:
        nonlocal evals
        evals += 1
        if evals > _EVAL_BUDGET:
            raise RuntimeError(
                "homogeneous norm did not converge; dilation is likely not monotone"
            )
        return g(s)

    g0 = geval(s0)
    if g0 == 0.0:
        return math.exp(s0)
    step = 1.0
    if g0 > 0.0:
        lo, hi = s0, s0 + step
        while geval(hi) > 0.0:
            lo = hi
            step *= 2.0
            hi += step
    else:
        lo, hi = s0 - step, s0
        while geval(lo) < 0.0:
            hi = lo
            step *= 2.0
            lo -= step

    for _ in range(_BISECT_STEPS):
        if hi - lo < 1e-8:
            break
        mid = 0.5 * (lo + hi)
        if geval(mid) > 0.0:
            lo = mid
        else:
            hi = mid

    s = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        gs = g(s)
        if gs > 0.0:
            lo = max(lo, s)
        elif gs < 0.0:
            hi = min(hi, s)
        ds = gs / gprime(s)
        s_new = s - ds
        if not lo <= s_new <= hi:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) < s_tol * 0.1:
            s = s_new
            break
        s = s_new

    y = spec.apply(-s, x)
    residual = abs(math.sqrt(max(0.0, float(y @ spec.P @ y))) - 1.0)
    if residual >= 1e-10:
        raise RuntimeError(
            f"homogeneous norm verification failed (residual {residual:.3e}); "
            "dilation is likely not monotone"
        )
    return math.exp(s)


def hom_norm_gradient(spec: DilationSpec, x: np.ndarray) -> np.ndarray:
    """Gradient of hom_norm; defined away from the origin only."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("homogeneous norm gradient is undefined at the origin")
    r = hom_norm(spec, x)
    s = math.log(r)
    y = spec.apply(-s, x)
    Py = spec.P @ y
    denom = float(y @ spec.P @ (spec.G @ y))
    return (r / denom) * spec.apply_transpose(-s, Py)


def homogeneity_residual(spec, f, mu: float, samples: int = 100,
                         s_span: float = 3.0, seed: int = 0) -> float:
    """Worst relative defect of f(d(s) x) = e**(mu s) d(s) f(x).

    Samples random states and scalings s in [-s_span, s_span]; a vector field
    that is homogeneous of degree mu under the dilation returns ~0.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal(spec.n)
        if float(np.linalg.norm(x)) < 1e-6:
            continue
        s = float(rng.uniform(-s_span, s_span))
        lhs = np.asarray(f(spec.apply(s, x)), dtype=float)
        rhs = math.exp(mu * s) * spec.apply(s, np.asarray(f(x), dtype=float))
        scale = float(np.linalg.norm(lhs))
        defect = float(np.linalg.norm(lhs - rhs))
        worst = max(worst, defect / scale if scale > 0.0 else defect)
    return worst
