"""Rotation-group geometry in exponential coordinates.

Rotation vectors are axis-times-angle 3-vectors in radians; ``exp_so3`` and
``log_so3`` convert to and from 3x3 rotation matrices, with the logarithm
always returning the representative inside the closed pi-ball.  The left
Jacobian family relates coordinate rates to body angular velocity, and its
analytic time derivative feeds the tracking controller.

Every trigonometric coefficient switches to a Taylor expansion below a
small-angle threshold so the maps stay smooth through zero; near the
pi-sphere the logarithm extracts the rotation axis from the symmetric part
of the matrix, where the usual skew-part formula degenerates.
"""

from __future__ import annotations

import math

import numpy as np

# Coefficient functions switch to 4th-order Taylor expansions below this.
SMALL_ANGLE = 1e-4

# log_so3 switches to symmetric-part axis extraction above pi minus this.
NEAR_PI = 1e-2

# Derivative coefficients cancel catastrophically for moderate angles, so
# their series region is much wider than SMALL_ANGLE.
DERIV_SMALL_ANGLE = 0.1

# inv_left_jacobian is singular on the 2*pi sphere.
CHART_LIMIT = 2.0 * math.pi - 1e-6

_EYE3 = np.eye(3)


def hat(v: np.ndarray) -> np.ndarray:
    """Skew matrix of a 3-vector: hat(v) @ w equals np.cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(X: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """3-vector of a skew matrix, inverse of hat.  Rejects asymmetric input."""
    X = np.asarray(X, dtype=float)
    if float(np.max(np.abs(X + X.T))) > tol:
        raise ValueError("matrix is not skew-symmetric within tolerance")
    return 0.5 * np.array([X[2, 1] - X[1, 2], X[0, 2] - X[2, 0], X[1, 0] - X[0, 1]])


def exp_so3(v: np.ndarray) -> np.ndarray:
    """Rotation matrix of a rotation vector (Rodrigues formula)."""
    v = np.asarray(v, dtype=float)
    phi2 = float(v @ v)
    phi = math.sqrt(phi2)
    if phi < SMALL_ANGLE:
        a = 1.0 - phi2 / 6.0 + phi2 * phi2 / 120.0
        b = 0.5 - phi2 / 24.0 + phi2 * phi2 / 720.0
    else:
        a = math.sin(phi) / phi
        b = (1.0 - math.cos(phi)) / phi2
    X = hat(v)
    return _EYE3 + a * X + b * (X @ X)


def log_so3(R: np.ndarray) -> np.ndarray:
    """Rotation vector of a rotation matrix, inside the closed pi-ball.

    Near the pi-sphere the axis magnitude comes from the symmetric part of R
    and the rotation angle from the skew part (arccos of the trace is badly
    conditioned there).  The axis sign follows the skew part while it is
    resolvable; at the truly ambiguous antipode the first nonzero axis
    component is made positive.
    """
    R = np.asarray(R, dtype=float)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    cos_phi = max(-1.0, min(1.0, 0.5 * (tr - 1.0)))
    phi = math.acos(cos_phi)
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return w * (1.0 + p2 / 6.0 + 7.0 * p2 * p2 / 360.0)
    if phi > math.pi - NEAR_PI:
        sin_phi = math.sqrt(min(1.0, float(w @ w)))
        phi = math.pi - math.asin(sin_phi)
        c = math.cos(phi)
        # (R + R')/2 = c I + (1 - c) a a'; recover the outer product a a'
        M = (0.5 * (R + R.T) - c * _EYE3) / (1.0 - c)
        j = int(np.argmax(np.diag(M)))
        axis = M[:, j] / math.sqrt(M[j, j])
        w_dot_axis = float(w @ axis)
        if abs(w_dot_axis) > 1e-9:
            if w_dot_axis < 0.0:
                axis = -axis
        else:
            for comp in axis:
                if abs(comp) > 1e-9:
                    if comp < 0.0:
                        axis = -axis
                    break
        return phi * axis
    return w * (phi / math.sin(phi))


def _jl_coeffs(phi: float, phi2: float) -> tuple[float, float]:
    # J_l = I + a X + b X^2 with a = (1-cos)/phi^2, b = (phi-sin)/phi^3
    if phi < SMALL_ANGLE:
        a = 0.5 - phi2 / 24.0 + phi2 * phi2 / 720.0
        b = 1.0 / 6.0 - phi2 / 120.0 + phi2 * phi2 / 5040.0
    else:
        a = (1.0 - math.cos(phi)) / phi2
        b = (phi - math.sin(phi)) / (phi2 * phi)
    return a, b


def left_jacobian(v: np.ndarray) -> np.ndarray:
    """Left Jacobian of the exponential map.

    Relates coordinate rates to the spatial angular velocity of
    R = exp_so3(v):  Rdot = hat(left_jacobian(v) @ vdot) @ R.
    """
    v = np.asarray(v, dtype=float)
    phi2 = float(v @ v)
    a, b = _jl_coeffs(math.sqrt(phi2), phi2)
    X = hat(v)
    return _EYE3 + a * X + b * (X @ X)


def _jlinv_eta(phi: float, phi2: float) -> float:
    # inv J_l = I - X/2 + eta X^2; eta = (1 - (phi/2) cot(phi/2)) / phi^2
    if phi < SMALL_ANGLE:
        return 1.0 / 12.0 + phi2 / 720.0 + phi2 * phi2 / 30240.0
    half = 0.5 * phi
    return (1.0 - half * math.cos(half) / math.sin(half)) / phi2


def inv_left_jacobian(v: np.ndarray) -> np.ndarray:
    """Inverse of the left Jacobian; rejects angles at or beyond 2*pi."""
    v = np.asarray(v, dtype=float)
    phi2 = float(v @ v)
    phi = math.sqrt(phi2)
    if phi >= CHART_LIMIT:
        raise ValueError(f"inv_left_jacobian singular: angle {phi:.6f} >= 2*pi")
    X = hat(v)
    return _EYE3 - 0.5 * X + _jlinv_eta(phi, phi2) * (X @ X)


def _djl_coeffs(phi: float, phi2: float) -> tuple[float, float]:
    # da = a'(phi)/phi and db = b'(phi)/phi for the left_jacobian coefficients
    if phi < DERIV_SMALL_ANGLE:
        da = -1.0 / 12.0 + phi2 / 180.0 - phi2 * phi2 / 6720.0
        db = -1.0 / 60.0 + phi2 / 1260.0 - phi2 * phi2 / 60480.0
    else:
        s, c = math.sin(phi), math.cos(phi)
        da = (phi * s - 2.0 * (1.0 - c)) / (phi2 * phi2)
        db = (phi * (1.0 - c) - 3.0 * (phi - s)) / (phi2 * phi2 * phi)
    return da, db


def d_left_jacobian(v: np.ndarray, vdot: np.ndarray) -> np.ndarray:
    """Time derivative of left_jacobian along v(t), with vdot = dv/dt."""
    v = np.asarray(v, dtype=float)
    vdot = np.asarray(vdot, dtype=float)
    phi2 = float(v @ v)
    phi = math.sqrt(phi2)
    a, b = _jl_coeffs(phi, phi2)
    da, db = _djl_coeffs(phi, phi2)
    vv = float(v @ vdot)
    X = hat(v)
    Xd = hat(vdot)
    return a * Xd + (da * vv) * X + b * (Xd @ X + X @ Xd) + (db * vv) * (X @ X)


def _jlinv_zeta(phi: float, phi2: float) -> float:
    # zeta = eta'(phi)/phi
    if phi < DERIV_SMALL_ANGLE:
        return 1.0 / 360.0 + phi2 / 7560.0 + phi2 * phi2 / 201600.0
    half = 0.5 * phi
    cot = math.cos(half) / math.sin(half)
    return (0.5 * phi * cot + 0.25 * phi2 * (1.0 + cot * cot) - 2.0) / (phi2 * phi2)


def d_inv_left_jacobian(v: np.ndarray, vdot: np.ndarray) -> np.ndarray:
    """Time derivative of inv_left_jacobian along v(t).

    At v = 0 this reduces to -hat(vdot)/2, the only term of the series that
    is linear in v.
    """
    v = np.asarray(v, dtype=float)
    vdot = np.asarray(vdot, dtype=float)
    phi2 = float(v @ v)
    phi = math.sqrt(phi2)
    if phi >= CHART_LIMIT:
        raise ValueError(f"d_inv_left_jacobian singular: angle {phi:.6f} >= 2*pi")
    eta = _jlinv_eta(phi, phi2)
    zeta = _jlinv_zeta(phi, phi2)
    vv = float(v @ vdot)
    X = hat(v)
    Xd = hat(vdot)
    return -0.5 * Xd + (zeta * vv) * (X @ X) + eta * (Xd @ X + X @ Xd)


def rotated_hat_residual(R: np.ndarray, v: np.ndarray) -> float:
    """Frobenius defect of the conjugation identity R hat(v) R' = hat(R v)."""
    R = np.asarray(R, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.linalg.norm(R @ hat(v) @ R.T - hat(R @ v)))


def project_so3(R: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix (polar factor, proper-rotation branch)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    if np.linalg.det(U @ Vt) < 0.0:
        U = U.copy()
        U[:, 2] = -U[:, 2]
    return U @ Vt
