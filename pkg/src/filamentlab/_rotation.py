"""Batched SO(3) kernels for frame transport.

Frames are stored as 3x3 matrices whose ROWS are the frame vectors; a frame
field R(x) obeying R' = K(x) R with K skew stays in SO(3), so every
integration step is realized as an exact rotation (Rodrigues exponential of
a commutator-free 4th-order average of K).  Products of rotations are then
accumulated with a doubling scan, which keeps orthonormality to rounding.
"""

from __future__ import annotations

import numpy as np

# Gauss nodes and weights of the two-exponential commutator-free 4th-order step
CF4_NODE_LO = 0.5 - np.sqrt(3.0) / 6.0
CF4_NODE_HI = 0.5 + np.sqrt(3.0) / 6.0
CF4_ALPHA = 0.25 + np.sqrt(3.0) / 6.0
CF4_BETA = 0.25 - np.sqrt(3.0) / 6.0


def skew_from_vector(w: np.ndarray) -> np.ndarray:
    """Skew matrices S with S v = w x v, batched over the leading axis."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def rodrigues(w: np.ndarray) -> np.ndarray:
    """exp of the skew matrix with axis vector w, batched."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    s = skew_from_vector(w)
    s2 = s @ s
    small = theta < 1e-8
    th = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(th) / th)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(th)) / th**2)
    eye = np.broadcast_to(np.eye(3), s.shape)
    return eye + a[..., None, None] * s + b[..., None, None] * s2


def prefix_rotations(steps: np.ndarray) -> np.ndarray:
    """Inclusive prefix products P[i] = steps[i] @ ... @ steps[0] (doubling scan)."""
    p = np.array(steps, dtype=float)
    n = p.shape[0]
    shift = 1
    while shift < n:
        p[shift:] = p[shift:] @ p[:-shift]
        shift *= 2
    return p


def reorthonormalize(r: np.ndarray, iterations: int = 2) -> np.ndarray:
    """Project near-rotations onto SO(3) (Newton iteration for the polar factor)."""
    out = np.array(r, dtype=float)
    for _ in range(iterations):
        out = 1.5 * out - 0.5 * (out @ np.swapaxes(out, -1, -2) @ out)
    return out


def gram_residual(r: np.ndarray) -> float:
    """Largest entrywise deviation of R R^T from the identity."""
    g = r @ np.swapaxes(r, -1, -2)
    return float(np.max(np.abs(g - np.eye(3))))


def check_frame(r: np.ndarray, tol: float = 1e-10, what: str = "frame") -> None:
    res = gram_residual(r)
    if res > tol:
        raise ValueError(f"{what} is not orthonormal: Gram residual {res:.3e} > {tol:.1e}")
    if np.any(np.linalg.det(r) < 0.0):
        raise ValueError(f"{what} is not right-handed (negative determinant)")


def transport(axes: np.ndarray, frame0: np.ndarray) -> np.ndarray:
    """Frames R_j = exp(S(axes[j-1])) ... exp(S(axes[0])) @ frame0.

    `axes` has shape (n_steps, n_exp, 3): each step applies its n_exp
    Rodrigues rotations in order.  Returns (n_steps + 1, 3, 3) including the
    initial frame; the result is re-orthonormalized batchwise.
    """
    n_steps = axes.shape[0]
    frames = np.empty((n_steps + 1, 3, 3))
    frames[0] = frame0
    if n_steps == 0:
        return frames
    step = rodrigues(axes[:, 0])
    for k in range(1, axes.shape[1]):
        step = rodrigues(axes[:, k]) @ step
    prefix = prefix_rotations(step)
    frames[1:] = reorthonormalize(prefix @ frame0)
    return frames


def cf4_axes(w_lo: np.ndarray, w_hi: np.ndarray, h) -> np.ndarray:
    """Axis pairs of the CF4 step from generator axis samples at the two
    Gauss nodes of each step; h may be scalar or per-step."""
    h = np.asarray(h, dtype=float)
    if h.ndim == 0:
        h = np.full(w_lo.shape[0], float(h))
    first = h[:, None] * (CF4_ALPHA * w_lo + CF4_BETA * w_hi)
    second = h[:, None] * (CF4_BETA * w_lo + CF4_ALPHA * w_hi)
    return np.stack([first, second], axis=1)


# 4-point Lagrange weights for values at fractional offset c within [x_j, x_j+1],
# stencil nodes {j-1, j, j+1, j+2}
def _lagrange4_weights(c: float) -> np.ndarray:
    xs = np.array([-1.0, 0.0, 1.0, 2.0])
    w = np.empty(4)
    for i in range(4):
        others = np.delete(xs, i)
        w[i] = np.prod((c - others) / (xs[i] - others))
    return w


def sample_at_offset(values: np.ndarray, c: float) -> np.ndarray:
    """values interpolated at x_j + c*dx for j = 0..n-2 (4th-order Lagrange).

    Interior stencils are centered; the first/last interval reuse the
    one-sided stencil.  Works on float or complex arrays.
    """
    v = np.asarray(values)
    n = v.shape[0]
    if n < 4:
        raise ValueError("need at least 4 samples")
    def one_sided(xs):
        return np.array([np.prod((c - np.delete(xs, i)) / (xs[i] - np.delete(xs, i))) for i in range(4)])

    w = _lagrange4_weights(c)
    out = np.empty(n - 1, dtype=v.dtype)
    out[1:-1] = w[0] * v[:-3] + w[1] * v[1:-2] + w[2] * v[2:-1] + w[3] * v[3:]
    out[0] = np.dot(one_sided(np.array([0.0, 1.0, 2.0, 3.0])), v[:4])
    out[-1] = np.dot(one_sided(np.array([-2.0, -1.0, 0.0, 1.0])), v[-4:])
    return out


def rotation_between_pairs(u1: np.ndarray, u2: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Rotation R with R u1 = v1, R u2 = v2 for unit pairs with equal angle."""
    def triad(a, b):
        t1 = a + b
        n1 = np.linalg.norm(t1)
        if n1 < 1e-12:
            raise ValueError("pair is antipodal; alignment rotation is not unique")
        t1 /= n1
        t2 = a - b
        t2 -= np.dot(t2, t1) * t1
        n2 = np.linalg.norm(t2)
        if n2 < 1e-12:
            raise ValueError("pair is colinear; alignment rotation is not unique")
        t2 /= n2
        return np.stack([t1, t2, np.cross(t1, t2)])

    tu, tv = triad(u1, u2), triad(v1, v2)
    return reorthonormalize(tv.T @ tu)


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    return rodrigues(angle * axis / np.linalg.norm(axis))
