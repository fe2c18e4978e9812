"""Squeezing parameter and quantum Fisher information from spin moments.

xi^2 = N min_perp Var(S_perp) / |S|^2 and F_Q = 4 max_perp Var(S_perp),
extremized over the plane perpendicular to the instantaneous mean spin by
exact 2x2 eigendecomposition.  The collective spin length |S| in the
denominator is the fixed coherent-state value N * s_eff of the manifold
when ``ref_length`` is supplied (the convention used for all reported
sweeps); otherwise the instantaneous |<S>| is used (Ramsey-contrast
convention).  For antisymmetric runs the reported squeezing is
xi^2_A = 2 xi^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIRECTION_ATOL = 1e-10


@dataclass(frozen=True)
class SpinMoments:
    """First and second moments of a collective manifold triple."""

    mean: np.ndarray  # (3,)
    cov: np.ndarray  # (3, 3) symmetrized covariance
    n_atoms: int
    ref_length: float | None = None  # fixed collective spin length N*s_eff
    stderr_mean: np.ndarray | None = None
    stderr_cov: np.ndarray | None = None


@dataclass(frozen=True)
class SqueezingResult:
    xi2: float
    fq: float
    spin_length: float
    min_direction: np.ndarray
    max_direction: np.ndarray
    xi2_a: float | None = None  # 2*xi2, antisymmetric runs only
    xi2_stderr: float | None = None
    fq_stderr: float | None = None
    zero_mean: bool = False


class ZeroMeanSpin(ValueError):
    """Mean spin vanishes; xi^2 is undefined."""


def _perp_frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair spanning the plane perpendicular to
    ``direction`` (unit vector)."""
    ref = np.zeros(3)
    ref[np.argmin(np.abs(direction))] = 1.0
    e1 = ref - np.dot(ref, direction) * direction
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(direction, e1)
    return e1, e2


def squeezing_and_fisher(
    moments: SpinMoments, antisymmetric: bool = False, zero_mean_atol: float = 1e-12
) -> SqueezingResult:
    mean = np.asarray(moments.mean, dtype=float)
    cov = np.asarray(moments.cov, dtype=float)
    length = float(np.linalg.norm(mean))
    if length <= zero_mean_atol * max(1, moments.n_atoms):
        # xi^2 undefined; F_Q still meaningful from the full covariance
        evals, evecs = np.linalg.eigh(cov)
        return SqueezingResult(
            xi2=float("nan"),
            fq=float(4.0 * evals[-1]),
            spin_length=length,
            min_direction=evecs[:, 0],
            max_direction=evecs[:, -1],
            xi2_a=float("nan") if antisymmetric else None,
            zero_mean=True,
        )
    n_hat = mean / length
    e1, e2 = _perp_frame(n_hat)
    frame = np.stack([e1, e2], axis=1)  # 3x2
    c2 = frame.T @ cov @ frame
    evals, evecs = np.linalg.eigh(c2)  # ascending; deterministic tie-break
    vmin = frame @ evecs[:, 0]
    vmax = frame @ evecs[:, 1]
    denom = moments.ref_length if moments.ref_length is not None else length
    xi2 = moments.n_atoms * evals[0] / denom**2
    fq = 4.0 * evals[1]
    return SqueezingResult(
        xi2=float(xi2),
        fq=float(fq),
        spin_length=length,
        min_direction=vmin,
        max_direction=vmax,
        xi2_a=float(2.0 * xi2) if antisymmetric else None,
    )


@dataclass(frozen=True)
class TimeOptimum:
    t_opt_xi: float
    xi2_min: float
    t_opt_fq: float
    fq_max: float
    xi_boundary: bool
    fq_boundary: bool


def _parabolic_refine(ts, ys, idx):
    """Vertex of the parabola through the three grid points around idx,
    clamped to the bracketing interval."""
    if idx == 0 or idx == len(ts) - 1:
        return ts[idx], ys[idx]
    t0, t1, t2 = ts[idx - 1], ts[idx], ts[idx + 1]
    y0, y1, y2 = ys[idx - 1], ys[idx], ys[idx + 1]
    if not (np.isfinite(y0) and np.isfinite(y1) and np.isfinite(y2)):
        return t1, y1  # no refinement next to an undefined neighbor
    denom = (t1 - t0) * (y1 - y2) - (t1 - t2) * (y1 - y0)
    if denom == 0.0:
        return t1, y1
    tv = t1 - 0.5 * ((t1 - t0) ** 2 * (y1 - y2) - (t1 - t2) ** 2 * (y1 - y0)) / denom
    tv = min(max(tv, t0), t2)
    coeffs = np.polyfit([t0, t1, t2], [y0, y1, y2], 2)
    return float(tv), float(np.polyval(coeffs, tv))


def optimize_over_time(times: np.ndarray, results: list[SqueezingResult]) -> TimeOptimum:
    """Grid optimum of xi^2 (min) and F_Q (max) with parabolic refinement."""
    if len(results) == 0:
        raise ValueError("empty trace")
    ts = np.asarray(times, dtype=float)
    xi = np.array([r.xi2 for r in results])
    fq = np.array([r.fq for r in results])
    finite = np.isfinite(xi)
    xi_idx = int(np.nanargmin(np.where(finite, xi, np.inf)))
    fq_idx = int(np.argmax(fq))
    t_xi, xi_min = _parabolic_refine(ts, xi, xi_idx)
    t_fq, neg_fq = _parabolic_refine(ts, -fq, fq_idx)
    return TimeOptimum(
        t_opt_xi=float(t_xi),
        xi2_min=float(xi_min),
        t_opt_fq=float(t_fq),
        fq_max=float(-neg_fq),
        xi_boundary=xi_idx in (0, len(ts) - 1),
        fq_boundary=fq_idx in (0, len(ts) - 1),
    )


@dataclass(frozen=True)
class DriveOptimum:
    omega_opt: float
    xi2_min: float
    fq_max: float
    boundary: bool
    degenerate: bool


def optimize_over_drive(per_omega: dict[float, tuple[float, float]]) -> DriveOptimum:
    """Select the drive strength minimizing xi^2; ties toward smaller Omega."""
    if not per_omega:
        raise ValueError("empty drive scan")
    omegas = sorted(per_omega)
    xis = np.array([per_omega[o][0] for o in omegas])
    best = int(np.argmin(xis))  # first minimum; ties resolve to smaller Omega
    degenerate = bool(np.all(xis == xis[best]) and len(omegas) > 1)
    return DriveOptimum(
        omega_opt=float(omegas[best]),
        xi2_min=float(xis[best]),
        fq_max=float(per_omega[omegas[best]][1]),
        boundary=best in (0, len(omegas) - 1),
        degenerate=degenerate,
    )
