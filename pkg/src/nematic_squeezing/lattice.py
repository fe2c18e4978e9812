"""Geometries, dipolar coupling matrices, and initial product states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import bright_state, dark_state, ket, manifold_triple

STATE_KINDS = ("Bx", "Dx", "SAx", "SBx", "DxyAligned", "Custom")


@dataclass(frozen=True)
class Geometry:
    """Site positions in units of the lattice spacing d."""

    dimension: int
    positions: np.ndarray  # (N, 3)
    spacing: float = 1.0
    quantization_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        self.positions.setflags(write=False)
        axis = np.asarray(self.quantization_axis, dtype=float)
        if not np.isclose(np.linalg.norm(axis), 1.0):
            raise ValueError("quantization_axis must be a unit vector")
        d = self.positions[:, None, :] - self.positions[None, :, :]
        r = np.linalg.norm(d, axis=-1)
        if self.n_sites > 1 and r[~np.eye(self.n_sites, dtype=bool)].min() <= 0:
            raise ValueError("positions must be distinct")

    @property
    def n_sites(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class CouplingSpec:
    """Interaction strengths: J1 sets the unit, Jr = J2/J1."""

    j1: float = 1.0
    jr: float = 1.0
    alpha: int = 3  # power-law exponent, 0 (all-to-all) or 3 (dipolar)
    angular_factor: bool = True  # apply 1 - 3 cos^2(theta_ij)

    def __post_init__(self):
        if self.j1 == 0:
            raise ValueError("J1 must be nonzero")
        if self.alpha not in (0, 3):
            raise ValueError("alpha must be 0 or 3")
        if not np.isfinite(self.jr):
            raise ValueError("Jr must be finite")


@dataclass(frozen=True)
class CouplingMatrices:
    """Symmetric site-pair couplings with zero diagonal; J2 = Jr * J1."""

    j1_ij: np.ndarray
    j2_ij: np.ndarray
    jr: float

    def __post_init__(self):
        self.j1_ij.setflags(write=False)
        self.j2_ij.setflags(write=False)

    @property
    def n_sites(self) -> int:
        return self.j1_ij.shape[0]


@dataclass(frozen=True)
class HamiltonianSpec:
    couplings: CouplingMatrices
    drive_omega: float = 0.0  # coefficient of the collective D_xy drive
    omega_1: float = 0.0  # legacy 1<->2 drive, kept for completeness
    omega_2: float = 0.0  # legacy 2<->3 drive

    def __post_init__(self):
        for v in (self.drive_omega, self.omega_1, self.omega_2):
            if not np.isfinite(v):
                raise ValueError("drive strengths must be finite")


@dataclass(frozen=True)
class ProductState:
    """Uniform product state: the same unit-norm 3-vector on every site."""

    site_amplitudes: np.ndarray
    n_sites: int
    kind: str = "Custom"

    def __post_init__(self):
        self.site_amplitudes.setflags(write=False)
        if not np.isclose(np.linalg.norm(self.site_amplitudes), 1.0, atol=1e-12):
            raise ValueError("site amplitudes must be unit norm")


def build_geometry(
    dimension: int,
    extents: int | tuple[int, int],
    spacing: float = 1.0,
    quantization_axis: tuple[float, float, float] = (0.0, 0.0, 1.0),
) -> Geometry:
    """Chain (1D) or Lx x Ly square lattice (2D) with open boundaries.

    The array lies in the xy-plane; the default quantization axis is
    perpendicular to it, so the dipolar angular factor is identically 1.
    """
    if dimension == 1:
        n = int(extents if np.isscalar(extents) else extents[0])
        if n < 1:
            raise ValueError("need at least one site")
        pos = np.zeros((n, 3))
        pos[:, 0] = np.arange(n) * spacing
    elif dimension == 2:
        lx, ly = (extents, extents) if np.isscalar(extents) else extents
        lx, ly = int(lx), int(ly)
        if lx < 1 or ly < 1:
            raise ValueError("need at least one site")
        xs, ys = np.meshgrid(np.arange(lx), np.arange(ly), indexing="ij")
        pos = np.zeros((lx * ly, 3))
        pos[:, 0] = xs.ravel() * spacing
        pos[:, 1] = ys.ravel() * spacing
    else:
        raise ValueError("dimension must be 1 or 2")
    axis = np.asarray(quantization_axis, dtype=float)
    axis = tuple(axis / np.linalg.norm(axis))
    return Geometry(dimension=dimension, positions=pos, spacing=spacing, quantization_axis=axis)


def coupling_matrix(geometry: Geometry, spec: CouplingSpec) -> CouplingMatrices:
    """J^m_ij from geometry: J_m [1 - 3 cos^2(theta_ij)] / r_ij^3 for
    alpha=3, or uniform J_m for alpha=0 (geometry-free, no Kac factor)."""
    n = geometry.n_sites
    off = ~np.eye(n, dtype=bool)
    if spec.alpha == 0:
        j1 = np.where(off, spec.j1, 0.0)
    else:
        d = geometry.positions[:, None, :] - geometry.positions[None, :, :]
        r = np.linalg.norm(d, axis=-1)
        r_safe = np.where(off, r, 1.0)
        j1 = np.where(off, spec.j1 / r_safe**3, 0.0)
        if spec.angular_factor:
            axis = np.asarray(geometry.quantization_axis)
            cos = np.einsum("ijk,k->ij", d, axis) / r_safe
            j1 = j1 * np.where(off, 1.0 - 3.0 * cos**2, 0.0)
    return CouplingMatrices(j1_ij=j1, j2_ij=spec.jr * j1, jr=spec.jr)


def _manifold_x_plus_state(label: str) -> np.ndarray:
    """Highest-eigenvalue eigenvector of the manifold x generator, with
    the |1> component made real positive."""
    triple = manifold_triple(label)
    evals, evecs = np.linalg.eigh(triple.x)
    v = evecs[:, np.argmax(evals)]
    # deterministic global phase: largest-magnitude component real positive
    pivot = v[np.argmax(np.abs(v))]
    v = v * (pivot.conj() / abs(pivot))
    return v


def initial_state(kind: str, n_sites: int, amplitudes=None) -> ProductState:
    """Named initial product states used in the quench protocols."""
    s2 = np.sqrt(2.0)
    if kind == "Bx":
        amps = (bright_state() + ket(2)) / s2
    elif kind == "Dx":
        amps = (dark_state() + ket(2)) / s2
    elif kind == "DxyAligned":
        amps = bright_state()
    elif kind == "SAx":
        amps = _manifold_x_plus_state("A")
    elif kind == "SBx":
        amps = _manifold_x_plus_state("B")
    elif kind == "Custom":
        if amplitudes is None:
            raise ValueError("Custom state needs explicit amplitudes")
        amps = np.asarray(amplitudes, dtype=complex)
        amps = amps / np.linalg.norm(amps)
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    return ProductState(site_amplitudes=amps, n_sites=n_sites, kind=kind)
