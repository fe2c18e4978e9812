"""Generalized discrete truncated Wigner approximation for SU(3) spins.

Each site carries the 8 generator expectation values lambda_i^a.  Initial
conditions are sampled generator-by-generator from the discrete
eigenvalue distributions of the product state; trajectories evolve under
the mean-field equations of motion driven by the su(3) structure
constants; collective moments are estimated from the ensemble with
on-site second moments taken from the operator algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    DXY_INDEX,
    OperatorBasis,
    expand_in_basis,
    spin_quadrupolar_basis,
    structure_constants,
    transition_operator,
)
from .lattice import CouplingMatrices, ProductState

CASIMIR_TOL = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"  # "rk45" (adaptive embedded) or "rk4" (fixed step)
    dt: float = 0.01  # rk4 step
    rtol: float = 1e-9
    atol: float = 1e-9
    casimir_tolerance: float = CASIMIR_TOL

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError("method must be 'rk4' or 'rk45'")
        if self.dt <= 0 or self.rtol <= 0 or self.atol <= 0 or self.casimir_tolerance <= 0:
            raise ValueError("steps and tolerances must be positive")


def _pair_coupling_matrix(op_a: np.ndarray, op_b: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Expand op_a (x) op_b + op_b (x) op_a in the generator-pair basis."""
    g = basis.generators
    pair = np.kron(op_a, op_b) + np.kron(op_b, op_a)
    k = np.zeros((8, 8))
    for a in range(8):
        for b in range(8):
            k[a, b] = (np.trace(np.kron(g[a], g[b]).conj().T @ pair) / 4.0).real
    recon = np.einsum("ab,aij,bkl->ikjl", k, g, g).reshape(9, 9)
    if np.abs(recon - pair).max() > 1e-12:
        raise ValueError("pair expansion has one-body or identity residue")
    return k


def exchange_coupling_tensors(basis: OperatorBasis | None = None) -> tuple[np.ndarray, np.ndarray]:
    """8x8 generator-pair expansions K1, K2 of the two exchange terms."""
    if basis is None:
        basis = spin_quadrupolar_basis()
    k1 = _pair_coupling_matrix(transition_operator(2, 1), transition_operator(1, 2), basis)
    k2 = _pair_coupling_matrix(transition_operator(3, 2), transition_operator(2, 3), basis)
    return k1, k2


class MeanFieldRhs:
    """dlambda/dt for the exchange Hamiltonian plus the D_xy drive.

    The flow is d lambda_i^a/dt = sum_{c,b} f_{acb} h_i^c lambda_i^b with
    effective field h_i^c = Omega delta_{c,Dxy} + sum_{j!=i} sum_d
    [J1_ij K1 + J2_ij K2]_{cd} lambda_j^d.  The sign and index order are
    validated against exact single-site evolution in the test suite.
    """

    def __init__(self, couplings: CouplingMatrices, drive_omega: float = 0.0, basis=None):
        if basis is None:
            basis = spin_quadrupolar_basis()
        k1, k2 = exchange_coupling_tensors(basis)
        f = structure_constants(basis)
        self.n_sites = couplings.n_sites
        self.omega = float(drive_omega)
        # single contraction kernel: J2 = Jr * J1 elementwise by contract
        self.j_mat = np.ascontiguousarray(couplings.j1_ij)
        self.k_tot = k1 + couplings.jr * k2
        # per-field-component matrices M_c[a,b] = f_{a c b}
        self.f_field = np.ascontiguousarray(np.swapaxes(f, 0, 1))  # [c][a][b]

    def interaction_field(self, lam: np.ndarray) -> np.ndarray:
        """h_i^c from the neighbors, shape like lam (..., N, 8)."""
        u = lam @ self.k_tot.T  # (..., N, 8) with component c
        return np.matmul(self.j_mat, u)

    def field(self, lam: np.ndarray) -> np.ndarray:
        h = self.interaction_field(lam)
        if self.omega != 0.0:
            h[..., DXY_INDEX] += self.omega
        return h

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        h = self.field(lam)
        out = np.zeros_like(lam)
        for c in range(8):
            out += h[..., c, None] * (lam @ self.f_field[c].T)
        return out

    def classical_energy(self, lam: np.ndarray) -> np.ndarray:
        """Mean-field energy per trajectory (axes before the site axis)."""
        h_int = self.interaction_field(lam)
        e = 0.5 * np.einsum("...ia,...ia->...", lam, h_int)
        if self.omega != 0.0:
            e = e + self.omega * lam[..., DXY_INDEX].sum(axis=-1)
        return e


def sample_phase_points(
    state: ProductState,
    n_traj: int,
    seed: int,
    basis: OperatorBasis | None = None,
) -> np.ndarray:
    """Discrete phase-point ensemble, shape (n_traj, N, 8).

    Each generator is sampled independently: eigenvalue a_mu drawn with
    probability <psi|P_mu|psi>.  Trajectory k uses the counter-based
    stream Philox(seed).jumped(k), so ensembles are reproducible and
    embarrassingly parallel.
    """
    if basis is None:
        basis = spin_quadrupolar_basis()
    psi = state.site_amplitudes
    n_sites = state.n_sites
    eigvals = np.zeros((8, 3))
    cumprobs = np.zeros((8, 3))
    for a, g in enumerate(basis.generators):
        vals, vecs = np.linalg.eigh(g)
        probs = np.abs(vecs.conj().T @ psi) ** 2
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError("sampling probabilities do not sum to 1")
        eigvals[a] = vals
        cumprobs[a] = np.cumsum(probs)
    cumprobs[:, -1] = 1.0
    out = np.empty((n_traj, n_sites, 8))
    root = np.random.Philox(key=seed)
    for k in range(n_traj):
        rng = np.random.Generator(root.jumped(k))
        u = rng.random((n_sites, 8))
        for a in range(8):
            idx = np.searchsorted(cumprobs[a], u[:, a], side="right")
            out[k, :, a] = eigvals[a, np.minimum(idx, 2)]
    return out


def exact_phase_point(state: ProductState, basis: OperatorBasis | None = None) -> np.ndarray:
    """Single 'trajectory' at the exact quantum expectations (N=1 checks)."""
    if basis is None:
        basis = spin_quadrupolar_basis()
    psi = state.site_amplitudes
    lam = np.array([np.vdot(psi, g @ psi).real for g in basis.generators])
    return np.tile(lam, (1, state.n_sites, 1))


_RK45_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_RK45_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_RK45_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_RK45_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _rk4_span(rhs, y, t0, t1, dt):
    n = max(1, int(np.ceil((t1 - t0) / dt)))
    h = (t1 - t0) / n
    for _ in range(n):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _rk45_span(rhs, y, t0, t1, rtol, atol, h_init):
    """Dormand-Prince 5(4) with PI step control over one save interval."""
    t = t0
    h = min(h_init, t1 - t0)
    err_prev = 1.0
    k_first = None
    while t < t1 - 1e-14:
        h = min(h, t1 - t)
        ks = [rhs(y) if k_first is None else k_first]
        for s in range(1, 7):
            ys = y + h * sum(a * k for a, k in zip(_RK45_A[s], ks))
            ks.append(rhs(ys))
        y5 = y + h * sum(b * k for b, k in zip(_RK45_B5, ks) if b != 0.0)
        y4 = y + h * sum(b * k for b, k in zip(_RK45_B4, ks) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean(((y5 - y4) / scale) ** 2))
        if err <= 1.0:
            t += h
            y = y5
            k_first = ks[6]  # FSAL: last stage sits at (t+h, y5)
            err_prev = max(err, 1e-10)
        else:
            k_first = ks[0]
        fac = 0.9 * err ** -0.2 * err_prev**0.04 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, fac))
        if h < 1e-12 * max(1.0, abs(t1)):
            raise RuntimeError("step-size underflow in rk45")
    return y, h


@dataclass
class TrajectoryStats:
    """Per-trajectory collective statistics on the save grid.

    means[t, k, m] is trajectory k's collective sum of observable m;
    pair_moments[t, k, p] the symmetrized two-operator moment for the
    pair index p in row-major upper-triangular order.
    """

    times: np.ndarray
    n_traj: int
    n_sites: int
    means: np.ndarray  # (n_times, n_traj, n_ops)
    pair_moments: np.ndarray  # (n_times, n_traj, n_ops*(n_ops+1)/2)
    casimir_drift: float
    energy_drift: float
    degraded: bool


def _observable_coeffs(ops, basis):
    n_ops = len(ops)
    c0 = np.zeros(n_ops)
    cs = np.zeros((n_ops, 8))
    for m, op in enumerate(ops):
        c0[m], cs[m] = expand_in_basis(op, basis)
    pairs = [(i, j) for i in range(n_ops) for j in range(i, n_ops)]
    w0 = np.zeros(len(pairs))
    ws = np.zeros((len(pairs), 8))
    for p, (i, j) in enumerate(pairs):
        sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
        w0[p], ws[p] = expand_in_basis(sym, basis)
    return c0, cs, pairs, w0, ws


def run_trajectories(
    initial: np.ndarray,
    rhs: MeanFieldRhs,
    times: np.ndarray,
    observables,
    config: IntegratorConfig | None = None,
    basis: OperatorBasis | None = None,
) -> TrajectoryStats:
    """Integrate the ensemble and accumulate collective statistics.

    ``observables`` is a list of Hermitian 3x3 single-site operators;
    collective first moments and symmetrized second moments of their
    site sums are recorded at every save time.  On-site second moments
    use the operator-product expansion, cross terms the classical
    trajectory products.
    """
    if config is None:
        config = IntegratorConfig()
    if basis is None:
        basis = spin_quadrupolar_basis()
    if initial.ndim != 3 or initial.shape[0] < 1:
        raise ValueError("need a (n_traj, N, 8) ensemble with n_traj >= 1")
    times = np.asarray(times, dtype=float)
    n_traj, n_sites, _ = initial.shape
    c0, cs, pairs, w0, ws = _observable_coeffs(observables, basis)
    n_ops = len(observables)

    means = np.zeros((len(times), n_traj, n_ops))
    pair_moments = np.zeros((len(times), n_traj, len(pairs)))

    y = initial.copy()
    casimir0 = (initial**2).sum(axis=-1)
    energy0 = rhs.classical_energy(initial)
    energy_scale = max(1.0, np.abs(energy0).max())
    casimir_drift = 0.0
    energy_drift = 0.0
    h_adaptive = config.dt

    prev_t = times[0]
    for it, t in enumerate(times):
        if t > prev_t:
            if config.method == "rk4":
                y = _rk4_span(rhs, y, prev_t, t, config.dt)
            else:
                y, h_adaptive = _rk45_span(
                    rhs, y, prev_t, t, config.rtol, config.atol, h_adaptive
                )
            prev_t = t
        site_vals = y @ cs.T + c0  # (n_traj, N, n_ops)
        coll = site_vals.sum(axis=1)  # (n_traj, n_ops)
        means[it] = coll
        onsite_w = (y @ ws.T + w0).sum(axis=1)  # (n_traj, n_pairs)
        for p, (i, j) in enumerate(pairs):
            cross = coll[:, i] * coll[:, j] - (site_vals[:, :, i] * site_vals[:, :, j]).sum(axis=1)
            pair_moments[it, :, p] = cross + onsite_w[:, p]
        casimir_drift = max(casimir_drift, np.abs((y**2).sum(axis=-1) - casimir0).max())
        energy_drift = max(
            energy_drift, np.abs(rhs.classical_energy(y) - energy0).max() / energy_scale
        )

    degraded = casimir_drift > config.casimir_tolerance
    return TrajectoryStats(
        times=times,
        n_traj=n_traj,
        n_sites=n_sites,
        means=means,
        pair_moments=pair_moments,
        casimir_drift=float(casimir_drift),
        energy_drift=float(energy_drift),
        degraded=degraded,
    )


def ensemble_moments(stats: TrajectoryStats, traj_idx: np.ndarray | None = None):
    """Ensemble means and symmetrized covariances, shape ((n_t, k), (n_t, k, k)).

    ``traj_idx`` selects/reweights trajectories (bootstrap resampling).
    """
    if stats.n_traj < 1:
        raise ValueError("empty ensemble")
    if traj_idx is None:
        m = stats.means.mean(axis=1)
        p = stats.pair_moments.mean(axis=1)
    else:
        m = stats.means[:, traj_idx].mean(axis=1)
        p = stats.pair_moments[:, traj_idx].mean(axis=1)
    n_ops = stats.means.shape[2]
    cov = np.zeros((len(stats.times), n_ops, n_ops))
    pidx = 0
    for i in range(n_ops):
        for j in range(i, n_ops):
            cov[:, i, j] = p[:, pidx] - m[:, i] * m[:, j]
            cov[:, j, i] = cov[:, i, j]
            pidx += 1
    return m, cov
