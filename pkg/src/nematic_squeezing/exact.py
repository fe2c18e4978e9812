"""Exact quantum evolution.

Two representations: the permutation-symmetric bosonic subspace
|n1, n2, n3> for all-to-all couplings (dimension (N+1)(N+2)/2, scales to
N ~ 1000), and the full 3^N space for arbitrary couplings (small N,
serves as the benchmark oracle).  Time evolution is Lanczos/Krylov with
adaptive substepping.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

import numpy as np
import scipy.sparse as sp

from .lattice import CouplingMatrices, ProductState

FULL_SPACE_CAP = 12
NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class SymmetricBasis:
    """Occupation triples (n1, n2, n3) with n1+n2+n3 = N, lexicographic."""

    n_atoms: int
    states: np.ndarray  # (dim, 3) int

    def __post_init__(self):
        self.states.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def index(self, n1: int, n2: int, n3: int) -> int:
        # lexicographic: offset of n1 block plus n2 within it
        n = self.n_atoms
        off = n1 * (n + 1) - n1 * (n1 - 1) // 2
        return off + n2


def symmetric_basis(n_atoms: int) -> SymmetricBasis:
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    states = [
        (n1, n2, n_atoms - n1 - n2)
        for n1 in range(n_atoms + 1)
        for n2 in range(n_atoms - n1 + 1)
    ]
    return SymmetricBasis(n_atoms=n_atoms, states=np.array(states, dtype=np.int64))


def bosonic_bilinear(basis: SymmetricBasis, alpha: int, beta: int) -> sp.csr_matrix:
    """T^{alpha beta} = a^dag_alpha a_beta on the occupation basis."""
    states = basis.states
    a, b = alpha - 1, beta - 1
    if a == b:
        return sp.diags(states[:, a].astype(float)).tocsr()
    src = np.nonzero(states[:, b] > 0)[0]
    ns = states[src].copy()
    amp = np.sqrt(ns[:, b] * (ns[:, a] + 1.0))
    ns[:, b] -= 1
    ns[:, a] += 1
    dst = np.array([basis.index(*s) for s in ns])
    return sp.csr_matrix((amp, (dst, src)), shape=(basis.dim, basis.dim))


def collective_hamiltonian(
    n_atoms: int, jr: float, drive_omega: float = 0.0, j1: float = 1.0
) -> sp.csr_matrix:
    """All-to-all Hamiltonian in the symmetric subspace.

    H = J1 (T21 T12 - N2) + J1 Jr (T32 T23 - N3) + Omega (T13 + T31);
    the number-operator subtractions implement the i != j restriction.
    """
    if not np.isfinite(jr):
        raise ValueError("Jr must be finite")
    basis = symmetric_basis(n_atoms)
    t12 = bosonic_bilinear(basis, 1, 2)
    t21 = bosonic_bilinear(basis, 2, 1)
    t23 = bosonic_bilinear(basis, 2, 3)
    t32 = bosonic_bilinear(basis, 3, 2)
    n2 = bosonic_bilinear(basis, 2, 2)
    n3 = bosonic_bilinear(basis, 3, 3)
    h = j1 * (t21 @ t12 - n2) + j1 * jr * (t32 @ t23 - n3)
    if drive_omega != 0.0:
        t13 = bosonic_bilinear(basis, 1, 3)
        h = h + drive_omega * (t13 + t13.T)
    return h.tocsr()


def symmetric_state(state: ProductState, basis: SymmetricBasis) -> np.ndarray:
    """Product state (c1,c2,c3)^(x)N expressed in the occupation basis."""
    c = state.site_amplitudes
    n = basis.n_atoms
    amps = np.zeros(basis.dim, dtype=complex)
    logs = np.log(np.where(np.abs(c) > 0, c, 1.0).astype(complex))
    for k, (n1, n2, n3) in enumerate(basis.states):
        if any(np.abs(c[i]) == 0 and (n1, n2, n3)[i] > 0 for i in range(3)):
            continue
        logw = 0.5 * (
            lgamma(n + 1) - lgamma(n1 + 1) - lgamma(n2 + 1) - lgamma(n3 + 1)
        )
        amps[k] = np.exp(logw + n1 * logs[0] + n2 * logs[1] + n3 * logs[2])
    amps /= np.linalg.norm(amps)
    return amps


# ---------------------------------------------------------------------------
# full 3^N representation


def embed_site_operator(op: np.ndarray, site: int, n_sites: int) -> sp.csr_matrix:
    """o_i acting on site ``site`` of the 3^N tensor-product space."""
    left = sp.identity(3**site, format="csr", dtype=complex)
    right = sp.identity(3 ** (n_sites - site - 1), format="csr", dtype=complex)
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def full_hamiltonian(
    couplings: CouplingMatrices, drive_omega: float = 0.0, cap: int = FULL_SPACE_CAP
) -> sp.csr_matrix:
    """Sum_{i!=j} [J1_ij L21_i L12_j + J2_ij L32_i L23_j] + Omega sum_i D_xy,i."""
    from .algebra import spin_quadrupolar_basis, transition_operator

    n = couplings.n_sites
    if n > cap:
        raise ValueError(f"full-space solver capped at N={cap} (requested N={n})")
    dim = 3**n
    l12 = transition_operator(1, 2)
    l21 = transition_operator(2, 1)
    l23 = transition_operator(2, 3)
    l32 = transition_operator(3, 2)
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if couplings.j1_ij[i, j] != 0.0:
                h = h + couplings.j1_ij[i, j] * (
                    embed_site_operator(l21, i, n) @ embed_site_operator(l12, j, n)
                )
            if couplings.j2_ij[i, j] != 0.0:
                h = h + couplings.j2_ij[i, j] * (
                    embed_site_operator(l32, i, n) @ embed_site_operator(l23, j, n)
                )
    if drive_omega != 0.0:
        dxy = spin_quadrupolar_basis().generator("D_xy")
        for i in range(n):
            h = h + drive_omega * embed_site_operator(dxy, i, n)
    return h.tocsr()


def full_state(state: ProductState) -> np.ndarray:
    v = np.array([1.0 + 0j])
    for _ in range(state.n_sites):
        v = np.kron(v, state.site_amplitudes)
    return v


def collective_operator(single_site: np.ndarray, basis) -> sp.csr_matrix:
    """Collective sum sum_i o_i in either representation.

    ``basis`` is a SymmetricBasis, or an int (site count) for the full
    3^N representation.
    """
    m = np.asarray(single_site, dtype=complex)
    if np.abs(m - m.conj().T).max() > 1e-12:
        raise ValueError("single-site operator must be Hermitian")
    if isinstance(basis, SymmetricBasis):
        op = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for a in range(1, 4):
            for b in range(1, 4):
                if m[a - 1, b - 1] != 0.0:
                    op = op + m[a - 1, b - 1] * bosonic_bilinear(basis, a, b)
        return op.tocsr()
    n = int(basis)
    dim = 3**n
    op = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        op = op + embed_site_operator(m, i, n)
    return op.tocsr()


# ---------------------------------------------------------------------------
# Krylov propagation


class KrylovBreakdown(RuntimeError):
    """Lanczos failed to converge; retry with a smaller step."""


def _lanczos_step(h, v, dt, m, tol):
    """One exp(-i h dt) v via an m-dimensional Lanczos subspace.

    Returns (w, err_est).  Full reorthogonalization; the error estimate
    is the standard |beta_m * [expm(-i dt T)]_{m,1}| term.
    """
    n = v.shape[0]
    m = min(m, n)
    V = np.zeros((m, n), dtype=complex)
    alphas = np.zeros(m)
    betas = np.zeros(m)
    nv = np.linalg.norm(v)
    V[0] = v / nv
    ku = m
    happy = False
    for k in range(m):
        hv = h @ V[k]
        alphas[k] = np.vdot(V[k], hv).real
        hv = hv - alphas[k] * V[k]
        if k > 0:
            hv = hv - betas[k - 1] * V[k - 1]
        # full reorthogonalization
        hv = hv - V[: k + 1].T @ (V[: k + 1].conj() @ hv)
        beta = np.linalg.norm(hv)
        betas[k] = beta
        if k == m - 1:
            break
        if beta < 1e-12:  # happy breakdown: exact invariant subspace
            ku = k + 1
            happy = True
            break
        V[k + 1] = hv / beta
    T = np.diag(alphas[:ku]) + np.diag(betas[: ku - 1], 1) + np.diag(betas[: ku - 1], -1)
    evals, evecs = np.linalg.eigh(T)
    small = evecs @ (np.exp(-1j * dt * evals) * evecs.conj().T[:, 0])
    w = nv * (V[:ku].T @ small)
    err = 0.0 if happy else abs(nv * betas[ku - 1] * small[-1]) * abs(dt)
    return w, err


def krylov_expm_multiply(
    h, v: np.ndarray, dt: float, subspace_dim: int = 30, step_tol: float = 1e-10
) -> np.ndarray:
    """exp(-i h dt) v with adaptive substepping."""
    w, _ = _expm_multiply_hint(h, v, dt, subspace_dim, step_tol, 1)
    return w


def _expm_multiply_hint(h, v, dt, subspace_dim, step_tol, nsub_hint):
    """Like krylov_expm_multiply but seeded with (and returning) the
    substep count, so a caller stepping a uniform grid avoids re-probing
    coarse substepping that already failed on the previous interval."""
    if dt == 0.0:
        return v.copy(), nsub_hint
    nsub = max(1, nsub_hint)
    for _ in range(60):
        sub = dt / nsub
        w = v
        ok = True
        for _ in range(nsub):
            w, err = _lanczos_step(h, w, sub, subspace_dim, step_tol)
            if err > step_tol:
                ok = False
                break
        if ok:
            return w, nsub
        nsub *= 2
    raise KrylovBreakdown(
        "Krylov propagation failed to converge; refine the time grid or "
        "increase the subspace dimension"
    )


def evolve(
    h,
    psi0: np.ndarray,
    times: np.ndarray,
    subspace_dim: int = 30,
    step_tol: float = 1e-10,
    callback=None,
):
    """psi(t) = exp(-i H t) psi0 on a sorted time grid starting at 0.

    Returns the list of states unless ``callback(idx, t, psi)`` is given,
    in which case states are handed to the callback and not stored.
    """
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending from 0")
    psi = psi0.astype(complex)
    norm0 = np.linalg.norm(psi)
    out = [] if callback is None else None
    prev_t = 0.0
    nsub = 1
    prev_span = None
    for idx, t in enumerate(times):
        if t > prev_t:
            span = t - prev_t
            if prev_span is not None and prev_span > 0:
                # rescale the substep hint to the new interval; back off one
                # doubling so genuinely easier intervals can relax
                nsub = max(1, int(nsub * span / prev_span / 2))
            psi, nsub = _expm_multiply_hint(h, psi, span, subspace_dim, step_tol, nsub)
            prev_span = span
            prev_t = t
        drift = abs(np.linalg.norm(psi) - norm0)
        if drift > NORM_DRIFT_TOL:
            raise KrylovBreakdown(f"norm drift {drift:.2e} exceeds tolerance")
        if callback is None:
            out.append(psi.copy())
        else:
            callback(idx, t, psi)
    return out
