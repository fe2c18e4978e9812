import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nematic_squeezing.algebra import (
    ATOL,
    GENERATOR_LABELS,
    MANIFOLD_LABELS,
    ManifoldTriple,
    OperatorBasis,
    basis_reference_text,
    bright_state,
    dark_state,
    expand_in_basis,
    hamiltonian_form_residual,
    ket,
    manifold_triple,
    pair_hamiltonian_bright_dark,
    pair_hamiltonian_countertwisting,
    pair_hamiltonian_lambda,
    spin_matrices,
    spin_quadrupolar_basis,
    structure_constants,
    transition_operator,
)

BASIS = spin_quadrupolar_basis()


# ---------------------------------------------------------------------------
# transition operators


def test_transition_maps_levels():
    assert np.allclose(transition_operator(1, 2) @ ket(2), ket(1))


def test_transition_completeness():
    total = sum(transition_operator(a, a) for a in (1, 2, 3))
    assert np.allclose(total, np.eye(3))


def test_transition_adjoint():
    assert np.allclose(transition_operator(1, 2).conj().T, transition_operator(2, 1))


@pytest.mark.parametrize("bad", [0, 4, -1])
def test_transition_out_of_range(bad):
    with pytest.raises(ValueError):
        transition_operator(bad, 1)


# ---------------------------------------------------------------------------
# generator basis


def test_generators_hermitian_traceless_orthogonal():
    gs = BASIS.generators
    for a in range(8):
        assert np.abs(gs[a] - gs[a].conj().T).max() < ATOL
        assert abs(np.trace(gs[a])) < ATOL
        for b in range(8):
            hs = np.trace(gs[a].conj().T @ gs[b]).real
            assert abs(hs - (2.0 if a == b else 0.0)) < ATOL


def test_dxy_is_13_exchange():
    dxy = BASIS.generator("D_xy")
    expect = transition_operator(1, 3) + transition_operator(3, 1)
    assert np.abs(dxy - expect).max() < ATOL


def test_spin_commutator():
    sx, sy, sz = spin_matrices()
    assert np.abs(sx @ sy - sy @ sx - 1j * sz).max() < ATOL


def test_quadrupole_trace_orthogonality():
    q1 = BASIS.generator("Q_xz")
    q2 = BASIS.generator("Q_yz")
    assert abs(np.trace(q1 @ q2)) < ATOL


def test_basis_reference_text_lists_all_matrices():
    text = basis_reference_text()
    for lab in ("I",) + GENERATOR_LABELS:
        assert lab in text


# ---------------------------------------------------------------------------
# structure constants


def test_f_sx_sy_sz_is_one():
    f = structure_constants(BASIS)
    ix, iy, iz = (GENERATOR_LABELS.index(l) for l in ("S_x", "S_y", "S_z"))
    assert abs(f[ix, iy, iz] - 1.0) < ATOL


def test_f_antisymmetric():
    f = structure_constants(BASIS)
    assert np.abs(f + np.swapaxes(f, 0, 1)).max() < ATOL
    assert np.abs(f + np.swapaxes(f, 1, 2)).max() < ATOL


def test_f_reexpansion_identity():
    f = structure_constants(BASIS)
    gs = BASIS.generators
    for a in range(8):
        for b in range(8):
            comm = gs[a] @ gs[b] - gs[b] @ gs[a]
            recon = 1j * np.einsum("c,cij->ij", f[a, b], gs)
            assert np.abs(comm - recon).max() < ATOL


def test_f_matches_independent_construction():
    # rebuild the generators from ladder operators only, recompute f, compare
    sp = np.sqrt(2.0) * (transition_operator(1, 2) + transition_operator(2, 3))
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / (2j)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    quads = [
        sx @ sz + sz @ sx,
        sy @ sz + sz @ sy,
        sx @ sy + sy @ sx,
        sx @ sx - sy @ sy,
        (sx @ sx + sy @ sy - 2 * sz @ sz) / np.sqrt(3.0),
    ]
    gens = np.array([sx, sy, sz] + quads)
    # fix signs/normalization to match the packaged basis before comparing
    alt = OperatorBasis(identity=np.eye(3, dtype=complex), generators=gens)
    f_ref = structure_constants(BASIS)
    # map packaged generators onto the rebuilt set via HS projection
    for a, g in enumerate(BASIS.generators):
        overlaps = [abs(np.trace(g.conj().T @ h)) / 2 for h in gens]
        assert max(overlaps) > 1 - 1e-12  # one-to-one up to sign
    f_alt = structure_constants(alt)
    assert np.abs(np.abs(f_alt) - np.abs(f_ref)).max() < 1e-10


def test_f_rejects_non_orthogonal_basis():
    gens = BASIS.generators.copy()
    gens[1] = gens[0]
    bad = OperatorBasis(identity=np.eye(3, dtype=complex), generators=gens)
    with pytest.raises(ValueError):
        structure_constants(bad)


# ---------------------------------------------------------------------------
# manifold triples


@pytest.mark.parametrize("label", MANIFOLD_LABELS)
def test_triple_cyclic_closure(label):
    t = manifold_triple(label)
    p = t.active_subspace
    for a, b, c in ((t.x, t.y, t.z), (t.y, t.z, t.x), (t.z, t.x, t.y)):
        res = p @ ((a @ b - b @ a) - 1j * c) @ p
        assert np.abs(res).max() < ATOL


@pytest.mark.parametrize("label", ("Bright", "Dark"))
def test_projector_commutes_with_triple(label):
    # for the spin-1/2 manifolds the full triple acts inside the two-level
    # active subspace; for A/B the x = 0 eigenvector is part of the spin-1
    # representation, so only x itself commutes with the projector
    t = manifold_triple(label)
    p = t.active_subspace
    for m in (t.x, t.y, t.z):
        assert np.abs(p @ m - m @ p).max() < 1e-10


@pytest.mark.parametrize("label", ("A", "B"))
def test_projector_commutes_with_x(label):
    t = manifold_triple(label)
    p = t.active_subspace
    assert np.abs(p @ t.x - t.x @ p).max() < 1e-10


def test_bright_x_restriction():
    t = manifold_triple("Bright")
    b = bright_state()
    expect = 0.5 * (np.outer(b, ket(2).conj()) + np.outer(ket(2), b.conj()))
    p = t.active_subspace
    assert np.abs(p @ t.x @ p - expect).max() < ATOL


def test_bright_z_eigenvalues():
    t = manifold_triple("Bright")
    evals = np.linalg.eigvalsh(t.z)
    active = sorted(v for v in evals if abs(v) > 1e-10)
    assert np.allclose(active, [-0.5, 0.5], atol=1e-12)


def test_bright_annihilates_dark_state():
    t = manifold_triple("Bright")
    d = dark_state()
    assert np.abs(t.x @ d).max() < ATOL
    assert np.abs(t.y @ d).max() < ATOL


def test_dark_annihilates_bright_state():
    t = manifold_triple("Dark")
    b = bright_state()
    assert np.abs(t.x @ b).max() < ATOL
    assert np.abs(t.y @ b).max() < ATOL


def test_a_triple_printed_closure_is_2iz():
    # the printed combination closes onto twice the printed z; the module
    # absorbs that factor into z (z_scale = 2)
    t = manifold_triple("A")
    g = spin_quadrupolar_basis()
    x = (g.generator("S_x") - g.generator("S_y") + g.generator("Q_xz") - g.generator("Q_yz")) / 2
    y = (g.generator("S_x") - g.generator("S_y") - (g.generator("Q_xz") - g.generator("Q_yz"))) / 2
    z_printed = g.generator("D_xy") / 2
    comm = x @ y - y @ x
    assert np.abs(comm - 2j * z_printed).max() < ATOL
    assert abs(t.z_scale - 2.0) < 1e-12


def test_bright_dark_z_scale():
    assert abs(manifold_triple("Bright").z_scale - 0.5) < 1e-12
    assert abs(manifold_triple("Dark").z_scale + 0.5) < 1e-12


def test_manifold_unknown_label():
    with pytest.raises(ValueError):
        manifold_triple("Chartreuse")


@pytest.mark.parametrize("label", MANIFOLD_LABELS)
def test_triples_immutable(label):
    t = manifold_triple(label)
    with pytest.raises(ValueError):
        t.x[0, 0] = 5.0


# ---------------------------------------------------------------------------
# basis expansion


def test_expand_identity():
    c0, cs = expand_in_basis(np.eye(3, dtype=complex))
    assert abs(c0 - 1.0) < ATOL and np.abs(cs).max() < ATOL


def test_expand_basis_member():
    c0, cs = expand_in_basis(BASIS.generator("S_x"))
    expect = np.zeros(8)
    expect[GENERATOR_LABELS.index("S_x")] = 1.0
    assert abs(c0) < ATOL and np.abs(cs - expect).max() < ATOL


def test_expand_sx_squared():
    sx, _, _ = spin_matrices()
    c0, cs = expand_in_basis(sx @ sx)
    assert c0 > 0
    for a, lab in enumerate(GENERATOR_LABELS):
        if lab in ("S_x", "S_y", "S_z"):
            assert abs(cs[a]) < ATOL  # purely quadrupolar content


def test_expand_rejects_non_hermitian():
    with pytest.raises(ValueError):
        expand_in_basis(transition_operator(1, 2))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_expand_roundtrip_random_hermitian(vals):
    a = np.array(vals).reshape(3, 3)
    m = (a + a.T) / 2 + 1j * (a - a.T) / 2
    c0, cs = expand_in_basis(m.astype(complex))
    recon = c0 * np.eye(3) + np.einsum("a,aij->ij", cs, BASIS.generators)
    assert np.abs(recon - m).max() < 1e-10


# ---------------------------------------------------------------------------
# two-site Hamiltonian forms


def test_lambda_vs_bright_dark_at_unit_ratio():
    a = pair_hamiltonian_lambda(jr=1.0)
    b = pair_hamiltonian_bright_dark()
    assert hamiltonian_form_residual(a, b) < ATOL


@pytest.mark.parametrize("j1", [1.0, -0.7, 2.31])
def test_lambda_vs_bright_dark_linearity(j1):
    a = pair_hamiltonian_lambda(jr=1.0, j1=j1)
    b = pair_hamiltonian_bright_dark(j=j1)
    assert hamiltonian_form_residual(a, b) < 10 * ATOL * max(1, abs(j1))


def test_lambda_vs_countertwisting_resolved_reading():
    a = pair_hamiltonian_lambda(jr=-1.0)
    b = pair_hamiltonian_countertwisting()
    assert hamiltonian_form_residual(a, b) < ATOL
    # the resolved reading needs no one-body correction either
    assert hamiltonian_form_residual(a, b, remove_one_body=True) < ATOL


def test_residual_zero_for_identical_forms():
    a = pair_hamiltonian_lambda(jr=0.5)
    assert hamiltonian_form_residual(a, a.copy()) == 0.0


def test_residual_one_body_projection():
    a = pair_hamiltonian_lambda(jr=1.0)
    onebody = np.kron(BASIS.generator("S_z"), np.eye(3))
    assert hamiltonian_form_residual(a, a + 0.37 * onebody, remove_one_body=True) < 1e-10
