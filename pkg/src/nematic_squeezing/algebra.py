"""SU(3) operator algebra for a three-level (spin-1) site.

Builds the spin-quadrupolar generator basis {S_x, S_y, S_z, Q_xz, Q_yz,
Q_xy, D_xy, Y}, its structure constants, and the four SU(2) manifold
triples (bright, dark, A, B) used by the dynamics engines and the
metrology layer.

Conventions: ordered site basis {|1>, |2>, |3>} = {m=+1, m=0, m=-1},
hbar = 1, all generators normalized to tr(G^2) = 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

ATOL = 1e-12

GENERATOR_LABELS = ("S_x", "S_y", "S_z", "Q_xz", "Q_yz", "Q_xy", "D_xy", "Y")
DXY_INDEX = GENERATOR_LABELS.index("D_xy")

MANIFOLD_LABELS = ("Bright", "Dark", "A", "B")


def ket(level: int) -> np.ndarray:
    """Basis vector |level> for level in {1, 2, 3}."""
    if level not in (1, 2, 3):
        raise ValueError(f"level index must be 1..3, got {level}")
    v = np.zeros(3, dtype=complex)
    v[level - 1] = 1.0
    return v


def transition_operator(alpha: int, beta: int) -> np.ndarray:
    """|alpha><beta| in the ordered basis {|1>,|2>,|3>}."""
    return np.outer(ket(alpha), ket(beta).conj())


def spin_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standard spin-1 angular momentum matrices (S_x, S_y, S_z)."""
    s = 1.0 / np.sqrt(2.0)
    sx = s * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    sy = s * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


@dataclass(frozen=True)
class OperatorBasis:
    """Identity plus the 8 spin-quadrupolar generators of su(3)."""

    identity: np.ndarray
    generators: np.ndarray  # shape (8, 3, 3)
    labels: tuple[str, ...] = GENERATOR_LABELS

    def __post_init__(self):
        self.identity.setflags(write=False)
        self.generators.setflags(write=False)

    def generator(self, label: str) -> np.ndarray:
        return self.generators[self.labels.index(label)]


def spin_quadrupolar_basis() -> OperatorBasis:
    """The spin-quadrupolar generator basis.

    Quadrupoles Q_uv = S_u S_v + S_v S_u, D_xy = S_x^2 - S_y^2 and
    Y = (2 S_z^2 - S_x^2 - S_y^2)/sqrt(3).  The sign of Y is fixed so
    that (D_xy + sqrt(3) Y)/2 acts inside the bright manifold
    span{|B>, |2>} (and the dark analogue inside span{|D>, |2>}); the
    magnitude is fixed by tr(Y^2) = 2.
    """
    sx, sy, sz = spin_matrices()
    qxz = sx @ sz + sz @ sx
    qyz = sy @ sz + sz @ sy
    qxy = sx @ sy + sy @ sx
    dxy = sx @ sx - sy @ sy
    y = (2 * sz @ sz - sx @ sx - sy @ sy) / np.sqrt(3.0)
    gens = np.stack([sx, sy, sz, qxz, qyz, qxy, dxy, y])
    return OperatorBasis(identity=np.eye(3, dtype=complex), generators=gens)


def _check_hermitian(m: np.ndarray, what: str = "operator") -> None:
    if np.abs(m - m.conj().T).max() > ATOL:
        raise ValueError(f"{what} is not Hermitian")


def structure_constants(basis: OperatorBasis | None = None) -> np.ndarray:
    """f_abc with [G_a, G_b] = i sum_c f_abc G_c, computed by projection.

    With all generators normalized to tr(G^2) = 2 the tensor is totally
    antisymmetric, which is what makes the per-site quadratic Casimir
    sum_a lambda_a^2 invariant under the mean-field flow.
    """
    if basis is None:
        basis = spin_quadrupolar_basis()
    g = basis.generators
    norms = np.array([np.trace(m @ m).real for m in g])
    if np.abs(norms - norms[0]).max() > ATOL or np.abs(norms[0]) < ATOL:
        raise ValueError("basis is not uniformly normalized; projection ill-defined")
    f = np.zeros((8, 8, 8))
    for a, b in itertools.combinations(range(8), 2):
        comm = g[a] @ g[b] - g[b] @ g[a]
        for c in range(8):
            f[a, b, c] = (np.trace(comm @ g[c]) / (1j * norms[0])).real
        f[b, a] = -f[a, b]
    # re-expansion residual guard
    recon = 1j * np.einsum("abc,cij->abij", f, g)
    comms = np.einsum("aik,bkj->abij", g, g) - np.einsum("bik,akj->abij", g, g)
    if np.abs(recon - comms).max() > ATOL:
        raise ValueError("structure-constant re-expansion residual too large")
    return f


def expand_in_basis(m: np.ndarray, basis: OperatorBasis | None = None) -> tuple[float, np.ndarray]:
    """Hilbert-Schmidt expansion m = c0*I + sum_a c_a G_a, coefficients real."""
    if basis is None:
        basis = spin_quadrupolar_basis()
    _check_hermitian(m, "expand_in_basis input")
    c0 = np.trace(m).real / 3.0
    coeffs = np.array([np.trace(m @ g).real / 2.0 for g in basis.generators])
    recon = c0 * np.eye(3) + np.einsum("a,aij->ij", coeffs, basis.generators)
    if np.abs(recon - m).max() > ATOL:
        raise ValueError("basis expansion residual too large")
    return c0, coeffs


@dataclass(frozen=True)
class ManifoldTriple:
    """A canonically closing su(2) triple (x, y, z) inside su(3).

    x and y are the generators as printed; z is fixed as -i[x, y], which
    makes all three cyclic relations [x,y]=iz, [y,z]=ix, [z,x]=iy hold
    exactly.  Bright/Dark come out as spin-1/2 triples on their active
    two-level subspace, A/B as spin-1 representations.

    ``z_scale`` records z relative to the printed combination.
    ``coherent_scale`` is the factor applied to all three generators when
    building collective metrology observables, chosen so an x-aligned
    product state has perpendicular variance N/4 (hence F_Q(0) = N).
    """

    label: str
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    z_scale: float
    coherent_scale: float
    spin: float  # su(2) representation spin on the active subspace
    active_subspace: np.ndarray  # 3x3 projector

    def __post_init__(self):
        for m in (self.x, self.y, self.z, self.active_subspace):
            m.setflags(write=False)

    @property
    def observables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """The metrology-normalized (x, y, z) single-site operators."""
        s = self.coherent_scale
        return s * self.x, s * self.y, s * self.z


def bright_state() -> np.ndarray:
    return (ket(1) + ket(3)) / np.sqrt(2.0)


def dark_state() -> np.ndarray:
    return (ket(1) - ket(3)) / np.sqrt(2.0)


def _printed_triples(basis: OperatorBasis) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    g = {lab: basis.generator(lab) for lab in GENERATOR_LABELS}
    r3 = np.sqrt(3.0)
    return {
        "Bright": (g["S_x"] / 2, g["Q_yz"] / 2, (g["D_xy"] + r3 * g["Y"]) / 2),
        "Dark": (g["Q_xz"] / 2, g["S_y"] / 2, (g["D_xy"] - r3 * g["Y"]) / 2),
        "A": (
            (g["S_x"] - g["S_y"] + g["Q_xz"] - g["Q_yz"]) / 2,
            (g["S_x"] - g["S_y"] - (g["Q_xz"] - g["Q_yz"])) / 2,
            g["D_xy"] / 2,
        ),
        "B": (
            (g["S_x"] + g["S_y"] - (g["Q_xz"] + g["Q_yz"])) / 2,
            (g["S_x"] + g["S_y"] + (g["Q_xz"] + g["Q_yz"])) / 2,
            g["D_xy"] / 2,
        ),
    }


def manifold_triple(label: str, basis: OperatorBasis | None = None) -> ManifoldTriple:
    """Build the normalized SU(2) triple for one of {Bright, Dark, A, B}."""
    if label not in MANIFOLD_LABELS:
        raise ValueError(f"unknown manifold label {label!r}")
    if basis is None:
        basis = spin_quadrupolar_basis()
    x, y, z_printed = _printed_triples(basis)[label]
    z = -1j * (x @ y - y @ x)
    _check_hermitian(z, "manifold z generator")
    z = z.real.astype(complex) if np.abs(z.imag).max() < ATOL else z
    # cyclic closure must now hold exactly; anything else means the basis
    # conventions are wrong
    r1 = np.abs((y @ z - z @ y) - 1j * x).max()
    r2 = np.abs((z @ x - x @ z) - 1j * y).max()
    if max(r1, r2) > 1e-10:
        raise ValueError(f"su(2) closure fails for manifold {label}: {max(r1, r2):.2e}")
    # scale of z relative to the printed combination
    mask = np.abs(z_printed) > ATOL
    ratios = (z[mask] / z_printed[mask]).real
    z_scale = float(ratios[0])
    if np.abs(ratios - z_scale).max() > 1e-10:
        raise ValueError(f"z is not proportional to the printed form for {label}")

    if label in ("Bright", "Dark"):
        pair = bright_state() if label == "Bright" else dark_state()
        sub = np.stack([pair, ket(2)], axis=1)
        spin = 0.5
        coherent = 1.0
    else:
        # two-dimensional nonzero-action subspace of x
        evals, evecs = np.linalg.eigh(x)
        sub = evecs[:, np.abs(evals) > 1e-10]
        spin = 1.0
        # spin-1 coherent state has per-site transverse variance 1/2;
        # 1/sqrt(2) brings it to the 1/4 of a spin-1/2 coherent state
        coherent = 1.0 / np.sqrt(2.0)
    proj = sub @ sub.conj().T
    return ManifoldTriple(
        label=label,
        x=x,
        y=y,
        z=z,
        z_scale=z_scale,
        coherent_scale=coherent,
        spin=spin,
        active_subspace=proj,
    )


def pair_hamiltonian_lambda(jr: float, j1: float = 1.0) -> np.ndarray:
    """Two-site interaction for one (i, j) pair in the Lambda form.

    j1 * (L21 x L12 + L12 x L21) + j1*jr * (L32 x L23 + L23 x L32),
    i.e. the full i!=j contribution of one unordered pair.
    """
    l12 = transition_operator(1, 2)
    l21 = transition_operator(2, 1)
    l23 = transition_operator(2, 3)
    l32 = transition_operator(3, 2)
    h = np.kron(l21, l12) + np.kron(l12, l21)
    h = j1 * h + j1 * jr * (np.kron(l32, l23) + np.kron(l23, l32))
    return h


def pair_hamiltonian_bright_dark(j: float = 1.0) -> np.ndarray:
    """Two-site symmetric interaction in the bright/dark ladder form."""
    bp = np.outer(bright_state(), ket(2).conj())
    dp = np.outer(dark_state(), ket(2).conj())
    h = np.zeros((9, 9), dtype=complex)
    for op in (bp, dp):
        h += np.kron(op, op.conj().T) + np.kron(op.conj().T, op)
    return j * h


def pair_hamiltonian_countertwisting(j: float = 1.0) -> np.ndarray:
    """Two-site antisymmetric interaction in the resolved manifold form.

    Pairwise-product reading of the countertwisting form, with the B
    manifold's x/y interchanged relative to the printed order and an
    overall factor 1/2; this reproduces the Lambda form at J_r = -1
    exactly, with no one-body correction.
    """
    basis = spin_quadrupolar_basis()
    printed = _printed_triples(basis)
    xa, ya, _ = printed["A"]
    xb, yb, _ = printed["B"]
    h = np.kron(xa, xa) - np.kron(ya, ya)
    h += np.kron(yb, yb) - np.kron(xb, xb)  # B-manifold x/y interchanged
    return j * 0.5 * h


def hamiltonian_form_residual(
    form_a: np.ndarray, form_b: np.ndarray, remove_one_body: bool = False
) -> float:
    """Frobenius distance between two 9x9 two-site Hamiltonian forms.

    With ``remove_one_body`` the best-fit single-site correction
    (components of the difference along I x G and G x I, plus I x I) is
    projected out before taking the norm.
    """
    _check_hermitian(form_a, "form_a")
    _check_hermitian(form_b, "form_b")
    diff = form_a - form_b
    if remove_one_body:
        basis = spin_quadrupolar_basis()
        eye = np.eye(3, dtype=complex)
        ops = [np.kron(eye, eye) / 3.0]
        for g in basis.generators:
            ops.append(np.kron(g, eye))
            ops.append(np.kron(eye, g))
        for op in ops:
            w = np.trace(op.conj().T @ op).real
            diff = diff - op * (np.trace(op.conj().T @ diff) / w)
    return float(np.linalg.norm(diff))


def basis_reference_text(basis: OperatorBasis | None = None) -> str:
    """Plain-text dump of the identity and all 8 generators."""
    if basis is None:
        basis = spin_quadrupolar_basis()
    lines = ["Single-site operator conventions, ordered basis {|1>,|2>,|3>} = {m=+1,0,-1}", ""]
    mats = [("I", basis.identity)] + list(zip(basis.labels, basis.generators))
    for lab, m in mats:
        lines.append(lab)
        for row in m:
            lines.append(
                "  [" + ", ".join(f"{v.real:+.6f}{v.imag:+.6f}j" for v in row) + "]"
            )
        lines.append("")
    return "\n".join(lines)
