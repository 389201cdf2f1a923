"""Null-space solvers for local-unitary stabilizer algebras.

The stabilizer of a pure state is the set of X in u(1) + su(2)^n with
X|psi> = 0; the stabilizer of a density matrix is the set of X in su(2)^n
with [X, rho] = 0.  Both are kernels of real-linear maps and are computed
by realified SVD with a relative singular-value cutoff.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from .states import PureState, DensityMatrix, RANK_TOL, apply_matrix_to_density, purity
from .local_unitary import SU2_BASIS, LieElement, lie_element_from_flat, apply_matrix_to_qubit

# relative singular-value cutoff for rank decisions
NULL_TOL = 1e-8
# the spectrum must split by at least this factor across the rank cut
GAP_MIN = 1e4
# two subspaces count as equal when every principal angle is below this
SPAN_TOL = 1e-7
# Lie brackets must project back into the span within this residual
CLOSURE_TOL = 1e-7
# direct commutator solves cost O(4^n); above this the rank-one path is used
DENSITY_DIRECT_LIMIT = 6


@dataclass(frozen=True, eq=False)
class StabilizerBasis:
    """Orthonormal coordinate basis of a stabilizer algebra.

    ambient is 'pure' (coordinates (t, x1, y1, z1, ...), length 3n+1) or
    'density' (no phase coordinate, length 3n).  Rows of `basis` are
    orthonormal in the Euclidean coordinate inner product and are presented
    in a deterministic order.  singular_values holds the full spectrum of
    the defining map; gap is the ratio across the rank cut (inf when the
    cut is at either end).
    """

    ambient: str
    n: int
    basis: np.ndarray
    singular_values: np.ndarray
    gap: float
    method: str = "svd"
    cross_validated: bool = False

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64).copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        s = np.asarray(self.singular_values, dtype=np.float64).copy()
        s.flags.writeable = False
        object.__setattr__(self, "singular_values", s)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ill_conditioned(self) -> bool:
        return self.gap < GAP_MIN

    @property
    def proj_dims(self) -> tuple[int, ...]:
        return tuple(projection_dim(self, j) for j in range(1, self.n + 1))

    def elements(self) -> list[LieElement]:
        return [lie_element_from_flat(row, self.n, self.ambient) for row in self.basis]

    def block_columns(self, j: int) -> np.ndarray:
        """The three coordinate columns of qubit j."""
        off = 1 if self.ambient == "pure" else 0
        return self.basis[:, off + 3 * (j - 1) : off + 3 * j]


def _canonical_rows(rows: np.ndarray, phase_col: bool) -> np.ndarray:
    """Fix signs and sort rows for a reproducible presentation."""
    rows = rows.copy()
    for row in rows:
        nz = np.flatnonzero(np.abs(row) > 1e-8)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    if rows.shape[0] > 1:
        keys = [tuple(np.round(r, 9)) for r in rows]
        t_mag = np.abs(rows[:, 0]) if phase_col else np.zeros(rows.shape[0])
        order = sorted(range(rows.shape[0]), key=lambda i: (-t_mag[i], keys[i]))
        rows = rows[order]
    return rows


def _null_space(real_map: np.ndarray, tol: float):
    """Kernel rows, full spectrum, and the spectral gap across the cut."""
    _, s, vh = np.linalg.svd(real_map, full_matrices=False)
    k = real_map.shape[1]
    if s.size < k:  # wide matrices would lose kernel directions here
        raise ValueError("defining map has fewer rows than columns")
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    if 0 < rank < k:
        with np.errstate(divide="ignore"):
            gap = float(s[rank - 1] / s[rank]) if s[rank] > 0 else np.inf
    else:
        gap = np.inf
    return vh[rank:], s, gap


def stabilizer_pure(psi: PureState, tol: float = NULL_TOL) -> StabilizerBasis:
    """Stabilizer of a pure state inside u(1) + su(2)^n.

    The defining map sends real coordinates (t, x1, y1, z1, ...) to the
    vector X|psi>, realified to a (2 * 2**n, 3n+1) matrix.
    """
    n = psi.n
    cols = np.empty((2**n, 3 * n + 1), dtype=np.complex128)
    cols[:, 0] = -1j * psi.vector
    for j in range(1, n + 1):
        for a in range(3):
            cols[:, 1 + 3 * (j - 1) + a] = apply_matrix_to_qubit(SU2_BASIS[a], psi.vector, j, n)
    real_map = np.concatenate([cols.real, cols.imag], axis=0)
    rows, svals, gap = _null_space(real_map, tol)
    return StabilizerBasis("pure", n, _canonical_rows(rows, True), svals, gap)


def _dominant_eigenvector(rho: DensityMatrix) -> PureState:
    """Pure state of a (near) rank-one density matrix."""
    j = int(np.argmax(np.abs(np.diagonal(rho.matrix))))
    col = rho.matrix[:, j]
    return PureState(col / np.linalg.norm(col))


def _density_direct(rho: DensityMatrix, tol: float):
    n = rho.n
    d = 2**n
    cols = np.empty((d * d, 3 * n), dtype=np.complex128)
    for j in range(1, n + 1):
        for a in range(3):
            m = SU2_BASIS[a]
            comm = apply_matrix_to_density(m, rho.matrix, j, n, "left")
            comm -= apply_matrix_to_density(m, rho.matrix, j, n, "right")
            cols[:, 3 * (j - 1) + a] = comm.reshape(-1)
    real_map = np.concatenate([cols.real, cols.imag], axis=0)
    return _null_space(real_map, tol)


def _density_projected(rho: DensityMatrix, tol: float):
    """Rank-one shortcut: solve the pure stabilizer and drop the phase."""
    psi = _dominant_eigenvector(rho)
    pure = stabilizer_pure(psi, tol)
    projected = pure.basis[:, 1:]
    if projected.shape[0] == 0:
        return projected, pure.singular_values, pure.gap
    _, s, vh = np.linalg.svd(projected, full_matrices=False)
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    if r != pure.dim:
        warnings.warn("phase projection lost stabilizer directions; input may be ill-conditioned")
    return vh[:r], pure.singular_values, pure.gap


def stabilizer_density(rho: DensityMatrix, tol: float = NULL_TOL, method: str = "auto") -> StabilizerBasis:
    """Stabilizer of a density matrix inside su(2)^n.

    method 'direct' builds the commutator map on all of su(2)^n and costs
    O(4^n); 'projected' recovers the pure state of a rank-one input and
    projects its stabilizer.  'auto' runs the direct solve up to
    DENSITY_DIRECT_LIMIT qubits, cross-validating against the projected
    route on rank-one inputs, and falls back to 'projected' above the limit.
    """
    n = rho.n
    if method not in ("auto", "direct", "projected"):
        raise ValueError(f"unknown method {method!r}")
    rank_one = 1.0 - purity(rho) < RANK_TOL
    if method == "projected" or (method == "auto" and n > DENSITY_DIRECT_LIMIT):
        if not rank_one:
            raise ValueError("projected method requires a rank-one density matrix")
        rows, svals, gap = _density_projected(rho, tol)
        return StabilizerBasis("density", n, _canonical_rows(rows, False), svals, gap, method="projected")
    rows, svals, gap = _density_direct(rho, tol)
    out = StabilizerBasis("density", n, _canonical_rows(rows, False), svals, gap, method="direct")
    if method == "auto" and rank_one:
        proj_rows, _, _ = _density_projected(rho, tol)
        ok = proj_rows.shape[0] == out.dim
        if ok and out.dim > 0:
            ok = float(np.max(principal_angles(out.basis, proj_rows), initial=0.0)) < SPAN_TOL
        if not ok:
            warnings.warn("direct and projected stabilizer solves disagree")
        out = StabilizerBasis(
            "density", n, out.basis, svals, gap, method="direct", cross_validated=bool(ok)
        )
    return out


def projection_dim(k: StabilizerBasis, j: int, tol: float = NULL_TOL) -> int:
    """Dimension of the qubit-j projection of the stabilizer."""
    if not 1 <= j <= k.n:
        raise ValueError(f"qubit label {j} out of range for n={k.n}")
    block = k.block_columns(j)
    if block.shape[0] == 0:
        return 0
    s = np.linalg.svd(block, compute_uv=False)
    # basis rows are unit norm, so block singular values are at most 1 and
    # an absolute cut at tol is meaningful
    return int(np.sum(s > tol))


def principal_angles(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Principal angles between two row-spans (descending; empty if both trivial)."""
    da, db = rows_a.shape[0], rows_b.shape[0]
    if da == 0 and db == 0:
        return np.zeros(0)
    if da == 0 or db == 0:
        return np.array([np.pi / 2])
    return subspace_angles(rows_a.T, rows_b.T)


def span_contains(k: StabilizerBasis, flat: np.ndarray, tol: float = SPAN_TOL) -> bool:
    """Whether a coordinate vector lies in the stabilizer span."""
    v = np.asarray(flat, dtype=np.float64)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return True
    resid = v - k.basis.T @ (k.basis @ v)
    return float(np.linalg.norm(resid)) < tol * nrm


def _bracket_flat(row_i: np.ndarray, row_j: np.ndarray, n: int, ambient: str) -> np.ndarray:
    """Coordinates of [X_i, X_j]; the u(1) part is central so the phase is 0."""
    off = 1 if ambient == "pure" else 0
    ci = row_i[off:].reshape(n, 3)
    cj = row_j[off:].reshape(n, 3)
    br = 2.0 * np.cross(ci, cj)
    if ambient == "pure":
        return np.concatenate([[0.0], br.reshape(-1)])
    return br.reshape(-1)


@dataclass(frozen=True, eq=False)
class AlgebraType:
    """Lie-algebra classification of a stabilizer span.

    kind is 'abelian', 'su2', or 'other'.  closure_residual is the largest
    distance from a pairwise bracket back to the span; structure_constants
    c[i, j, :] expand [e_i, e_j] in the basis when the algebra closes.
    """

    kind: str
    closed: bool
    closure_residual: float
    structure_constants: np.ndarray | None
    killing_eigenvalues: np.ndarray | None


def algebra_type(k: StabilizerBasis, tol: float = CLOSURE_TOL) -> AlgebraType:
    """Classify the Lie algebra spanned by a stabilizer basis."""
    dim = k.dim
    if dim <= 1:
        return AlgebraType("abelian", True, 0.0, None, None)
    brackets = np.zeros((dim, dim, k.basis.shape[1]))
    max_norm = 0.0
    max_resid = 0.0
    const = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            br = _bracket_flat(k.basis[i], k.basis[j], k.n, k.ambient)
            brackets[i, j] = br
            brackets[j, i] = -br
            max_norm = max(max_norm, float(np.linalg.norm(br)))
            coeff = k.basis @ br
            const[i, j] = coeff
            const[j, i] = -coeff
            resid = br - k.basis.T @ coeff
            max_resid = max(max_resid, float(np.linalg.norm(resid)))
    if max_norm < tol:
        return AlgebraType("abelian", True, max_resid, const, None)
    closed = max_resid < tol
    if not closed:
        return AlgebraType("other", False, max_resid, None, None)
    # killing[a, b] = tr(ad_a ad_b) with (ad_a)_{kj} = const[a, j, k]
    ad = np.transpose(const, (0, 2, 1))
    killing = np.einsum("akj,bjk->ab", ad, ad)
    killing = (killing + killing.T) / 2.0
    evals = np.linalg.eigvalsh(killing)
    if dim == 3 and evals.max() < -1e-8:
        return AlgebraType("su2", True, max_resid, const, evals)
    return AlgebraType("other", True, max_resid, const, evals)


@dataclass(frozen=True, eq=False)
class ProjectionCheck:
    """Agreement report between the pure and density stabilizers of one state."""

    passed: bool
    dim_pure: int
    dim_density: int
    max_angle: float
    proj_dims_pure: tuple[int, ...]
    proj_dims_density: tuple[int, ...]


def phase_projection_check(
    psi: PureState, tol: float = NULL_TOL, span_tol: float = SPAN_TOL, method: str = "auto"
) -> ProjectionCheck:
    """Check that dropping the phase maps the pure stabilizer onto the
    density stabilizer of the same state, with matching dimensions, spans,
    and per-qubit projections."""
    from .states import to_density

    k_pure = stabilizer_pure(psi, tol)
    k_dens = stabilizer_density(to_density(psi), tol, method=method)
    dropped = k_pure.basis[:, 1:]
    angles = principal_angles(dropped, k_dens.basis)
    max_angle = float(np.max(angles, initial=0.0))
    pd_pure = k_pure.proj_dims
    pd_dens = k_dens.proj_dims
    passed = k_pure.dim == k_dens.dim and max_angle < span_tol and pd_pure == pd_dens
    return ProjectionCheck(passed, k_pure.dim, k_dens.dim, max_angle, pd_pure, pd_dens)
