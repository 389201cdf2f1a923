"""n-qubit pure states, density matrices, and tensor index arithmetic.

Conventions used throughout the package: qubits carry 1-based labels, and the
computational basis index (i1, ..., in) maps to the integer
sum(i_k * 2**(n-k)), so qubit 1 is the most significant bit.  Amplitude
vectors are dense complex128 arrays; the implementation targets desk scale
(n up to about 12).
"""

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

# states are renormalized (with a warning) when the norm misses 1 by more than this
NORM_TOL = 1e-10
# a reduced state counts as pure when 1 - purity falls below this
RANK_TOL = 1e-9
# is_product enumerates bipartitions, which is only sane up to here
PRODUCT_ENUM_LIMIT = 16


def int_to_bits(value: int, n: int) -> tuple[int, ...]:
    """Binary digits (i1, ..., in) of a basis index, qubit 1 most significant."""
    if not 0 <= value < 2**n:
        raise ValueError(f"index {value} out of range for n={n}")
    return tuple((value >> (n - 1 - k)) & 1 for k in range(n))


def bits_to_int(bits) -> int:
    """Inverse of int_to_bits."""
    out = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"binary digits required, got {bits!r}")
        out = (out << 1) | b
    return out


def bit_complement(bits) -> tuple[int, ...]:
    """Flip every digit."""
    return tuple(1 - b for b in bits)


def flip_index(bits, j: int) -> tuple[int, ...]:
    """Flip the digit of qubit j (1-based)."""
    bits = tuple(bits)
    if not 1 <= j <= len(bits):
        raise ValueError(f"qubit label {j} out of range for n={len(bits)}")
    return bits[: j - 1] + (1 - bits[j - 1],) + bits[j:]


def bit_table(n: int) -> np.ndarray:
    """(2**n, n) array whose row k holds int_to_bits(k, n)."""
    k = np.arange(2**n)
    return (k[:, None] >> (n - 1 - np.arange(n))) & 1


def _check_subset(n: int, subset) -> tuple[int, ...]:
    subset = tuple(subset)
    if len(subset) == 0:
        raise ValueError("qubit subset must be nonempty")
    if list(subset) != sorted(set(subset)):
        raise ValueError(f"qubit subset must be strictly increasing, got {subset}")
    if subset[0] < 1 or subset[-1] > n:
        raise ValueError(f"qubit labels must lie in 1..{n}, got {subset}")
    return subset


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm pure state of n qubits.

    Parameters
    ----------
    vector : array_like
        2**n complex amplitudes in the index convention above.  The vector is
        copied, and renormalized with a warning if its norm misses 1 by more
        than NORM_TOL.  The zero vector is rejected.
    """

    vector: np.ndarray
    n: int = 0

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.complex128).reshape(-1).copy()
        n = int(np.log2(vec.size))
        if 2**n != vec.size or vec.size < 2:
            raise ValueError(f"amplitude count {vec.size} is not 2**n with n >= 1")
        nrm = np.linalg.norm(vec)
        if nrm == 0.0:
            raise ValueError("zero vector is not a state")
        if abs(nrm - 1.0) > NORM_TOL:
            warnings.warn(f"renormalizing input state (norm was {nrm:.6g})")
            vec = vec / nrm
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "n", n)

    def amplitude(self, bits) -> complex:
        return complex(self.vector[bits_to_int(bits)])

    def tensor(self) -> np.ndarray:
        """Read-only view with shape (2,) * n."""
        return self.vector.reshape((2,) * self.n)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive semidefinite operator on n qubits.

    Hermiticity and unit trace are checked at construction.  Positivity is
    preserved by every constructor in this package (pure projectors, partial
    traces, unitary conjugation), so the full eigenvalue check is deferred to
    validate() for use in tests.
    """

    matrix: np.ndarray
    n: int = 0

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"square matrix required, got shape {mat.shape}")
        n = int(np.log2(mat.shape[0]))
        if 2**n != mat.shape[0] or n < 1:
            raise ValueError(f"dimension {mat.shape[0]} is not 2**n with n >= 1")
        if np.max(np.abs(mat - mat.conj().T)) > 100 * NORM_TOL:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            warnings.warn(f"rescaling density matrix (trace was {tr:.6g})")
            mat = mat / tr
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n", n)

    def validate(self, tol: float = NORM_TOL) -> None:
        """Full positivity check; raises on eigenvalues below -tol."""
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.min() < -tol:
            raise ValueError(f"negative eigenvalue {evals.min():.3g}")


def to_density(psi: PureState) -> DensityMatrix:
    """Rank-one projector |psi><psi|."""
    return DensityMatrix(np.outer(psi.vector, psi.vector.conj()))


def apply_matrix_to_qubit(mat: np.ndarray, vec: np.ndarray, j: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to qubit j (1-based) of a 2**n amplitude vector."""
    t = vec.reshape(2 ** (j - 1), 2, 2 ** (n - j))
    out = np.einsum("ab,xby->xay", mat, t)
    return out.reshape(-1)


def apply_matrix_to_density(mat: np.ndarray, rho: np.ndarray, j: int, n: int, side: str) -> np.ndarray:
    """mat @ rho or rho @ mat with mat acting on qubit j only."""
    d = 2**n
    if side == "left":
        t = rho.reshape(2 ** (j - 1), 2, 2 ** (n - j) * d)
        out = np.einsum("ab,xby->xay", mat, t)
    elif side == "right":
        t = rho.reshape(d * 2 ** (j - 1), 2, 2 ** (n - j))
        out = np.einsum("xby,ab->xay", t, mat.T)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return out.reshape(d, d)


def partial_trace(rho: DensityMatrix, traced) -> DensityMatrix:
    """Trace out the qubits in `traced` (1-based labels); at least one must remain."""
    traced = _check_subset(rho.n, traced)
    if len(traced) == rho.n:
        raise ValueError("cannot trace out every qubit")
    n = rho.n
    dims = (2,) * n
    t = rho.matrix.reshape(dims + dims)
    # trace the highest-labeled qubit first so remaining axis offsets stay valid
    m = n
    for j in sorted(traced, reverse=True):
        t = np.trace(t, axis1=j - 1, axis2=m + j - 1)
        m -= 1
    d = 2**m
    return DensityMatrix(t.reshape(d, d))


def reduced_state(psi: PureState, keep) -> DensityMatrix:
    """Reduced density matrix of a pure state on the kept qubits."""
    keep = _check_subset(psi.n, keep)
    m = _amplitude_matrix(psi, keep)
    return DensityMatrix(m @ m.conj().T)


def _amplitude_matrix(psi: PureState, keep: tuple[int, ...]) -> np.ndarray:
    """Reshape amplitudes into a (2**|keep|, 2**|rest|) matrix."""
    rest = [j for j in range(1, psi.n + 1) if j not in keep]
    axes = [j - 1 for j in keep] + [j - 1 for j in rest]
    t = psi.tensor().transpose(axes)
    return t.reshape(2 ** len(keep), 2 ** len(rest))


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), between 2**-n and 1."""
    return float(np.real(np.vdot(rho.matrix, rho.matrix)))


def subset_purity(psi: PureState, subset) -> float:
    """Purity of the reduced state of a pure state on a qubit subset.

    Computed from the Gram matrix of the reshaped amplitude matrix, using
    whichever side of the bipartition is smaller.
    """
    subset = _check_subset(psi.n, subset)
    if len(subset) == psi.n:
        return 1.0
    if 2 * len(subset) > psi.n:
        subset = tuple(j for j in range(1, psi.n + 1) if j not in subset)
    m = _amplitude_matrix(psi, subset)
    g = m @ m.conj().T
    return float(np.sum(np.abs(g) ** 2))


@dataclass(frozen=True)
class FactorizationReport:
    """Finest tensor factorization found by is_product.

    blocks holds disjoint qubit subsets covering 1..n; a single block means
    the state is nonproduct.  subset_purities records the reduced purity of
    every nonempty proper subset tested (keyed by subset, with complements
    sharing a value).
    """

    blocks: tuple[tuple[int, ...], ...]
    subset_purities: dict

    @property
    def is_product(self) -> bool:
        return len(self.blocks) > 1


def is_product(psi: PureState) -> FactorizationReport:
    """Test every bipartition of a pure state and return the finest factorization."""
    n = psi.n
    if n > PRODUCT_ENUM_LIMIT:
        raise ValueError(f"is_product enumerates bipartitions; n={n} exceeds {PRODUCT_ENUM_LIMIT}")
    labels = tuple(range(1, n + 1))
    purities: dict[tuple[int, ...], float] = {}
    pure_subsets: list[tuple[int, ...]] = []
    # a subset and its complement have identical purity for a pure global
    # state, so only the smaller side ever hits the Gram computation
    for k in range(1, n // 2 + 1):
        for subset in combinations(labels, k):
            if 2 * k == n and 1 not in subset:
                continue
            p = subset_purity(psi, subset)
            comp = tuple(j for j in labels if j not in subset)
            purities[subset] = p
            purities[comp] = p
            if 1.0 - p < RANK_TOL:
                pure_subsets.append(subset)
                pure_subsets.append(comp)
    pure_subsets.sort(key=lambda s: (len(s), s))
    blocks = []
    remaining = set(labels)
    while remaining:
        q = min(remaining)
        block = None
        for s in pure_subsets:
            if q in s and set(s) <= remaining:
                block = s
                break
        if block is None:
            block = tuple(sorted(remaining))
        blocks.append(block)
        remaining -= set(block)
    return FactorizationReport(blocks=tuple(blocks), subset_purities=purities)


def tensor_product(*states: PureState) -> PureState:
    """Kronecker product of pure states, labels concatenated in order."""
    vec = states[0].vector
    for s in states[1:]:
        vec = np.kron(vec, s.vector)
    return PureState(vec)


def basis_state(bits) -> PureState:
    """Computational basis state |i1 ... in>."""
    bits = tuple(bits)
    vec = np.zeros(2 ** len(bits), dtype=np.complex128)
    vec[bits_to_int(bits)] = 1.0
    return PureState(vec)


def ghz_state(n: int, alpha: float | complex = None, beta: float | complex = None) -> PureState:
    """Generalized GHZ state alpha|0...0> + beta|1...1> (balanced by default)."""
    if n < 2:
        raise ValueError("ghz_state needs n >= 2")
    if alpha is None and beta is None:
        alpha = beta = 1.0 / np.sqrt(2.0)
    elif beta is None:
        a2 = abs(alpha) ** 2
        if a2 >= 1.0:
            raise ValueError(f"|alpha| must be < 1 when beta is omitted, got {alpha}")
        beta = np.sqrt(1.0 - a2)
    if alpha == 0 or beta == 0:
        raise ValueError("ghz_state requires alpha * beta != 0")
    vec = np.zeros(2**n, dtype=np.complex128)
    vec[0] = alpha
    vec[-1] = beta
    return PureState(vec)


def w_state(n: int) -> PureState:
    """Equal superposition of the weight-one basis states."""
    if n < 2:
        raise ValueError("w_state needs n >= 2")
    vec = np.zeros(2**n, dtype=np.complex128)
    for j in range(n):
        vec[1 << j] = 1.0
    return PureState(vec / np.sqrt(n))


def singlet_state() -> PureState:
    """Two-qubit singlet (|01> - |10>)/sqrt(2)."""
    return PureState(np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0))


def complement_pair_state(r: complex, s: complex, t: complex) -> PureState:
    """Four-qubit state with amplitude r on |0011> and |1100>, s on |1001>
    and |0110>, and t on |1010> and |0101>.

    Every occupied basis ket is paired with its bitwise complement at equal
    amplitude.  The result is normalized.
    """
    vec = np.zeros(16, dtype=np.complex128)
    vec[0b0011] = vec[0b1100] = r
    vec[0b1001] = vec[0b0110] = s
    vec[0b1010] = vec[0b0101] = t
    return PureState(vec / np.linalg.norm(vec))


def canonical_four_qubit_state(a: float, b: complex) -> PureState:
    """Canonical representative with coefficients (a, b, c), c = -a - b.

    Requires a > 0 and a, b, c all nonzero; this is the normal form for
    nonproduct four-qubit states whose stabilizer is a copy of su(2).
    """
    if not a > 0:
        raise ValueError(f"canonical form requires a > 0, got a={a}")
    c = -a - b
    if b == 0 or c == 0:
        raise ValueError("canonical form requires a, b, c all nonzero")
    return complement_pair_state(a, b, c)


def random_state(n: int, rng) -> PureState:
    """Haar-random pure state (normalized complex Gaussian amplitudes)."""
    rng = np.random.default_rng(rng)
    vec = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(vec / np.linalg.norm(vec))
