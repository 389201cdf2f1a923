"""Local-unitary invariants: subsystem purities, four-qubit pair invariants,
and the polynomial family built from per-qubit copy permutations.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .states import PureState, bit_table, subset_purity, _check_subset

# fingerprints of the same orbit agree to this relative tolerance
INVARIANCE_TOL = 1e-8


def purity_invariant(psi: PureState, subset) -> float:
    """Purity of the reduced state on a qubit subset (an LU invariant)."""
    subset = _check_subset(psi.n, subset)
    if len(subset) == psi.n:
        raise ValueError("subset must be proper")
    return subset_purity(psi, subset)


def pair_invariants(psi: PureState) -> tuple[float, float, float]:
    """Four-qubit invariants (I1, I2, I3) derived from pair purities.

    On a canonical complement-pair state with coefficients (a, b, c) and
    normalization 2(|a|^2+|b|^2+|c|^2) = 1, the purity of the reduced state
    on qubit pair (1,2) works out to 1 - 12(pq + pr) with p = |a|^2,
    q = |b|^2, r = |c|^2, and cyclically for pairs (1,3) and (1,4).  Solving
    the linear system gives the products pq, pr, qr, whence
    I1 = |a||b|, I2 = |a||c|, I3 = |b||c|.  Each value is clamped at zero
    against rounding for states outside the family.
    """
    if psi.n != 4:
        raise ValueError(f"pair_invariants requires n = 4, got n = {psi.n}")
    p12 = subset_purity(psi, (1, 2))
    p13 = subset_purity(psi, (1, 3))
    p14 = subset_purity(psi, (1, 4))
    pq = (1.0 - p12 + p13 - p14) / 24.0
    pr = (1.0 - p12 - p13 + p14) / 24.0
    qr = (1.0 + p12 - p13 - p14) / 24.0
    i1 = float(np.sqrt(max(pq, 0.0)))
    i2 = float(np.sqrt(max(pr, 0.0)))
    i3 = float(np.sqrt(max(qr, 0.0)))
    return (i1, i2, i3)


@dataclass(frozen=True)
class PermutationTriple:
    """Copy-index permutations (one per qubit slot 2, 3, 4) for m state copies.

    Stored one-based as image tuples: sigma[k-1] is the copy whose slot-2 bit
    feeds the k-th conjugated index.
    """

    sigma: tuple[int, ...]
    tau: tuple[int, ...]
    phi: tuple[int, ...]

    def __post_init__(self):
        m = len(self.sigma)
        for name, perm in (("sigma", self.sigma), ("tau", self.tau), ("phi", self.phi)):
            if sorted(perm) != list(range(1, m + 1)):
                raise ValueError(f"{name}={perm} is not a permutation of 1..{m}")

    @property
    def m(self) -> int:
        return len(self.sigma)

    @property
    def key(self) -> str:
        def s(perm):
            return "".join(str(v) for v in perm)

        return f"{self.m}:{s(self.sigma)}:{s(self.tau)}:{s(self.phi)}"


# the degree-3 triple whose imaginary part resolves the conjugation phase
# on the canonical four-qubit family
REFERENCE_TRIPLE = PermutationTriple((3, 2, 1), (2, 1, 3), (2, 3, 1))
# same invariant evaluated after swapping qubits 3 and 4 (exchanging the two
# slot permutations realizes the swap without touching the state)
SWAP34_TRIPLE = PermutationTriple((3, 2, 1), (2, 3, 1), (2, 1, 3))
EXTRA_TRIPLE = PermutationTriple((2, 3, 1), (3, 1, 2), (2, 1, 3))

DEFAULT_TRIPLES = (REFERENCE_TRIPLE, SWAP34_TRIPLE, EXTRA_TRIPLE)

# 16^m terms; m = 4 is already 65536
MAX_COPIES = 4


def polynomial_invariant(psi: PureState, triple: PermutationTriple) -> complex:
    """Degree-2m polynomial LU invariant of a four-qubit state.

    Sums, over all m-tuples of basis indices, the product of m amplitudes
    against m conjugated amplitudes whose index bits are reassembled per
    qubit slot: slot 1 keeps the bit of the same copy, slots 2, 3, 4 pull
    their bit from the copy selected by sigma, tau, phi.  The sum runs in a
    fixed order so values are bit-stable.
    """
    if psi.n != 4:
        raise ValueError(f"polynomial_invariant requires n = 4, got n = {psi.n}")
    m = triple.m
    if m > MAX_COPIES:
        raise ValueError(f"copy count {m} exceeds {MAX_COPIES}")
    c = psi.vector
    bits = bit_table(4)
    idx = np.indices((16,) * m).reshape(m, -1)
    ket = np.ones(idx.shape[1], dtype=np.complex128)
    for k in range(m):
        ket *= c[idx[k]]
    bra = np.ones(idx.shape[1], dtype=np.complex128)
    for k in range(m):
        j = (
            (bits[idx[k], 0] << 3)
            | (bits[idx[triple.sigma[k] - 1], 1] << 2)
            | (bits[idx[triple.tau[k] - 1], 2] << 1)
            | bits[idx[triple.phi[k] - 1], 3]
        )
        bra *= c[j].conj()
    return complex(np.sum(ket * bra))


def canonical_poly3_im(a: float, b: complex) -> float:
    """Imaginary part of the reference degree-3 invariant on the canonical
    family, as a closed form in the coefficients (a, b) with c = -a - b.

    Homogeneous of degree 6: feed it the coefficients at the same scale as
    the state whose invariant it is compared against.
    """
    b1 = float(np.real(b))
    b2 = float(np.imag(b))
    return -24.0 * a**2 * b1 * b2 * (b1**2 + b2**2 + a * b1)


def _purity_subsets(n: int):
    """Proper subsets with no complement duplicates: size below n/2, plus the
    half-size subsets containing qubit 1."""
    labels = range(1, n + 1)
    for k in range(1, n // 2 + 1):
        for subset in combinations(labels, k):
            if 2 * k == n and 1 not in subset:
                continue
            yield subset


def subset_key(subset) -> str:
    sep = "." if max(subset) > 9 else ""
    return sep.join(str(j) for j in subset)


@dataclass(frozen=True)
class InvariantFingerprint:
    """Bundle of LU invariants used for screening and orbit diagnostics.

    purities is keyed by subset strings ("1", "12", ...); pair_invariants
    and poly are present only for four-qubit states.
    """

    n: int
    purities: dict
    pair_invariants: tuple | None
    poly: dict | None

    def components(self):
        """Ordered (name, value) pairs; values are real or complex scalars."""
        out = [(f"purity:{k}", v) for k, v in sorted(self.purities.items())]
        if self.pair_invariants is not None:
            out += [(f"pair:I{i + 1}", v) for i, v in enumerate(self.pair_invariants)]
        if self.poly is not None:
            out += [(f"poly:{k}", v) for k, v in sorted(self.poly.items())]
        return out

    def to_dict(self) -> dict:
        out = {"n": self.n, "purities": dict(sorted(self.purities.items()))}
        if self.pair_invariants is not None:
            out["pair_invariants"] = list(self.pair_invariants)
        if self.poly is not None:
            out["poly"] = {
                k: {"re": v.real, "im": v.imag} for k, v in sorted(self.poly.items())
            }
        return out


def invariant_fingerprint(psi: PureState, triples=DEFAULT_TRIPLES) -> InvariantFingerprint:
    """Collect the purity, pair, and polynomial invariants of a state."""
    purities = {subset_key(s): subset_purity(psi, s) for s in _purity_subsets(psi.n)}
    pair = pair_invariants(psi) if psi.n == 4 else None
    poly = (
        {t.key: polynomial_invariant(psi, t) for t in triples} if psi.n == 4 else None
    )
    return InvariantFingerprint(psi.n, purities, pair, poly)


def fingerprint_drift(fa: InvariantFingerprint, fb: InvariantFingerprint) -> float:
    """Largest relative component difference |x - y| / (1 + |x|)."""
    ca = fa.components()
    cb = fb.components()
    if [k for k, _ in ca] != [k for k, _ in cb]:
        raise ValueError("fingerprints have different components")
    drift = 0.0
    for (_, x), (_, y) in zip(ca, cb):
        drift = max(drift, abs(x - y) / (1.0 + abs(x)))
    return drift


def separating_component(
    fa: InvariantFingerprint, fb: InvariantFingerprint, tol: float
) -> tuple | None:
    """First fingerprint component differing by more than tol, or None."""
    for (name, x), (_, y) in zip(fa.components(), fb.components()):
        if abs(x - y) > tol:
            return (name, x, y)
    return None
