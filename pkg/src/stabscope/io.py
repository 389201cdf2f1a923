"""State input and output.

Two on-disk formats are supported.  JSON:

    {"n": 3, "amplitudes": [{"index": "000", "re": 0.7071, "im": 0.0},
                            {"index": "111", "re": 0.7071, "im": 0.0}]}

and plain text, one ket per line with `#` starting a comment:

    # three-qubit example
    000  0.7071  0.0
    111  0.7071  0.0

Omitted indices are zero; the vector is normalized on load.  Built-in named
states (ghz:n[:alpha], w:n, canon4:a:b_re[:b_im], singlets, haar:n, basis:bits)
cover the self-test without data files.
"""

import json
import os

import numpy as np

from .states import (
    PureState,
    basis_state,
    canonical_four_qubit_state,
    ghz_state,
    random_state,
    singlet_state,
    tensor_product,
    w_state,
)

# refuse to build vectors above this width; keeps the CLI desk-scale
MAX_QUBITS = 12

NAMED_PREFIXES = ("ghz", "w", "canon4", "singlets", "haar", "basis")


class StateFormatError(ValueError):
    """A state file or named-state spec could not be parsed."""


class GuardError(ValueError):
    """Requested system size exceeds the supported limit."""


def _check_qubits(n: int, origin: str) -> None:
    if n < 1:
        raise StateFormatError(f"{origin}: need at least one qubit, got n={n}")
    if n > MAX_QUBITS:
        raise GuardError(f"{origin}: n={n} exceeds the limit of {MAX_QUBITS} qubits")


def _parse_bitstring(token: str, origin: str) -> tuple[int, int]:
    """Return (index, n) for a bitstring with qubit 1 leftmost."""
    bits = token.strip()
    if not bits or any(ch not in "01" for ch in bits):
        raise StateFormatError(f"{origin}: expected a bitstring of 0s and 1s, got {token!r}")
    return int(bits, 2), len(bits)


def _finalize(vec: np.ndarray, origin: str) -> PureState:
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise StateFormatError(f"{origin}: all amplitudes are zero")
    return PureState(vec / norm)


def parse_state_json(text: str, origin: str = "<json>") -> PureState:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{origin}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise StateFormatError(f"{origin}: top level must be an object")
    n = data.get("n")
    if not isinstance(n, int):
        raise StateFormatError(f"{origin}: field 'n' must be an integer qubit count")
    _check_qubits(n, origin)
    entries = data.get("amplitudes")
    if not isinstance(entries, list):
        raise StateFormatError(f"{origin}: field 'amplitudes' must be a list")
    vec = np.zeros(2**n, dtype=np.complex128)
    seen = set()
    for pos, entry in enumerate(entries):
        where = f"{origin}: amplitudes[{pos}]"
        if not isinstance(entry, dict):
            raise StateFormatError(f"{where}: each amplitude must be an object")
        token = entry.get("index")
        if isinstance(token, str):
            index, width = _parse_bitstring(token, where)
            if width != n:
                raise StateFormatError(f"{where}: bitstring has {width} bits, expected {n}")
        elif isinstance(token, int) and 0 <= token < 2**n:
            index = token
        else:
            raise StateFormatError(f"{where}: 'index' must be an {n}-bit string")
        if index in seen:
            raise StateFormatError(f"{where}: duplicate index {token!r}")
        seen.add(index)
        try:
            re = float(entry.get("re", 0.0))
            im = float(entry.get("im", 0.0))
        except (TypeError, ValueError) as exc:
            raise StateFormatError(f"{where}: 're'/'im' must be numbers") from exc
        vec[index] = complex(re, im)
    return _finalize(vec, origin)


def parse_state_text(text: str, origin: str = "<text>") -> PureState:
    vec = None
    n = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{origin}: line {lineno}"
        parts = line.split()
        if len(parts) not in (2, 3):
            raise StateFormatError(f"{where}: expected 'bitstring re [im]', got {raw.strip()!r}")
        index, width = _parse_bitstring(parts[0], where)
        if n is None:
            n = width
            _check_qubits(n, where)
            vec = np.zeros(2**n, dtype=np.complex128)
        elif width != n:
            raise StateFormatError(f"{where}: bitstring has {width} bits, expected {n}")
        if index in seen:
            raise StateFormatError(f"{where}: duplicate ket {parts[0]}")
        seen.add(index)
        try:
            re = float(parts[1])
            im = float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError as exc:
            raise StateFormatError(f"{where}: amplitudes must be numbers") from exc
        vec[index] = complex(re, im)
    if vec is None:
        raise StateFormatError(f"{origin}: no amplitude lines found")
    return _finalize(vec, origin)


def load_state(path: str) -> PureState:
    """Load a state file, sniffing JSON versus text from the first character."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFormatError(f"{path}: {exc.strerror or exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_state_json(text, origin=path)
    return parse_state_text(text, origin=path)


def _spec_fields(spec: str, name: str, minimum: int, maximum: int) -> list[str]:
    fields = spec.split(":")[1:]
    if not minimum <= len(fields) <= maximum:
        raise StateFormatError(
            f"named state {spec!r}: {name} takes between {minimum} and {maximum} arguments"
        )
    return fields


def _float_field(spec: str, token: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise StateFormatError(f"named state {spec!r}: {token!r} is not a number") from exc


def _int_field(spec: str, token: str) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise StateFormatError(f"named state {spec!r}: {token!r} is not an integer") from exc


def named_state(spec: str, rng=None) -> PureState:
    """Build one of the named states.

    ghz:n[:alpha] (beta derived from normalization), w:n, canon4:a:b_re[:b_im],
    singlets (two singlet pairs on four qubits), haar:n (needs rng),
    basis:bitstring.
    """
    name = spec.split(":", 1)[0]
    if name == "ghz":
        fields = _spec_fields(spec, "ghz", 1, 2)
        n = _int_field(spec, fields[0])
        _check_qubits(n, spec)
        if n < 2:
            raise StateFormatError(f"named state {spec!r}: ghz needs n >= 2")
        alpha = _float_field(spec, fields[1]) if len(fields) == 2 else None
        if alpha is not None and not 0.0 < abs(alpha) < 1.0:
            raise StateFormatError(f"named state {spec!r}: need 0 < |alpha| < 1")
        try:
            return ghz_state(n, alpha)
        except ValueError as exc:
            raise StateFormatError(f"named state {spec!r}: {exc}") from exc
    if name == "w":
        fields = _spec_fields(spec, "w", 1, 1)
        n = _int_field(spec, fields[0])
        _check_qubits(n, spec)
        if n < 2:
            raise StateFormatError(f"named state {spec!r}: w needs n >= 2")
        return w_state(n)
    if name == "canon4":
        fields = _spec_fields(spec, "canon4", 2, 3)
        a = _float_field(spec, fields[0])
        b_re = _float_field(spec, fields[1])
        b_im = _float_field(spec, fields[2]) if len(fields) == 3 else 0.0
        try:
            return canonical_four_qubit_state(a, complex(b_re, b_im))
        except ValueError as exc:
            raise StateFormatError(f"named state {spec!r}: {exc}") from exc
    if name == "singlets":
        _spec_fields(spec, "singlets", 0, 0)
        return tensor_product(singlet_state(), singlet_state())
    if name == "haar":
        fields = _spec_fields(spec, "haar", 1, 1)
        n = _int_field(spec, fields[0])
        _check_qubits(n, spec)
        return random_state(n, np.random.default_rng(rng))
    if name == "basis":
        fields = _spec_fields(spec, "basis", 1, 1)
        index, n = _parse_bitstring(fields[0], f"named state {spec!r}")
        _check_qubits(n, spec)
        bits = [(index >> (n - k)) & 1 for k in range(1, n + 1)]
        return basis_state(bits)
    raise StateFormatError(
        f"unknown named state {spec!r}; expected one of {', '.join(NAMED_PREFIXES)}"
    )


def resolve_state(spec: str, rng=None) -> PureState:
    """Interpret a CLI state argument as a named state or a file path."""
    name = spec.split(":", 1)[0]
    if name in NAMED_PREFIXES and not os.path.exists(spec):
        return named_state(spec, rng)
    if os.path.exists(spec):
        return load_state(spec)
    raise StateFormatError(
        f"{spec!r} is neither a named state ({', '.join(NAMED_PREFIXES)}) nor an existing file"
    )


def state_to_dict(psi: PureState, cutoff: float = 1e-14) -> dict:
    """JSON-ready description of a state; amplitudes below cutoff are dropped."""
    amps = []
    for index in np.flatnonzero(np.abs(psi.vector) > cutoff):
        value = psi.vector[index]
        amps.append(
            {
                "index": format(index, f"0{psi.n}b"),
                "re": float(value.real),
                "im": float(value.imag),
            }
        )
    return {"n": psi.n, "amplitudes": amps}


def state_to_text(psi: PureState, cutoff: float = 1e-14) -> str:
    lines = [f"# {psi.n}-qubit state"]
    for index in np.flatnonzero(np.abs(psi.vector) > cutoff):
        value = psi.vector[index]
        lines.append(f"{format(index, f'0{psi.n}b')} {value.real:+.16e} {value.imag:+.16e}")
    return "\n".join(lines) + "\n"
