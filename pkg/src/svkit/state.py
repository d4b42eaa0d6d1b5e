"""Dense state vector and the bitwise index-arithmetic gate engine.

The amplitude index convention throughout the package: qubit 0 is the most
significant bit of the amplitude index, so a gate on qubit ``q`` of an
``n``-qubit register couples amplitudes separated by ``2**(n - q - 1)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError

BIT_WIDTH = 64
UINT_MAX = (1 << BIT_WIDTH) - 1

# Masks are 64-bit; two index bits are headroom for pair/stride arithmetic.
MAX_QUBITS = 62

_DTYPES = {"f64": np.complex128, "f32": np.complex64}
_NORM_TOL = {"f64": 1e-12, "f32": 1e-5}


class StateVector:
    """2**n_qubits complex amplitudes plus qubit-count metadata.

    Freshly constructed instances hold |0...0>. ``precision`` selects the
    per-component float width: "f64" (complex128, default) or "f32"
    (complex64).
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits, precision="f64"):
        if precision not in _DTYPES:
            raise ValidationError(f"unknown precision {precision!r}; expected 'f64' or 'f32'")
        if not isinstance(n_qubits, (int, np.integer)) or n_qubits < 1:
            raise ValidationError(f"n_qubits must be a positive integer, got {n_qubits!r}")
        if n_qubits > MAX_QUBITS:
            raise CapacityError(f"n_qubits={n_qubits} exceeds the {MAX_QUBITS}-qubit addressing limit")
        try:
            amps = np.zeros(1 << n_qubits, dtype=_DTYPES[precision])
        except MemoryError as exc:
            raise CapacityError(f"cannot allocate 2**{n_qubits} amplitudes") from exc
        amps[0] = 1.0
        self.n_qubits = int(n_qubits)
        self.amplitudes = amps

    @classmethod
    def from_amplitudes(cls, amplitudes, copy=True):
        """Wrap an existing amplitude array; its length must be a power of two."""
        amps = np.asarray(amplitudes)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise ValidationError("amplitude array length must be a power of two >= 2")
        if amps.dtype == np.complex64:
            precision = "f32"
        else:
            precision = "f64"
            amps = amps.astype(np.complex128, copy=False)
        sv = cls.__new__(cls)
        sv.n_qubits = int(amps.size.bit_length() - 1)
        sv.amplitudes = amps.copy() if copy else amps
        if sv.n_qubits > MAX_QUBITS:
            raise CapacityError(f"{sv.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")
        _ = precision
        return sv

    @property
    def precision(self):
        return "f32" if self.amplitudes.dtype == np.complex64 else "f64"

    @property
    def dtype(self):
        return self.amplitudes.dtype

    def norm(self):
        """Euclidean norm of the amplitude vector (1 for a valid state)."""
        return float(np.linalg.norm(self.amplitudes))

    def copy(self):
        sv = StateVector.__new__(StateVector)
        sv.n_qubits = self.n_qubits
        sv.amplitudes = self.amplitudes.copy()
        return sv

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, precision={self.precision!r})"


def zero_state(n_qubits, precision="f64"):
    """|0...0> on ``n_qubits`` qubits."""
    return StateVector(n_qubits, precision)


def _check_qubit(q, n_qubits, label="qubit"):
    if not 0 <= q < n_qubits:
        raise ValidationError(f"{label} {q} out of range for {n_qubits}-qubit register")


@dataclass(frozen=True)
class MaskSet:
    """Disjoint bit masks partitioning the non-excluded window bits.

    ``masks[i]`` covers the run of bit positions between consecutive excluded
    offsets (below the first, strictly between neighbours, above the last,
    all clipped to the n_qubits-bit window). ``strides`` are ``1 << offset``
    for each excluded offset, in the same sorted order.
    """

    masks: tuple
    strides: tuple

    def expand(self, k):
        """Spread the bits of compact counter ``k`` into the non-excluded positions."""
        i0 = k & self.masks[0]
        for i in range(1, len(self.masks)):
            i0 |= (k << i) & self.masks[i]
        return i0

    def expand_array(self, ks):
        """Vectorized :meth:`expand` over a uint64 numpy array."""
        out = ks & np.uint64(self.masks[0])
        for i in range(1, len(self.masks)):
            out |= (ks << np.uint64(i)) & np.uint64(self.masks[i])
        return out


def get_masks(excluded_bit_offsets, n_qubits):
    """Build the n_excluded + 1 masks for enumerating indices with fixed bits.

    ``excluded_bit_offsets`` are bit positions (0 = least significant) removed
    from the enumeration window. Offsets must be distinct and inside
    ``[0, n_qubits)``.
    """
    bits = list(excluded_bit_offsets)
    if sorted(bits) != bits:
        bits = sorted(bits)
    if len(set(bits)) != len(bits):
        raise ValidationError(f"excluded bit offsets contain duplicates: {excluded_bit_offsets}")
    for b in bits:
        if not 0 <= b < n_qubits:
            raise ValidationError(f"excluded bit offset {b} outside [0, {n_qubits})")
    window = (1 << n_qubits) - 1
    if not bits:
        return MaskSet(masks=(window,), strides=())
    masks = [(1 << bits[0]) - 1]
    for prev, cur in zip(bits, bits[1:]):
        masks.append(((1 << cur) - 1) & ~((1 << (prev + 1)) - 1))
    masks.append(window & ~((1 << (bits[-1] + 1)) - 1))
    strides = tuple(1 << b for b in bits)
    return MaskSet(masks=tuple(masks), strides=strides)


def apply_single_qubit(sv, q, f):
    """Apply the coefficient interaction ``f`` to every (i0, i1) pair for qubit ``q``.

    Faithful per-pair formulation: the 2**(n-1) pairs are produced by the
    high/low mask split, with ``f(amplitudes, i0, i1)`` invoked exactly once
    per pair. All pairs are disjoint, so the loop order is immaterial.
    """
    n = sv.n_qubits
    _check_qubit(q, n)
    q_offset = n - q - 1
    stride = 1 << q_offset
    mask_high = (UINT_MAX << (q_offset + 1)) & UINT_MAX
    # A full-width shift is undefined for q_offset == 0; the low mask is empty there.
    mask_low = 0 if q_offset == 0 else UINT_MAX >> (BIT_WIDTH - q_offset)
    amps = sv.amplitudes
    for k in range(1 << (n - 1)):
        i0 = ((2 * k) & mask_high) | (mask_low & k)
        f(amps, i0, i0 | stride)


def _normalize_ctrl_values(ctrls, ctrl_values):
    if ctrl_values is None or (isinstance(ctrl_values, (tuple, list)) and len(ctrl_values) == 0 and len(ctrls) > 0):
        return (1,) * len(ctrls)
    if isinstance(ctrl_values, str):
        if not all(c in "01" for c in ctrl_values):
            raise ValidationError(f"control value string must be binary, got {ctrl_values!r}")
        values = tuple(int(c) for c in ctrl_values)
    else:
        values = tuple(int(v) for v in ctrl_values)
        if not all(v in (0, 1) for v in values):
            raise ValidationError(f"control values must be bits, got {ctrl_values!r}")
    if len(values) != len(ctrls):
        raise ValidationError(
            f"{len(ctrls)} controls but {len(values)} control values"
        )
    return values


def apply_controlled_single_qubit(sv, ctrls, q, f, ctrl_values=None):
    """Apply ``f`` on qubit ``q`` restricted to amplitudes whose control bits match.

    ``ctrl_values`` defaults to all ones; a bit string (``"10"`` or a sequence
    of 0/1) prescribes the required value per control. Exactly
    ``2**(n - 1 - n_ctrls)`` pairs are processed.
    """
    n = sv.n_qubits
    _check_qubit(q, n)
    ctrls = tuple(ctrls)
    if len(set(ctrls)) != len(ctrls):
        raise ValidationError(f"duplicate control qubits: {ctrls}")
    if q in ctrls:
        raise ValidationError(f"target qubit {q} overlaps controls {ctrls}")
    for c in ctrls:
        _check_qubit(c, n, "control")
    values = _normalize_ctrl_values(ctrls, ctrl_values)

    q_offset = n - q - 1
    stride = 1 << q_offset
    ctrl_offsets = [n - 1 - c for c in ctrls]
    mask_set = get_masks(sorted(ctrl_offsets + [q_offset]), n)
    on_bits = 0
    for off, v in zip(ctrl_offsets, values):
        if v:
            on_bits |= 1 << off
    masks = mask_set.masks
    n_masks = len(masks)
    amps = sv.amplitudes
    for k in range(1 << (n - 1 - len(ctrls))):
        i0 = k & masks[0]
        for i in range(1, n_masks):
            i0 |= (k << i) & masks[i]
        i0 |= on_bits
        f(amps, i0, i0 | stride)


def _check_wires(wires, n_qubits):
    wires = tuple(wires)
    if len(set(wires)) != len(wires):
        raise ValidationError(f"duplicate wires: {wires}")
    for w in wires:
        _check_qubit(w, n_qubits, "wire")
    return wires


def _wire_addresses(n_qubits, wires):
    """Address table for the 2**w basis blocks selected by ``wires``.

    Returns an array of shape (2**w, 2**(n-w)); row ``a`` holds the amplitude
    indices whose bits on ``wires`` spell ``a`` (wires[0] most significant)
    and whose remaining bits enumerate all values.
    """
    w = len(wires)
    offsets = [n_qubits - 1 - q for q in wires]
    mask_set = get_masks(sorted(offsets), n_qubits)
    ks = np.arange(1 << (n_qubits - w), dtype=np.uint64)
    base = mask_set.expand_array(ks)
    addr = np.empty((1 << w, base.size), dtype=np.uint64)
    for a in range(1 << w):
        off = 0
        for j, o in enumerate(offsets):
            if (a >> (w - 1 - j)) & 1:
                off |= 1 << o
        addr[a] = base | np.uint64(off)
    return addr


def _apply_matrix_small(sv, wires, matrix):
    addr = _wire_addresses(sv.n_qubits, wires)
    amps = sv.amplitudes
    sub = amps[addr]
    amps[addr] = matrix.astype(sv.dtype, copy=False) @ sub


def _apply_matrix_general(sv, wires, matrix):
    n = sv.n_qubits
    w = len(wires)
    rest = [q for q in range(n) if q not in wires]
    perm = list(wires) + rest
    t = np.transpose(sv.amplitudes.reshape((2,) * n), perm).reshape(1 << w, -1)
    res = matrix.astype(sv.dtype, copy=False) @ t
    inv = np.argsort(perm)
    sv.amplitudes.reshape((2,) * n)[...] = np.transpose(res.reshape((2,) * n), inv)


def apply_matrix(sv, wires, matrix, validate_unitary=False):
    """Contract a dense 2**w x 2**w matrix against the selected wires, in place.

    Wires are ordered: wires[0] addresses the most significant bit of the
    matrix's basis index. The matrix is not checked for unitarity unless
    ``validate_unitary`` is set (debug aid; gate application accepts
    arbitrary matrices).

    Dedicated gather/scatter paths handle 1- to 4-wire matrices; wider
    matrices go through a transpose-contract fallback.
    """
    wires = _check_wires(wires, sv.n_qubits)
    w = len(wires)
    matrix = np.asarray(matrix)
    if matrix.shape != (1 << w, 1 << w):
        raise ValidationError(
            f"matrix shape {matrix.shape} does not match {len(wires)} wires"
        )
    if validate_unitary:
        err = np.abs(matrix.conj().T @ matrix - np.eye(1 << w)).max()
        if err > 1e-10:
            raise ValidationError(f"matrix is not unitary (max deviation {err:.2e})")
    if w <= 4:
        _apply_matrix_small(sv, wires, matrix)
    else:
        _apply_matrix_general(sv, wires, matrix)
