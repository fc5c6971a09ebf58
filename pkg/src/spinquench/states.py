"""Exact statevector engine for registers of up to 10 spin qubits.

Spin/bit convention (used by every module in this package)
-----------------------------------------------------------
* basis bit 0 = |down>, bit 1 = |up>;
* qubit label k (1-based, counted from the left end of the array) lives at
  bit position k-1, bit 0 least significant, so ``|up,down>`` on a 2-qubit
  register is basis index 1;
* Pauli Z is represented as ``diag(-1, +1)`` in this bit order, i.e.
  ``Z|down> = -|down>``.

The Z sign INVERTS the usual quantum-information convention
(``Z|0> = +|0>``).  It is chosen so that the all-down state is the ground
state of ``H0 = h * sum_i Z_i`` with ``h > 0``, which is the natural frame
for the quench protocol this package simulates.  X is the standard bit
flip; Y is fixed by ``XY = iZ`` and therefore also carries a sign flip
relative to the textbook matrix.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, NonUnitaryError, ZeroProbabilityError

MAX_QUBITS = 10

DOWN, UP = 0, 1

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
PAULI_Z = np.array([[-1, 0], [0, 1]], dtype=complex)

_UNITARY_ATOL = 1e-10


@dataclass
class StateVector:
    """Complex amplitudes of an n-qubit register (length ``2**n_qubits``)."""

    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self):
        return 1 << self.n_qubits

    def copy(self):
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


def basis_state(n, bits):
    """State with amplitude 1 on the basis index encoding ``bits``.

    ``bits[k]`` is the state of qubit k+1 (0 = down, 1 = up).
    """
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")
    if len(bits) != n:
        raise DimensionError(f"expected {n} bits, got {len(bits)}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[bits_to_index(bits)] = 1.0
    return StateVector(n, amps)


def bits_to_index(bits):
    """Basis index for a bit list (qubit 1 = bit 0 = least significant)."""
    idx = 0
    for k, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {b!r}")
        idx |= b << k
    return idx


def index_to_bits(idx, n):
    return [(idx >> k) & 1 for k in range(n)]


def all_down(n):
    """|down>^n, the quench protocol's initial state."""
    return basis_state(n, [DOWN] * n)


def _check_qubit(s, q):
    if not 1 <= q <= s.n_qubits:
        raise DimensionError(f"qubit {q} outside register 1..{s.n_qubits}")


def _check_unitary(u, shape, atol):
    u = np.asarray(u, dtype=complex)
    if u.shape != shape:
        raise DimensionError(f"expected {shape} matrix, got {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(shape[0])))
    if dev > atol:
        raise NonUnitaryError(f"matrix deviates from unitarity by {dev:.3e} (atol {atol:.1e})")
    return u


def apply_1q(s, u, q, atol=_UNITARY_ATOL):
    """Apply a single-qubit unitary to qubit ``q``; returns a new state."""
    _check_qubit(s, q)
    u = _check_unitary(u, (2, 2), atol)
    out = s.copy()
    kernels.apply_1q(out.amplitudes, out.n_qubits, q - 1, u)
    return out


def apply_2q(s, u, q1, q2, atol=_UNITARY_ATOL):
    """Apply a two-qubit unitary; basis order of ``u`` is
    (q1 q2) = (down down, up down, down up, up up)."""
    _check_qubit(s, q1)
    _check_qubit(s, q2)
    if q1 == q2:
        raise DimensionError("two-qubit gate needs distinct qubits")
    u = _check_unitary(u, (4, 4), atol)
    out = s.copy()
    kernels.apply_2q(out.amplitudes, out.n_qubits, q1 - 1, q2 - 1, u)
    return out


def apply_controlled_phase(s, q1, q2, phases):
    """Apply diag(phases) on the (q1, q2) sectors, basis order as in
    :func:`apply_2q`.  Each phase must have unit modulus."""
    _check_qubit(s, q1)
    _check_qubit(s, q2)
    if q1 == q2:
        raise DimensionError("controlled phase needs distinct qubits")
    phases = np.asarray(phases, dtype=complex)
    if phases.shape != (4,):
        raise DimensionError("expected 4 phases")
    if np.max(np.abs(np.abs(phases) - 1.0)) > _UNITARY_ATOL:
        raise NonUnitaryError("controlled-phase entries must have unit modulus")
    out = s.copy()
    kernels.apply_phase2q(out.amplitudes, out.n_qubits, q1 - 1, q2 - 1, phases)
    return out


def inner_product(a, b):
    """<a|b>, conjugate-linear in the first argument."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("inner product needs equal register sizes")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation_z(s, q):
    """<Z_q> in [-1, 1]; -1 for |down>, +1 for |up>."""
    _check_qubit(s, q)
    return kernels.expect_z(s.amplitudes, s.n_qubits, q - 1)


# ---------------------------------------------------------------------------
# Diagonal projectors, given as boolean masks over basis indices.

def mask_qubit(n, q, bit):
    """Mask selecting basis states where qubit ``q`` is in ``bit``."""
    idx = np.arange(1 << n)
    return ((idx >> (q - 1)) & 1) == bit


def mask_pair_parity(n, q1, q2, even):
    """Mask selecting even (bits equal) or odd (bits differ) pair states."""
    idx = np.arange(1 << n)
    differ = ((idx >> (q1 - 1)) ^ (idx >> (q2 - 1))) & 1
    return differ == (0 if even else 1)


def mask_basis(n, bits):
    """Mask selecting the single basis state ``bits``."""
    m = np.zeros(1 << n, dtype=bool)
    m[bits_to_index(bits)] = True
    return m


def project(s, mask, renormalize=True):
    """Project onto the diagonal subspace selected by ``mask``.

    Returns ``(probability, state)``.  With ``renormalize`` the state is
    scaled back to unit norm; a zero-probability projection then raises
    :class:`ZeroProbabilityError` instead of yielding NaNs.  Without
    ``renormalize`` the unnormalized projected state is returned.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (s.dim,):
        raise DimensionError("mask length must equal the state dimension")
    out = s.copy()
    prob = kernels.project_mask(out.amplitudes, mask)
    if renormalize:
        if prob <= 0.0:
            raise ZeroProbabilityError("projection has zero probability")
        out.amplitudes /= np.sqrt(prob)
    return prob, out


# ---------------------------------------------------------------------------
# Rotation matrices in this package's Pauli convention.

def rx_matrix(theta):
    """exp(-i theta X / 2)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta):
    """exp(-i theta Y / 2) = [[c, s], [-s, c]] in this Y convention."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rz_matrix(theta):
    """exp(-i theta Z / 2) = diag(e^{+i theta/2}, e^{-i theta/2})."""
    return np.array([[np.exp(0.5j * theta), 0], [0, np.exp(-0.5j * theta)]])
