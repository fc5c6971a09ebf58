"""Pure-numpy statevector kernels (fallback backend).

All functions mutate ``amps`` in place.  Qubit indices are 0-based bit
positions (bit 0 = least significant).  No validation happens here; the
callers own the contracts.
"""

import numpy as np

BACKEND = "numpy"


def apply_1q(amps, n, q, u):
    """Apply a 2x2 matrix ``u`` to bit position ``q`` of an n-qubit state."""
    lo = 1 << q
    a = amps.reshape(-1, 2, lo)
    a0 = a[:, 0, :].copy()
    a1 = a[:, 1, :]
    a[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    a[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_diag1q(amps, n, q, d0, d1):
    """Apply diag(d0, d1) to bit position ``q``."""
    a = amps.reshape(-1, 2, 1 << q)
    a[:, 0, :] *= d0
    a[:, 1, :] *= d1


def apply_2q(amps, n, qa, qb, u):
    """Apply a 4x4 matrix to bit positions (qa, qb); qa is the low bit of
    the 2-bit index, i.e. basis order (00, 01(bit qa set), 10, 11)."""
    dim = 1 << n
    ma, mb = 1 << qa, 1 << qb
    idx = np.arange(dim)
    base = idx[(idx & ma == 0) & (idx & mb == 0)]
    cols = np.stack([base, base | ma, base | mb, base | ma | mb])
    block = amps[cols]
    amps[cols] = u @ block


def apply_phase2q(amps, n, qa, qb, phases):
    """Multiply the four (qa, qb) sectors by ``phases`` (length 4, order as
    in :func:`apply_2q`)."""
    dim = 1 << n
    idx = np.arange(dim)
    key = ((idx >> qa) & 1) | (((idx >> qb) & 1) << 1)
    amps *= np.asarray(phases)[key]


def expect_z(amps, n, q):
    """<Z_q> with Z = diag(-1, +1) in bit order (bit 0 = -1 eigenstate)."""
    p = np.abs(amps.reshape(-1, 2, 1 << q)) ** 2
    return float(p[:, 1, :].sum() - p[:, 0, :].sum())


def bit_prob(amps, n, q):
    """Probability that bit ``q`` is 1."""
    a = amps.reshape(-1, 2, 1 << q)
    return float(np.abs(a[:, 1, :]).__pow__(2).sum())


def parity_even_prob(amps, n, qa, qb):
    """Probability that bits qa and qb are equal."""
    dim = 1 << n
    idx = np.arange(dim)
    even = ((idx >> qa) ^ (idx >> qb)) & 1 == 0
    return float((np.abs(amps[even]) ** 2).sum())


def project_mask(amps, mask):
    """Zero out amplitudes where ``mask`` is False; return the pre-projection
    probability of the kept subspace.  Does not renormalize."""
    prob = float((np.abs(amps[mask]) ** 2).sum())
    amps[~mask] = 0.0
    return prob
