"""Parity-mode spin-blockade readout, QND measurement and post-selected
initialization.

Collapse rules
--------------
A parity measurement on a pair reports 1 for even (parallel spins) and 0
for odd.  An even outcome projects onto the even subspace of the pair,
keeping all coherence inside it.  An odd outcome projects onto the odd
subspace and then, with ``relax_probability``, relaxes to the pair's
resting product state (up-down for the left pair, down-up for the right
pair) regardless of the pre-measurement state; the relaxation is unraveled
as an internal computational-basis collapse of the pair followed by a
relabeling, so remainders of entangled registers stay well defined.

Readout errors, when enabled, flip the *reported* bit with a symmetric
probability; the post-measurement state always follows the true outcome.

Every readout sequence is written once, against an executor interface, and
can run in two modes: sampled (one stochastic path per shot) or exact
(depth-first enumeration of all outcome paths with their Born
probabilities).  The exact mode is what makes the noiseless oracle
comparisons in the experiments module bit-tight.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .circuits import CZ, RY, RZ, UZZ_PHASES, DeviceParams, compile_cnot
from .errors import SpinQuenchError, ZeroProbabilityError
from .states import (DOWN, UP, basis_state, mask_pair_parity, mask_qubit,
                     project, rx_matrix, ry_matrix, rz_matrix)

_PRUNE = 1e-14

EVEN, ODD = 1, 0  # reported parity bits


@dataclass(frozen=True)
class PsbPairSpec:
    """One readout pair and its odd-outcome relaxation target."""

    pair: tuple
    odd_collapse_target: tuple  # bits aligned with `pair`, odd parity
    relax_probability: float = 1.0

    def __post_init__(self):
        if len(self.pair) != 2 or self.pair[0] == self.pair[1]:
            raise SpinQuenchError("pair must be two distinct qubits")
        if (self.odd_collapse_target[0] ^ self.odd_collapse_target[1]) != 1:
            raise SpinQuenchError("odd_collapse_target must have odd parity")
        if not 0.0 <= self.relax_probability <= 1.0:
            raise SpinQuenchError("relax_probability must be in [0, 1]")


@dataclass(frozen=True)
class MeasurementRecord:
    label: str
    bit: int
    target: tuple


@dataclass
class ReadoutLayout:
    """Which pairs feed the sensors and how the inner qubits are proxied.

    ``qnd`` maps an inner qubit to (ancilla qubit, pair key); the QND round
    is reference parity - CROT - second parity, with bit 1 meaning the
    target is down.  ``flip_prob`` injects a symmetric readout bit-flip.
    """

    pairs: dict = field(default_factory=dict)
    qnd: dict = field(default_factory=dict)
    n_qubits: int = 6
    qnd_repeats: int = 1
    conditional_flip: bool = True
    flip_prob: float = 0.0

    def __post_init__(self):
        if self.qnd_repeats < 1 or self.qnd_repeats % 2 == 0:
            raise SpinQuenchError("qnd_repeats must be odd and >= 1")


def default_layout(**overrides):
    """The 6-qubit layout: sensors on pairs (1,2) and (5,6), QND of qubit 3
    via qubit 2 and of qubit 4 via qubit 5."""
    layout = ReadoutLayout(
        pairs={
            (1, 2): PsbPairSpec((1, 2), (UP, DOWN)),
            (5, 6): PsbPairSpec((5, 6), (DOWN, UP)),
        },
        qnd={3: (2, (1, 2)), 4: (5, (5, 6))},
        n_qubits=6,
    )
    for k, v in overrides.items():
        setattr(layout, k, v)
    return layout


# ---------------------------------------------------------------------------
# Collapse primitive.

def psb_outcomes(state, spec, flip_prob=0.0):
    """All outcome branches of one parity measurement.

    Returns a list of ``(probability, reported_bit, post_state)``; branches
    below a pruning threshold are dropped.
    """
    q1, q2 = spec.pair
    n = state.n_qubits
    branches = []

    p_even = kernels.parity_even_prob(state.amplitudes, n, q1 - 1, q2 - 1)
    if p_even > _PRUNE:
        _, even_state = project(state, mask_pair_parity(n, q1, q2, even=True))
        branches.append((p_even, EVEN, even_state))

    p_odd = 1.0 - p_even
    if p_odd > _PRUNE:
        relax = spec.relax_probability
        if relax < 1.0:
            _, odd_state = project(state, mask_pair_parity(n, q1, q2, even=False))
            branches.append((p_odd * (1.0 - relax), ODD, odd_state))
        if relax > 0.0:
            # Internal basis collapse of the pair, then relabel to the
            # relaxation target (incoherent, no pulse phase).
            for cfg in ((UP, DOWN), (DOWN, UP)):
                mask = mask_qubit(n, q1, cfg[0]) & mask_qubit(n, q2, cfg[1])
                p_cfg, cfg_state = _project_prob(state, mask)
                if p_cfg <= _PRUNE:
                    continue
                for q, have, want in ((q1, cfg[0], spec.odd_collapse_target[0]),
                                      (q2, cfg[1], spec.odd_collapse_target[1])):
                    if have != want:
                        cfg_state = _relabel_flip(cfg_state, q)
                branches.append((p_cfg * relax, ODD, cfg_state))

    if flip_prob > 0.0:
        flipped = [(p * flip_prob, 1 - bit, st) for p, bit, st in branches]
        branches = [(p * (1.0 - flip_prob), bit, st) for p, bit, st in branches]
        branches += [b for b in flipped if b[0] > _PRUNE]
    return branches


def _project_prob(state, mask):
    out = state.copy()
    prob = kernels.project_mask(out.amplitudes, np.asarray(mask, dtype=bool))
    if prob > 0.0:
        out.amplitudes /= np.sqrt(prob)
    return prob, out


def _relabel_flip(state, q):
    out = state.copy()
    kernels.apply_1q(out.amplitudes, out.n_qubits, q - 1,
                     np.array([[0, 1], [1, 0]], dtype=complex))
    return out


def psb_measure(state, spec, rng, flip_prob=0.0):
    """Sample one parity measurement; returns (bit, post_state)."""
    branches = psb_outcomes(state, spec, flip_prob)
    if not branches:
        raise ZeroProbabilityError("no outcome branch has support")
    probs = np.array([b[0] for b in branches])
    k = rng.choice(len(branches), p=probs / probs.sum())
    return branches[k][1], branches[k][2]


# ---------------------------------------------------------------------------
# Gates used inside the readout sequences.

def _crot_matrix():
    """X(pi) on the ancilla conditioned on the target being up; basis order
    (target, ancilla) = (dd, ud, du, uu)."""
    m = np.eye(4, dtype=complex)
    m[1, 1] = m[3, 3] = 0.0
    m[3, 1] = m[1, 3] = -1j  # X(pi) = -iX
    return m


_CROT = _crot_matrix()


def _apply_crot(state, target, ancilla):
    out = state.copy()
    kernels.apply_2q(out.amplitudes, out.n_qubits, target - 1, ancilla - 1, _CROT)
    return out


def _apply_pi_pulse(state, q):
    out = state.copy()
    kernels.apply_1q(out.amplitudes, out.n_qubits, q - 1, rx_matrix(np.pi))
    return out


def _apply_native_ops(state, ops):
    out = state.copy()
    amps, n = out.amplitudes, out.n_qubits
    for op in ops:
        if op.kind == RY:
            kernels.apply_1q(amps, n, op.qubits[0] - 1, ry_matrix(op.angle))
        elif op.kind == RZ:
            kernels.apply_1q(amps, n, op.qubits[0] - 1, rz_matrix(op.angle))
        elif op.kind == CZ:
            kernels.apply_phase2q(amps, n, op.qubits[0] - 1, op.qubits[1] - 1,
                                  np.asarray(UZZ_PHASES))
        else:
            raise SpinQuenchError(f"unexpected op in readout sequence: {op.kind}")
    return out


# ---------------------------------------------------------------------------
# Executors: one cascade implementation, two evaluation modes.

class _Fork(Exception):
    def __init__(self, options):
        self.options = options


class _SampledExecutor:
    def __init__(self, state, rng, flip_prob):
        self.state = state
        self.rng = rng
        self.flip_prob = flip_prob
        self.bits = {}
        self.derived = {}

    def measure(self, spec, label):
        bit, self.state = psb_measure(self.state, spec, self.rng, self.flip_prob)
        self.bits[label] = bit
        return bit

    def gate(self, fn):
        self.state = fn(self.state)


class _ScriptedExecutor:
    """Replays a fixed outcome script; raises _Fork at the first unscripted
    measurement so the driver can enumerate all paths depth first."""

    def __init__(self, state, script, flip_prob):
        self.state = state
        self.script = script
        self.flip_prob = flip_prob
        self.cursor = 0
        self.prob = 1.0
        self.bits = {}
        self.derived = {}

    def measure(self, spec, label):
        branches = psb_outcomes(self.state, spec, self.flip_prob)
        if self.cursor >= len(self.script):
            raise _Fork(list(range(len(branches))))
        p, bit, st = branches[self.script[self.cursor]]
        self.cursor += 1
        self.prob *= p
        self.state = st
        self.bits[label] = bit
        return bit

    def gate(self, fn):
        self.state = fn(self.state)


def enumerate_paths(cascade, state, flip_prob=0.0):
    """Run ``cascade(executor)`` over every outcome path.

    Returns a list of ``(probability, bits, derived, final_state)`` tuples
    covering all paths with nonvanishing probability.
    """
    results = []
    stack = [()]
    while stack:
        script = stack.pop()
        ex = _ScriptedExecutor(state, script, flip_prob)
        try:
            cascade(ex)
        except _Fork as fork:
            stack.extend(script + (k,) for k in fork.options)
            continue
        results.append((ex.prob, ex.bits, ex.derived, ex.state))
    return results


# ---------------------------------------------------------------------------
# Cascades.

def _qnd_cascade(ex, layout, target, prefix=""):
    """Reference parity, CROT, second parity; majority vote over repeats.
    Bit 1 means the target qubit is down (parity unchanged)."""
    ancilla, pair_key = layout.qnd[target]
    spec = layout.pairs[pair_key]
    votes = 0
    for r in range(layout.qnd_repeats):
        ref = ex.measure(spec, f"{prefix}qnd{target}_ref{r}")
        ex.gate(lambda s, t=target, a=ancilla: _apply_crot(s, t, a))
        second = ex.measure(spec, f"{prefix}qnd{target}_sec{r}")
        votes += 1 if ref == second else 0
    bit = 1 if 2 * votes > layout.qnd_repeats else 0
    ex.derived[f"{prefix}qnd{target}"] = bit
    return bit


def _pair_block_cascade(ex, layout, pair_key, device, with_cnot_md=True, prefix=""):
    """M_C, then (optionally) compiled CNOT and M_D, the conditional flip of
    the outer qubit, and the QND readout of the inner proxy target."""
    spec = layout.pairs[pair_key]
    outer, inner = _outer_inner(layout, pair_key)
    tag = f"{pair_key[0]}{pair_key[1]}"
    mc = ex.measure(spec, f"{prefix}mc{tag}")
    last_parity = mc
    if with_cnot_md:
        ops = compile_cnot(inner, outer, device.j_of(pair_key), device.t_pi(outer))
        ex.gate(lambda s, ops=ops: _apply_native_ops(s, ops))
        md = ex.measure(spec, f"{prefix}md{tag}")
        ex.derived[f"{prefix}mdd{tag}"] = mc & md
        last_parity = md
    if layout.conditional_flip and last_parity == EVEN:
        ex.gate(lambda s, q=outer: _apply_pi_pulse(s, q))
    for target, (_, pk) in layout.qnd.items():
        if pk == pair_key:
            _qnd_cascade(ex, layout, target, prefix)


def _outer_inner(layout, pair_key):
    """The inner qubit is the QND ancilla of the pair; the outer one faces
    the sensor edge."""
    inner = next((anc for anc, pk in layout.qnd.values() if pk == pair_key),
                 max(pair_key))
    outer = pair_key[0] if pair_key[1] == inner else pair_key[1]
    return outer, inner


def _readout_cascade(ex, layout, device, with_cnot_md=True):
    for pair_key in sorted(layout.pairs):
        _pair_block_cascade(ex, layout, pair_key, device, with_cnot_md)


def _init_cascade(ex, layout):
    """Initialization by measurement: QND on the inner qubits post-selected
    down with the second parity odd, pi flips on the outer qubits, then
    confirming even parities."""
    for target in sorted(layout.qnd):
        _, pair_key = layout.qnd[target]
        tag = f"{pair_key[0]}{pair_key[1]}"
        _qnd_cascade(ex, layout, target, prefix="init_")
        second = ex.bits[f"init_qnd{target}_sec{layout.qnd_repeats - 1}"]
        ex.derived[f"init_b_odd{tag}"] = 1 if second == ODD else 0
    for pair_key in sorted(layout.pairs):
        outer, _ = _outer_inner(layout, pair_key)
        ex.gate(lambda s, q=outer: _apply_pi_pulse(s, q))
    for pair_key in sorted(layout.pairs):
        tag = f"{pair_key[0]}{pair_key[1]}"
        ex.measure(layout.pairs[pair_key], f"init_confirm{tag}")


def _init_retained(ex_bits, ex_derived, layout):
    for target in sorted(layout.qnd):
        _, pair_key = layout.qnd[target]
        tag = f"{pair_key[0]}{pair_key[1]}"
        if ex_derived[f"init_qnd{target}"] != 1:
            return False
        if ex_derived[f"init_b_odd{tag}"] != 1:
            return False
    for pair_key in sorted(layout.pairs):
        tag = f"{pair_key[0]}{pair_key[1]}"
        if ex_bits[f"init_confirm{tag}"] != EVEN:
            return False
    return True


# ---------------------------------------------------------------------------
# Public operations.

def qnd_measure(state, target, layout, rng, repeats=None):
    """QND readout of an inner qubit through its ancilla pair; returns
    (bit, post_state) with bit 1 meaning down."""
    if repeats is not None:
        layout = replace(layout, qnd_repeats=repeats)
    ex = _SampledExecutor(state, rng, layout.flip_prob)
    bit = _qnd_cascade(ex, layout, target)
    return bit, ex.state


def m_downdown_sequence(state, pair_key, layout, rng, device=None):
    """M_C, compiled CNOT (control = inner qubit, target = outer), M_D.
    Returns (bit, post_state, (mc, md)); bit = mc AND md selects the pair
    component where both qubits are down."""
    device = device or DeviceParams()
    spec = layout.pairs[pair_key]
    outer, inner = _outer_inner(pair_key)
    tag = f"{pair_key[0]}{pair_key[1]}"
    ex = _SampledExecutor(state, rng, layout.flip_prob)
    mc = ex.measure(spec, f"mc{tag}")
    ops = compile_cnot(inner, outer, device.j_of(pair_key), device.t_pi(outer))
    ex.gate(lambda s: _apply_native_ops(s, ops))
    md = ex.measure(spec, f"md{tag}")
    return mc & md, ex.state, (mc, md)


def readout_all(state, layout, rng, device=None, with_cnot_md=True):
    """Full readout sequence; returns (records, derived, post_state).

    Derived bits: ``mdd12``, ``qnd3``, ``qnd4``, ``mdd56`` (full mode), and
    the all-down indicator over all six qubits as ``indicator``.
    """
    device = device or DeviceParams()
    ex = _SampledExecutor(state, rng, layout.flip_prob)
    _readout_cascade(ex, layout, device, with_cnot_md)
    records = [MeasurementRecord(k, v, ()) for k, v in ex.bits.items()]
    if with_cnot_md:
        ex.derived["indicator"] = int(all(
            ex.derived[name] == 1 for name in ("mdd12", "qnd3", "qnd4", "mdd56")))
    return records, ex.derived, ex.state


def initialize_by_postselection(raw, layout, rng):
    """Run the measurement-based initialization; returns (retained, state).

    Retained shots are exactly the all-down register under ideal operation.
    ``raw`` is the pre-initialization state, by default the resting state
    left by a previous readout (outer pairs odd, inner qubits down).
    """
    ex = _SampledExecutor(raw, rng, layout.flip_prob)
    _init_cascade(ex, layout)
    return _init_retained(ex.bits, ex.derived, layout), ex.state


def resting_input():
    """|up,down,down,down,down,up>: the post-selected post-measurement state
    the initialization sequence expects; a retained init maps it to
    all-down with certainty under ideal operations."""
    return basis_state(6, [UP, DOWN, DOWN, DOWN, DOWN, UP])


def thermal_input(rng, n=6):
    """A uniformly random computational basis state, the maximally mixed
    register unraveled one shot at a time."""
    return basis_state(n, list(rng.integers(0, 2, size=n)))


def indicator_bit_names(combo):
    """Derived bits certifying that every qubit in ``combo`` is down."""
    names = []
    if any(q in (1, 2) for q in combo):
        names.append("mdd12")
    if 3 in combo:
        names.append("qnd3")
    if 4 in combo:
        names.append("qnd4")
    if any(q in (5, 6) for q in combo):
        names.append("mdd56")
    return names


def indicator_probability(state, combo, layout=None, device=None):
    """Exact probability that the readout certifies all-down on ``combo``,
    marginalizing every other outcome (branch enumeration)."""
    from .circuits import DeviceParams
    layout = layout or default_layout()
    device = device or DeviceParams()
    needed = indicator_bit_names(combo)
    total = 0.0
    for prob, _, derived, _ in enumerate_paths(
            lambda ex: _readout_cascade(ex, layout, device, True),
            state, layout.flip_prob):
        if all(derived[name] == 1 for name in needed):
            total += prob
    return total


def magnetization_value(bits, derived, combo):
    """Z estimate per qubit from the parity/QND bits, averaged over the
    combo; bit 1 (even / down) maps to Z = -1."""
    z = {}
    if "mc12" in bits:
        z[2] = 1 - 2 * bits["mc12"]
    if "mc56" in bits:
        z[5] = 1 - 2 * bits["mc56"]
    for q in (3, 4):
        if f"qnd{q}" in derived:
            z[q] = 1 - 2 * derived[f"qnd{q}"]
    return float(np.mean([z[q] for q in combo]))


def magnetization_expectation(state, combo, layout=None, device=None):
    """Exact expectation of the magnetization estimator over the readout
    sequence without the CNOT+M_D stage."""
    from .circuits import DeviceParams
    layout = layout or default_layout()
    device = device or DeviceParams()
    if any(q in (1, 6) for q in combo):
        raise SpinQuenchError("magnetization readout needs combos within qubits 2..5")
    acc = 0.0
    for prob, bits, derived, _ in enumerate_paths(
            lambda ex: _readout_cascade(ex, layout, device, False),
            state, layout.flip_prob):
        acc += prob * magnetization_value(bits, derived, combo)
    return acc


def init_retention_probability(raw, layout=None):
    """Exact retention probability of the initialization sequence."""
    layout = layout or default_layout()
    total = 0.0
    for prob, bits, derived, _ in enumerate_paths(
            lambda ex: _init_cascade(ex, layout), raw, layout.flip_prob):
        if _init_retained(bits, derived, layout):
            total += prob
    return total


@dataclass(frozen=True)
class AndBiasReport:
    p: float
    q: float
    product: float
    min_pq: float
    strict: bool


def and_bias_check(p, q):
    """P11 = p*q for independent readouts; the AND never exceeds min(p, q)
    and is strictly below it when both are below 1."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise SpinQuenchError("probabilities must lie in [0, 1]")
    product = p * q
    strict = p < 1.0 and q < 1.0 and min(p, q) > 0.0
    if product > min(p, q) + 1e-15:
        raise SpinQuenchError("AND bias violated; arithmetic is broken")
    return AndBiasReport(p, q, product, min(p, q), strict)
