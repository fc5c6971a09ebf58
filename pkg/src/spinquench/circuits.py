"""Circuit IR, quench-circuit constructors, CNOT compilation and oracles.

Operator-order convention: circuit op lists are time ordered (first element
acts first).  Right-to-left operator products from the usual algebraic
notation are reversed exactly once, inside :func:`build_quench` and
:func:`compile_cnot`, and nowhere else.

The native gate set is RX/RY (microwave drives), RZ (virtual, zero
duration), CZ (exchange window) and IDLE (explicit wait).  The CZ op's
matrix is the bare exchange phase accumulated over the interaction time
``pi*hbar/J``; together with the -pi/2 virtual-Z corrections emitted by
:func:`compile_cnot` it realizes the textbook ``diag(1,1,1,-1)`` gate.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, SpinQuenchError
from .states import MAX_QUBITS, PAULI_X, rx_matrix, ry_matrix, rz_matrix

RX, RY, RZ, CZ, CNOT, IDLE = "RX", "RY", "RZ", "CZ", "CNOT", "IDLE"

KINDS = (RX, RY, RZ, CZ, CNOT, IDLE)

# Exchange phase over t = pi*hbar/J: exp(+i pi/4 Z.Z) in this package's
# Z = diag(-1,+1) convention.  diag entries in (q1, q2) sector order
# (down down, up down, down up, up up).
UZZ_PHASES = (
    np.exp(0.25j * np.pi),
    np.exp(-0.25j * np.pi),
    np.exp(-0.25j * np.pi),
    np.exp(0.25j * np.pi),
)

CZ_IDEAL_PHASES = (1.0, 1.0, 1.0, -1.0)


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple
    angle: float = 0.0
    duration: float = 0.0  # ns

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpinQuenchError(f"unknown gate kind {self.kind!r}")
        if self.kind in (CZ, CNOT) and len(self.qubits) != 2:
            raise DimensionError(f"{self.kind} needs 2 qubits")
        if self.kind in (RX, RY, RZ, IDLE) and len(self.qubits) != 1:
            raise DimensionError(f"{self.kind} needs 1 qubit")


@dataclass(frozen=True)
class DeviceParams:
    """Gate-duration configuration.

    Defaults are illustrative mid-range values (pi-pulse 170 ns, exchange
    1.25 MHz giving a 400 ns CZ window); real devices vary per qubit and
    per pair, so both accept per-label maps.
    """

    t_pi_ns: dict = field(default_factory=dict)
    default_t_pi_ns: float = 170.0
    j_hz: dict = field(default_factory=dict)
    default_j_hz: float = 1.25e6

    def t_pi(self, q):
        return float(self.t_pi_ns.get(q, self.default_t_pi_ns))

    def j_of(self, pair):
        j = self.j_hz.get(tuple(sorted(pair)), self.default_j_hz)
        if j <= 0:
            raise SpinQuenchError(f"exchange J must be positive, got {j}")
        return float(j)

    def cz_duration_ns(self, pair):
        # t = pi*hbar/J with J = h * f_J  =>  t = 1/(2 f_J)
        return 1e9 / (2.0 * self.j_of(pair))

    def drive_duration_ns(self, q, angle):
        return abs(angle) / math.pi * self.t_pi(q)


def rx_op(q, angle, device):
    return GateOp(RX, (q,), angle, device.drive_duration_ns(q, angle))


def ry_op(q, angle, device):
    return GateOp(RY, (q,), angle, device.drive_duration_ns(q, angle))


def rz_op(q, angle):
    return GateOp(RZ, (q,), angle, 0.0)  # virtual phase update


def cz_op(q1, q2, device):
    return GateOp(CZ, (q1, q2), 0.0, device.cz_duration_ns((q1, q2)))


def idle_op(q, duration_ns):
    return GateOp(IDLE, (q,), 0.0, duration_ns)


@dataclass
class Circuit:
    n_qubits: int
    ops: list

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DimensionError(f"n_qubits must be in 1..{MAX_QUBITS}")
        for op in self.ops:
            if max(op.qubits) > self.n_qubits:
                raise DimensionError(f"op {op} outside register of {self.n_qubits}")

    def schedule(self):
        """(start, end) per op in ns under strictly sequential execution."""
        out, t = [], 0.0
        for op in self.ops:
            out.append((t, t + op.duration))
            t += op.duration
        return out

    @property
    def total_duration(self):
        return sum(op.duration for op in self.ops)

    def busy_times(self):
        busy = {q: 0.0 for q in range(1, self.n_qubits + 1)}
        for op in self.ops:
            if op.kind == IDLE:
                continue  # a wait marker keeps its qubit idle
            for q in op.qubits:
                busy[q] += op.duration
        return busy

    def gate_count(self, kind):
        return sum(1 for op in self.ops if op.kind == kind)


def idle_times(circuit):
    """Per-qubit idle time: total duration minus time spent in ops touching
    the qubit.  Satisfies idle(q) + busy(q) = total for every q."""
    total = circuit.total_duration
    return {q: total - b for q, b in circuit.busy_times().items()}


def compile_cnot(control, target, j_hz, t_pi_ns):
    """Native decomposition of CNOT via the exchange CZ.

    Returns, in time order, Y_t(pi/2), the -pi/2 virtual-Z corrections on
    both qubits, the exchange window of duration pi*hbar/J = 1/(2 f_J), and
    Y_t(-pi/2).  The composed unitary equals CNOT up to a global phase.  No
    Hadamard primitive appears: H = Y(-pi/2) Z = Z Y(pi/2) and the Z factors
    commute through the CZ and cancel.
    """
    if j_hz <= 0:
        raise SpinQuenchError(f"exchange J must be positive, got {j_hz}")
    t_pi = t_pi_ns.get(target, 170.0) if isinstance(t_pi_ns, dict) else float(t_pi_ns)
    return [
        GateOp(RY, (target,), np.pi / 2, t_pi / 2),
        rz_op(control, -np.pi / 2),
        rz_op(target, -np.pi / 2),
        GateOp(CZ, (control, target), 0.0, 1e9 / (2.0 * j_hz)),
        GateOp(RY, (target,), -np.pi / 2, t_pi / 2),
    ]


@dataclass(frozen=True)
class QuenchSpec:
    """Which quench circuit to build and on which physical qubits.

    ``combo`` is an ordered window of contiguous neighbors, forward or
    reverse; logical circuit qubit k acts on ``combo[k-1]``.
    """

    n: int
    variant: str = "simplified"
    combo: tuple = None
    register: int = None

    def __post_init__(self):
        if not 2 <= self.n <= MAX_QUBITS:
            raise DimensionError(f"quench size must be in 2..{MAX_QUBITS}, got {self.n}")
        if self.variant not in ("simplified", "full", "extended"):
            raise SpinQuenchError(f"unknown variant {self.variant!r}")
        combo = self.combo if self.combo is not None else tuple(range(1, self.n + 1))
        combo = tuple(combo)
        if len(combo) != self.n:
            raise SpinQuenchError(f"combo {combo} does not match N={self.n}")
        steps = {combo[i + 1] - combo[i] for i in range(len(combo) - 1)}
        if steps not in ({1}, {-1}):
            raise SpinQuenchError(f"combo {combo} is not a contiguous forward/reverse window")
        object.__setattr__(self, "combo", combo)
        register = self.register if self.register is not None else max(combo)
        if register < max(combo):
            raise DimensionError(f"register {register} too small for combo {combo}")
        object.__setattr__(self, "register", register)


def build_quench(spec, theta, device=None):
    """Quench circuit for one evolution angle ``theta``.

    Time order of the simplified variant: RX(theta) on logical qubits 1 and
    N, the CNOT staircase (i, i+1) for i = 1..N-1, then RX(theta) on
    1..N-1.  The full variant appends the staircase in reverse, which makes
    the circuit equal to exp(-i theta/2 (sum XX + X_1 + X_N)) exactly.  The
    'extended' variant is the initial-state-independent form; its boundary
    extension block is precisely the reversed staircase, so it compiles to
    the same op list as 'full'.
    """
    device = device or DeviceParams()
    n, combo = spec.n, spec.combo
    q = {k: combo[k - 1] for k in range(1, n + 1)}  # logical -> physical

    cnot_dur = {}
    for i in range(1, n):
        pair = (q[i], q[i + 1])
        cnot_dur[i] = device.t_pi(q[i + 1]) + device.cz_duration_ns(pair)

    ops = [rx_op(q[1], theta, device), rx_op(q[n], theta, device)]
    ops += [GateOp(CNOT, (q[i], q[i + 1]), 0.0, cnot_dur[i]) for i in range(1, n)]
    ops += [rx_op(q[i], theta, device) for i in range(1, n)]
    if spec.variant in ("full", "extended"):
        ops += [GateOp(CNOT, (q[i], q[i + 1]), 0.0, cnot_dur[i]) for i in range(n - 1, 0, -1)]
    return Circuit(spec.register, ops)


def lower(circuit, device=None):
    """Expand CNOT macros into their native five-op sequences."""
    device = device or DeviceParams()
    ops = []
    for op in circuit.ops:
        if op.kind == CNOT:
            c, t = op.qubits
            ops += [
                ry_op(t, np.pi / 2, device),
                rz_op(c, -np.pi / 2),
                rz_op(t, -np.pi / 2),
                cz_op(c, t, device),
                ry_op(t, -np.pi / 2, device),
            ]
        else:
            ops.append(op)
    return Circuit(circuit.n_qubits, ops)


# ---------------------------------------------------------------------------
# Dense oracles.

def _embed_1q(n, q, u):
    out = np.array([[1.0 + 0j]])
    for k in range(n, 0, -1):  # qubit 1 is the LSB, hence the last kron factor
        out = np.kron(out, u if k == q else np.eye(2))
    return out


def _cnot_matrix(n, c, t):
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << (t - 1)) if (i >> (c - 1)) & 1 else i
        u[j, i] = 1.0
    return u


def _phase2q_matrix(n, qa, qb, phases):
    idx = np.arange(1 << n)
    key = ((idx >> (qa - 1)) & 1) | (((idx >> (qb - 1)) & 1) << 1)
    return np.diag(np.asarray(phases, dtype=complex)[key])


def gate_matrix(op, n):
    """Dense matrix of one op on an n-qubit register."""
    if op.kind == RX:
        return _embed_1q(n, op.qubits[0], rx_matrix(op.angle))
    if op.kind == RY:
        return _embed_1q(n, op.qubits[0], ry_matrix(op.angle))
    if op.kind == RZ:
        return _embed_1q(n, op.qubits[0], rz_matrix(op.angle))
    if op.kind == CZ:
        return _phase2q_matrix(n, op.qubits[0], op.qubits[1], UZZ_PHASES)
    if op.kind == CNOT:
        return _cnot_matrix(n, op.qubits[0], op.qubits[1])
    if op.kind == IDLE:
        return np.eye(1 << n, dtype=complex)
    raise SpinQuenchError(f"unknown gate kind {op.kind!r}")


def circuit_unitary(circuit):
    """Ordered product of the gate matrices (first op applied first)."""
    if circuit.n_qubits > MAX_QUBITS:
        raise DimensionError("register too large for a dense unitary")
    u = np.eye(1 << circuit.n_qubits, dtype=complex)
    for op in circuit.ops:
        u = gate_matrix(op, circuit.n_qubits) @ u
    return u


def quench_hamiltonian(n, j0=1.0):
    """J0 * (sum_i X_i X_{i+1} + X_1 + X_N); all terms mutually commute."""
    if n > MAX_QUBITS:
        raise DimensionError("register too large for a dense Hamiltonian")
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(1, n):
        h += _embed_1q(n, i, PAULI_X) @ _embed_1q(n, i + 1, PAULI_X)
    h += _embed_1q(n, 1, PAULI_X) + _embed_1q(n, n, PAULI_X)
    return j0 * h


def constraint_product(n):
    """X_1 . (prod_i X_i X_{i+1}) . X_N -- the stabilizer constraint; the
    product is exactly the identity."""
    if n < 2:
        raise DimensionError("constraint needs at least 2 qubits")
    u = _embed_1q(n, 1, PAULI_X)
    for i in range(1, n):
        u = u @ _embed_1q(n, i, PAULI_X) @ _embed_1q(n, i + 1, PAULI_X)
    return u @ _embed_1q(n, n, PAULI_X)


def global_phase_distance(a, b):
    """Max elementwise deviation after aligning global phase on the
    largest-magnitude element of ``b``."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ratio = b[idx] / a[idx]
    return float(np.max(np.abs(a * (ratio / abs(ratio)) - b)))


# ---------------------------------------------------------------------------
# Line-oriented serialization: `KIND q[,q2] angle_rad duration_ns`.

def emit_circuit(circuit):
    lines = [f"# spinquench-circuit n_qubits={circuit.n_qubits}"]
    for op in circuit.ops:
        qs = ",".join(str(q) for q in op.qubits)
        lines.append(f"{op.kind} {qs} {op.angle!r} {op.duration!r}")
    return "\n".join(lines) + "\n"


def parse_circuit(text):
    n_qubits = None
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "n_qubits=" in line:
                n_qubits = int(line.split("n_qubits=")[1])
            continue
        parts = line.split()
        if len(parts) != 4:
            raise SpinQuenchError(f"line {lineno}: expected 'KIND q[,q2] angle duration'")
        kind, qs, angle, dur = parts
        qubits = tuple(int(x) for x in qs.split(","))
        ops.append(GateOp(kind, qubits, float(angle), float(dur)))
    if n_qubits is None:
        n_qubits = max((max(op.qubits) for op in ops), default=1)
    return Circuit(n_qubits, ops)


def remap_qubits(circuit, mapping, n_qubits):
    """Relabel qubits via ``mapping`` (old -> new) on a register of
    ``n_qubits``."""
    ops = [replace(op, qubits=tuple(mapping[q] for q in op.qubits)) for op in circuit.ops]
    return Circuit(n_qubits, ops)


def ramsey_circuit(q, wait_ns, register=None, device=None):
    """pi/2 -- wait -- pi/2 free-induction sequence on one qubit."""
    device = device or DeviceParams()
    register = register or q
    return Circuit(register, [
        rx_op(q, np.pi / 2, device),
        idle_op(q, wait_ns),
        rx_op(q, np.pi / 2, device),
    ])
