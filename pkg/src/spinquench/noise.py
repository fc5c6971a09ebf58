"""Quasi-static dephasing Monte Carlo.

Per shot, every qubit receives one frequency detuning per exchange regime,
sampled from a zero-mean Gaussian of width sigma_f = 1/(sqrt(2) pi T2*).
Detunings are held constant within the shot (quasi-static assumption) and
resampled between shots.

During a drive of duration t the driven qubit evolves under
``exp(-i/2 (theta_eps Z + theta X))`` with theta_eps = 2 pi f t, while
every other qubit picks up the idle rotation ``Rz(theta_eps)``.  Exchange
(CZ) windows use the T2* values measured with the coupling on; all other
windows use the coupling-off values.  Virtual RZ updates take no time and
acquire no noise.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from . import kernels
from .circuits import CNOT, CZ, IDLE, RX, RY, RZ, UZZ_PHASES, DeviceParams, ramsey_circuit
from .errors import SpinQuenchError
from .states import all_down, expectation_z, rx_matrix, ry_matrix, rz_matrix

OFF, ON = "off", "on"


def sigma_f_hz(t2_star_us):
    """Detuning width sigma_f = 1/(sqrt(2) pi T2*), in Hz for T2* in us."""
    if t2_star_us <= 0:
        raise SpinQuenchError(f"T2* must be positive, got {t2_star_us}")
    if math.isinf(t2_star_us):
        return 0.0
    return 1.0 / (math.sqrt(2.0) * math.pi * t2_star_us * 1e-6)


def sample_detuning(t2_star_us, rng):
    """One quasi-static frequency detuning in Hz."""
    sigma = sigma_f_hz(t2_star_us)
    if sigma == 0.0:
        return 0.0
    return float(rng.normal(0.0, sigma))


@dataclass
class T2Table:
    """Dephasing times in us, keyed per qubit and exchange regime.

    ``t2_on`` entries may be resolved per (qubit, neighbor, neighbor state
    'down'/'up'); lookups without a full key fall back to the average over
    the qubit's entries, which is also what the shot executor uses (the
    relevant comparison figure averages over all interaction conditions).
    A qubit with no on-entries falls back to its off-value.
    """

    t2_off: dict = field(default_factory=dict)
    t2_on: dict = field(default_factory=dict)
    default_off_us: float = 3.0
    default_on_us: float = 2.0

    def __post_init__(self):
        for v in list(self.t2_off.values()) + list(self.t2_on.values()):
            if v <= 0:
                raise SpinQuenchError(f"T2* entries must be positive, got {v}")

    def off(self, q):
        return float(self.t2_off.get(q, self.default_off_us))

    def on(self, q, neighbor=None, neighbor_state=None):
        if neighbor is not None and neighbor_state is not None:
            key = (q, neighbor, neighbor_state)
            if key in self.t2_on:
                return float(self.t2_on[key])
        entries = [v for (qq, *_), v in self.t2_on.items() if qq == q]
        if entries:
            return float(np.mean(entries))
        if q in self.t2_off:
            return self.off(q)
        return float(self.default_on_us)


@dataclass
class NoiseConfig:
    t2: T2Table = field(default_factory=T2Table)
    f_rabi_mhz: dict = field(default_factory=dict)
    base_seed: int = 0
    enabled: bool = True
    correlated_regimes: bool = False  # share one draw between off/on regimes

    def f_rabi(self, q):
        return float(self.f_rabi_mhz.get(q, 5.0))

    def check_regime(self, qubits):
        """Warn when sigma_f is not small against the Rabi frequency."""
        for q in qubits:
            sig_mhz = sigma_f_hz(self.t2.off(q)) * 1e-6
            if self.enabled and sig_mhz * 10 > self.f_rabi(q):
                warnings.warn(
                    f"qubit {q}: sigma_f={sig_mhz:.3f} MHz is not << "
                    f"f_Rabi={self.f_rabi(q):.3f} MHz; the weak-dephasing "
                    "drive model is outside its regime",
                    stacklevel=2,
                )


def noiseless(seed=0):
    return NoiseConfig(enabled=False, base_seed=seed)


@dataclass
class ShotRecord:
    """Everything needed to replay one Monte-Carlo shot."""

    shot_index: int
    detunings_hz: dict = field(default_factory=dict)  # (qubit, regime) -> Hz
    measurements: list = field(default_factory=list)
    retained: bool = True
    indicator: int = None


def shot_rng(base_seed, shot_index):
    """Deterministic per-shot stream; parallel scheduling cannot change it."""
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(shot_index,)))


def draw_detunings(n_qubits, noise, rng):
    """One detuning per (qubit, regime), in canonical order for stream
    stability.  Off/on draws are independent unless correlated_regimes."""
    det = {}
    for q in range(1, n_qubits + 1):
        z_off = rng.standard_normal()
        z_on = rng.standard_normal()
        if noise.correlated_regimes:
            z_on = z_off
        det[(q, OFF)] = z_off * sigma_f_hz(noise.t2.off(q))
        det[(q, ON)] = z_on * sigma_f_hz(noise.t2.on(q))
    return det


def _drive_matrix(theta, theta_eps, axis):
    """exp(-i/2 (theta_eps Z + theta S)) for S = X or Y, closed form."""
    if theta_eps == 0.0:
        return rx_matrix(theta) if axis == "x" else ry_matrix(theta)
    omega = math.hypot(theta, theta_eps)
    c = math.cos(omega / 2)
    k = math.sin(omega / 2) / omega
    if axis == "x":
        return np.array([[c + 1j * k * theta_eps, -1j * k * theta],
                         [-1j * k * theta, c - 1j * k * theta_eps]])
    return np.array([[c + 1j * k * theta_eps, k * theta],
                     [-k * theta, c - 1j * k * theta_eps]])


def idle_dephase(s, q, duration_ns, f_eps_hz):
    """Z rotation by theta_eps = 2 pi f t on qubit ``q``."""
    out = s.copy()
    _idle_dephase_inplace(out.amplitudes, out.n_qubits, q, duration_ns, f_eps_hz)
    return out


def _idle_dephase_inplace(amps, n, q, duration_ns, f_eps_hz):
    if duration_ns == 0.0 or f_eps_hz == 0.0:
        return
    theta_eps = 2.0 * math.pi * f_eps_hz * duration_ns * 1e-9
    kernels.apply_diag1q(amps, n, q - 1, np.exp(0.5j * theta_eps), np.exp(-0.5j * theta_eps))


def noisy_drive(s, q, theta, f_eps_hz, t_pi_ns, axis="x"):
    """Drive with quasi-static detuning: the rotation axis tilts out of the
    equator by theta_eps = 2 pi f (theta/pi) t_pi."""
    if t_pi_ns <= 0:
        raise SpinQuenchError("t_pi must be positive")
    duration = abs(theta) / math.pi * t_pi_ns
    theta_eps = 2.0 * math.pi * f_eps_hz * duration * 1e-9
    out = s.copy()
    kernels.apply_1q(out.amplitudes, out.n_qubits, q - 1, _drive_matrix(theta, theta_eps, axis))
    return out


_EXACT_1Q = {RX: rx_matrix, RY: ry_matrix, RZ: rz_matrix}


def _apply_op_noisy(amps, n, op, detunings):
    """One scheduled window: exact gate plus the dephasing it implies."""
    if op.kind in (RX, RY):
        q = op.qubits[0]
        theta_eps = 2.0 * math.pi * detunings[(q, OFF)] * op.duration * 1e-9
        axis = "x" if op.kind == RX else "y"
        kernels.apply_1q(amps, n, q - 1, _drive_matrix(op.angle, theta_eps, axis))
        for r in range(1, n + 1):
            if r != q:
                _idle_dephase_inplace(amps, n, r, op.duration, detunings[(r, OFF)])
    elif op.kind == RZ:
        kernels.apply_diag1q(amps, n, op.qubits[0] - 1,
                             np.exp(0.5j * op.angle), np.exp(-0.5j * op.angle))
    elif op.kind == CZ:
        kernels.apply_phase2q(amps, n, op.qubits[0] - 1, op.qubits[1] - 1, UZZ_PHASES)
        for r in range(1, n + 1):
            _idle_dephase_inplace(amps, n, r, op.duration, detunings[(r, ON)])
    elif op.kind == IDLE:
        for r in range(1, n + 1):
            _idle_dephase_inplace(amps, n, r, op.duration, detunings[(r, OFF)])
    else:
        raise SpinQuenchError(f"cannot execute {op.kind} (lower CNOT macros first)")


def apply_circuit_exact(state, circuit):
    """Noiseless execution; shares the gate matrices with the noisy path."""
    out = state.copy()
    amps, n = out.amplitudes, out.n_qubits
    for op in circuit.ops:
        if op.kind in _EXACT_1Q:
            kernels.apply_1q(amps, n, op.qubits[0] - 1, _EXACT_1Q[op.kind](op.angle))
        elif op.kind == CZ:
            kernels.apply_phase2q(amps, n, op.qubits[0] - 1, op.qubits[1] - 1, UZZ_PHASES)
        elif op.kind == CNOT:
            _apply_cnot_inplace(amps, n, *op.qubits)
        elif op.kind == IDLE:
            pass
        else:
            raise SpinQuenchError(f"unknown gate kind {op.kind!r}")
    return out


def _apply_cnot_inplace(amps, n, c, t):
    dim = 1 << n
    cmask, tmask = 1 << (c - 1), 1 << (t - 1)
    idx = np.arange(dim)
    src = idx[(idx & cmask != 0) & (idx & tmask == 0)]
    dst = src | tmask
    amps[src], amps[dst] = amps[dst].copy(), amps[src].copy()


def run_shot(circuit, noise, initial, shot_index, rng=None, detunings=None):
    """Execute one shot; deterministic in (base_seed, shot_index).

    Returns ``(final_state, record, rng)``; the generator is handed back so
    measurement sampling downstream stays inside the same per-shot stream.
    """
    if rng is None:
        rng = shot_rng(noise.base_seed, shot_index)
    if not noise.enabled:
        state = apply_circuit_exact(initial, circuit)
        return state, ShotRecord(shot_index), rng
    if detunings is None:
        detunings = draw_detunings(circuit.n_qubits, noise, rng)
    out = initial.copy()
    for op in circuit.ops:
        _apply_op_noisy(out.amplitudes, out.n_qubits, op, detunings)
    return out, ShotRecord(shot_index, detunings_hz=detunings), rng


@dataclass
class EnsembleResult:
    mean: float
    stderr: float
    shots: int
    values: np.ndarray = None


def run_ensemble(circuit, noise, shots, observable, initial=None, keep_values=False):
    """Mean and standard error of ``observable(final_state)`` over shots.

    The observable is an exact expectation evaluated on each noisy final
    state, so a noiseless ensemble has zero spread.
    """
    if shots < 1:
        raise SpinQuenchError("shots must be >= 1")
    if initial is None:
        initial = all_down(circuit.n_qubits)
    values = np.empty(shots)
    for i in range(shots):
        state, _, _ = run_shot(circuit, noise, initial, i)
        values[i] = observable(state)
        if not noise.enabled:
            values[:] = values[0]  # identical shots by construction
            break
    std = values.std(ddof=1) if shots > 1 and noise.enabled else 0.0
    return EnsembleResult(float(values.mean()), float(std / math.sqrt(shots)),
                          shots, values if keep_values else None)


def exchange_from_barrier(vb_mv, j_ref_mhz, v_scale_mv):
    """Exponential barrier-voltage law J = J_ref * exp(vB / v_scale)."""
    if v_scale_mv == 0:
        raise SpinQuenchError("v_scale must be nonzero")
    return j_ref_mhz * math.exp(vb_mv / v_scale_mv)


# ---------------------------------------------------------------------------
# Ramsey calibration oracle: the quasi-static average of cos(2 pi f t) over
# f ~ N(0, sigma_f) is exp(-(t/T2*)^2), so a free-induction scan recovers
# the configured T2*.

def ramsey_scan(q, t2_star_us, wait_ns_grid, shots, base_seed, t_pi_ns=20.0):
    """P(down) after pi/2 -- wait -- pi/2, per wait time."""
    noise = NoiseConfig(t2=T2Table(t2_off={q: t2_star_us}), base_seed=base_seed)
    means = np.empty(len(wait_ns_grid))
    device = DeviceParams(default_t_pi_ns=t_pi_ns)
    for k, wait in enumerate(wait_ns_grid):
        circ = ramsey_circuit(q, wait, register=q, device=device)
        res = run_ensemble(circ, noise, shots, lambda s: 0.5 * (1.0 - expectation_z(s, q)))
        means[k] = res.mean
    return means


def fit_ramsey_t2(wait_ns_grid, p_down, t2_guess_us=None):
    """Fit p(t) = c + a*exp(-(t/T2)^2); returns T2* in us."""
    t_us = np.asarray(wait_ns_grid) * 1e-3
    if t2_guess_us is None:
        t2_guess_us = max(t_us.max() / 2.0, 1e-3)

    def model(t, c, a, t2):
        return c + a * np.exp(-((t / t2) ** 2))

    popt, _ = curve_fit(model, t_us, p_down, p0=(0.5, 0.4, t2_guess_us),
                        maxfev=20000)
    return float(abs(popt[2]))
