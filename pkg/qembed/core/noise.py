"""
Emulación Monte Carlo de ruido de dispositivo.

Canales: despolarizante por puerta (trayectorias con Paulis aleatorios) y
volteo de bits en la lectura. Los valores de cada dispositivo son las medias
publicadas por IBM Q para las cuatro máquinas (errores U1/U2/U3, lectura, CNOT).
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .sim import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ARITY,
    CountsTable,
    Gate,
    GateKind,
    apply_matrix,
    counts_from_histogram,
    gate_matrix,
    marginal_probabilities,
    run_circuit,
    sample_counts,
)

# Número de CNOT en la descomposición de un c-SWAP sobre el hardware
CSWAP_CNOT_COUNT = 38

# índice = código de error: 0 = I, 1/2/3 = X/Y/Z
PAULI_TABLE = np.stack([np.eye(2, dtype=complex), PAULI_X, PAULI_Y, PAULI_Z])


class NoiseModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    device_name: str = Field(min_length=1)
    u1_error: float = Field(ge=0.0, lt=1.0)
    u2_error: float = Field(ge=0.0, lt=1.0)
    u3_error: float = Field(ge=0.0, lt=1.0)
    readout_error: float = Field(ge=0.0, lt=1.0)
    cnot_error: float = Field(ge=0.0, lt=1.0)

    def is_noiseless(self) -> bool:
        return all(
            v == 0.0
            for v in (self.u1_error, self.u2_error, self.u3_error, self.readout_error, self.cnot_error)
        )

    def scaled(self, factor: float) -> "NoiseModel":
        """Todas las tasas multiplicadas por `factor` (topadas justo por debajo de 1)."""
        if factor < 0:
            raise ValueError("El factor de escala no puede ser negativo")
        cap = np.nextafter(1.0, 0.0)

        def s(v: float) -> float:
            return float(min(cap, v * factor))

        return NoiseModel(
            device_name=f"{self.device_name}x{factor:g}",
            u1_error=s(self.u1_error),
            u2_error=s(self.u2_error),
            u3_error=s(self.u3_error),
            readout_error=s(self.readout_error),
            cnot_error=s(self.cnot_error),
        )


# u1, u2, u3, lectura, cnot
_DEVICES: Dict[str, Tuple[float, float, float, float, float]] = {
    "melbourne": (0.0, 0.00115, 0.00229, 0.06597, 0.03157),
    "yorktown": (0.0, 0.00084, 0.00168, 0.03494, 0.02024),
    "bogota": (0.0, 0.00031, 0.00062, 0.03702, 0.01171),
    "rome": (0.0, 0.00035, 0.00071, 0.02397, 0.01344),
}

DEVICE_NAMES: List[str] = list(_DEVICES)


def builtin_noise_model(device: str) -> NoiseModel:
    key = (device or "").strip().lower()
    for prefix in ("ibmq_16_", "ibmq_5_", "ibmq5_", "ibmq_"):
        if key.startswith(prefix):
            key = key[len(prefix):]
            break
    if key not in _DEVICES:
        raise ValueError(f"Dispositivo desconocido: {device!r}. Opciones: {', '.join(DEVICE_NAMES)}")
    u1, u2, u3, ro, cx = _DEVICES[key]
    return NoiseModel(
        device_name=key, u1_error=u1, u2_error=u2, u3_error=u3, readout_error=ro, cnot_error=cx
    )


# -------------------- Tasas por puerta --------------------
GateErrorMap = Dict[GateKind, Tuple[float, int]]


def gate_error_map(model: NoiseModel) -> GateErrorMap:
    """
    Tipo de puerta -> (probabilidad de error, qubits del canal).
    RZ es virtual (U1); H, RX, RY y X son pulsos de una rotación (U2).
    U3 no lo usa ninguna puerta del simulador.
    """
    one_q = model.u2_error
    return {
        GateKind.RZ: (model.u1_error, ARITY[GateKind.RZ]),
        GateKind.H: (one_q, ARITY[GateKind.H]),
        GateKind.RX: (one_q, ARITY[GateKind.RX]),
        GateKind.RY: (one_q, ARITY[GateKind.RY]),
        GateKind.X: (one_q, ARITY[GateKind.X]),
        GateKind.CNOT: (model.cnot_error, ARITY[GateKind.CNOT]),
        GateKind.CSWAP: (min(1.0, CSWAP_CNOT_COUNT * model.cnot_error), ARITY[GateKind.CSWAP]),
    }


def gate_error_rate(model: NoiseModel, gate_kind) -> float:
    try:
        kind = GateKind(gate_kind)
    except ValueError:
        raise ValueError(f"Tipo de puerta desconocido: {gate_kind!r}")
    return gate_error_map(model)[kind][0]


# -------------------- Trayectorias --------------------
def _draw_errors(gate: Gate, p: float, shots: int, rng) -> Optional[np.ndarray]:
    """
    Códigos Pauli (shots, qubits de la puerta) tras una aplicación de `gate`:
    0 = I, 1/2/3 = X/Y/Z. None si no falla ningún disparo.

    Un c-SWAP que falla despolariza del todo sus tres qubits: Pauli uniforme
    entre los 64 de tres qubits, identidad incluida. El resto de puertas que
    fallan insertan un Pauli no trivial en cada qubit que tocan.
    """
    fired = rng.random(shots) < p
    n_fired = int(np.count_nonzero(fired))
    if n_fired == 0:
        return None
    low = 0 if gate.kind == GateKind.CSWAP else 1
    codes = np.zeros((shots, len(gate.targets)), dtype=np.int64)
    codes[fired] = rng.integers(low, 4, size=(n_fired, len(gate.targets)))
    return codes


def noisy_sample(
    circuit: Sequence[Gate],
    n_qubits: int,
    model: NoiseModel,
    shots: int,
    seed: int,
    measured: Optional[Sequence[int]] = None,
) -> CountsTable:
    """
    Simula `shots` trayectorias ruidosas de `circuit` desde |0...0>.

    Se guarda una fila de amplitudes por historia de errores distinta y cada
    disparo apunta a la suya; las historias solo se separan en la puerta donde
    difieren, así que el prefijo sin errores se simula una vez.
    """
    gates = list(circuit)
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots debe ser >= 1")
    measured = list(range(n_qubits)) if measured is None else list(measured)

    if model.is_noiseless():
        return sample_counts(run_circuit(gates, n_qubits), shots, seed, qubits=measured)

    rng = np.random.default_rng(seed)
    errors = gate_error_map(model)

    amps = np.zeros((1, 2 ** n_qubits), dtype=complex)
    amps[0, 0] = 1.0
    branch = np.zeros(shots, dtype=np.int64)
    for g in gates:
        amps = apply_matrix(amps, gate_matrix(g), g.targets, n_qubits)
        p = errors[g.kind][0]
        if p <= 0.0:
            continue
        codes = _draw_errors(g, p, shots, rng)
        if codes is None:
            continue
        keys, branch = np.unique(np.column_stack([branch, codes]), axis=0, return_inverse=True)
        branch = np.asarray(branch).reshape(-1)
        amps = amps[keys[:, 0]]
        for j, q in enumerate(g.targets):
            col = keys[:, 1 + j]
            if col.any():
                amps = apply_matrix(amps, PAULI_TABLE[col], (q,), n_qubits)

    multiplicity = np.bincount(branch, minlength=amps.shape[0])
    probs = marginal_probabilities(np.abs(amps) ** 2, n_qubits, measured)
    probs = probs / probs.sum(axis=1, keepdims=True)

    # resultado ideal de cada disparo, agrupado por trayectoria
    m = len(measured)
    per_branch = rng.multinomial(multiplicity, probs)
    outcomes = np.repeat(np.tile(np.arange(2 ** m), amps.shape[0]), per_branch.reshape(-1))

    if model.readout_error > 0.0:
        flips = rng.random((shots, m)) < model.readout_error
        weights = 1 << np.arange(m - 1, -1, -1)
        outcomes = outcomes ^ (flips.astype(np.int64) @ weights)

    hist = np.bincount(outcomes, minlength=2 ** m)
    return counts_from_histogram(hist, m)
