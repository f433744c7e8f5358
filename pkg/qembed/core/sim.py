"""
Simulador denso de vectores de estado (pocos qubits).

Convenciones:
  - RX(a) = exp(-i a X / 2), igual para RY y RZ.
  - El qubit 0 es el bit MÁS significativo del índice de la base computacional
    (|10> es el índice 2 con dos qubits).
  - La fase global no se normaliza: todo lo que se calcula aguas abajo
    (fidelidades, probabilidades) es invariante bajo fase global.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import math

import numpy as np

MAX_QUBITS = 10
NORM_TOL = 1e-10


# -------------------- Puertas --------------------
class GateKind(str, Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    H = "H"
    X = "X"
    CNOT = "CNOT"
    CSWAP = "CSWAP"


ARITY: Dict[GateKind, int] = {
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.H: 1,
    GateKind.X: 1,
    GateKind.CNOT: 2,
    GateKind.CSWAP: 3,
}
ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self) -> None:
        try:
            kind = GateKind(self.kind)
        except ValueError:
            raise ValueError(f"Tipo de puerta desconocido: {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)

        if len(targets) != ARITY[kind]:
            raise ValueError(f"{kind.value} necesita {ARITY[kind]} qubit(s), recibidos {len(targets)}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"Qubits repetidos en {kind.value}: {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"Índice de qubit negativo en {kind.value}: {targets}")

        if kind in ROTATIONS:
            if self.angle is None or not math.isfinite(float(self.angle)):
                raise ValueError(f"{kind.value} necesita un ángulo finito (recibido {self.angle!r})")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{kind.value} no admite ángulo")

    def inverse(self) -> "Gate":
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.targets, -self.angle)
        # H, X, CNOT y CSWAP son autoinversas
        return self


def rx(q: int, angle: float) -> Gate:
    return Gate(GateKind.RX, (q,), angle)

def ry(q: int, angle: float) -> Gate:
    return Gate(GateKind.RY, (q,), angle)

def rz(q: int, angle: float) -> Gate:
    return Gate(GateKind.RZ, (q,), angle)

def h(q: int) -> Gate:
    return Gate(GateKind.H, (q,))

def x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))

def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))

def cswap(control: int, a: int, b: int) -> Gate:
    return Gate(GateKind.CSWAP, (control, a, b))


def inverse_circuit(gates: Sequence[Gate]) -> List[Gate]:
    return [g.inverse() for g in reversed(list(gates))]

def remap_circuit(gates: Sequence[Gate], wires: Sequence[int]) -> List[Gate]:
    """Recoloca un circuito: el qubit lógico k pasa a ser wires[k]."""
    return [Gate(g.kind, tuple(wires[t] for t in g.targets), g.angle) for g in gates]


# -------------------- Matrices --------------------
_SQRT2_INV = 1.0 / math.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=complex,
)

CSWAP_MATRIX = np.eye(8, dtype=complex)
# |c a b>: intercambia |101> (5) y |110> (6)
CSWAP_MATRIX[[5, 6]] = CSWAP_MATRIX[[6, 5]]

_FIXED = {
    GateKind.H: HADAMARD,
    GateKind.X: PAULI_X,
    GateKind.CNOT: CNOT_MATRIX,
    GateKind.CSWAP: CSWAP_MATRIX,
}
for _m in (PAULI_X, PAULI_Y, PAULI_Z, HADAMARD, CNOT_MATRIX, CSWAP_MATRIX):
    _m.setflags(write=False)


def rotation_matrices(kind: GateKind, angles) -> np.ndarray:
    """
    Matrices de rotación 2x2 para un escalar o un vector de ángulos.
    Devuelve forma (2, 2) o (B, 2, 2).
    """
    kind = GateKind(kind)
    a = np.asarray(angles, dtype=float)
    c = np.cos(a / 2)
    s = np.sin(a / 2)
    out = np.zeros(a.shape + (2, 2), dtype=complex)
    if kind == GateKind.RX:
        out[..., 0, 0] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
        out[..., 1, 1] = c
    elif kind == GateKind.RY:
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    elif kind == GateKind.RZ:
        out[..., 0, 0] = np.exp(-0.5j * a)
        out[..., 1, 1] = np.exp(0.5j * a)
    else:
        raise ValueError(f"{kind.value} no es una rotación")
    return out


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.kind in ROTATIONS:
        return rotation_matrices(gate.kind, gate.angle)
    return _FIXED[gate.kind]


def apply_matrix(amplitudes, matrix: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """
    Aplica una matriz de 2^k x 2^k sobre los qubits `targets`.

    `amplitudes` puede llevar ejes de lote delante: forma (..., 2^n).
    `matrix` es (2^k, 2^k) o, con lote, (B..., 2^k, 2^k) con los mismos ejes de lote.
    El primer qubit de `targets` es el bit más significativo de la matriz.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    batch = amps.shape[:-1]
    k = len(targets)
    nb = len(batch)

    psi = amps.reshape(batch + (2,) * n_qubits)
    src = [nb + t for t in targets]
    dst = list(range(-k, 0))
    psi = np.moveaxis(psi, src, dst)
    moved_shape = psi.shape
    psi = psi.reshape(moved_shape[:-k] + (2 ** k,))

    m = np.asarray(matrix, dtype=complex)
    if m.ndim > 2:
        # una matriz por elemento del lote; se expande sobre los qubits no tocados
        m = m.reshape(batch + (1,) * (n_qubits - k) + m.shape[-2:])
    # einsum sin BLAS: cada fila se calcula igual sea cual sea su posición en el lote
    psi = np.einsum("...ij,...j->...i", m, psi)

    psi = psi.reshape(moved_shape)
    psi = np.moveaxis(psi, dst, src)
    return np.ascontiguousarray(psi.reshape(batch + (2 ** n_qubits,)))


# -------------------- Estados --------------------
@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        n = int(self.n_qubits)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"n_qubits debe estar entre 1 y {MAX_QUBITS} (recibido {self.n_qubits})")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** n:
            raise ValueError(f"Se esperaban {2 ** n} amplitudes, recibidas {amps.shape[0]}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"Estado no normalizado: norma^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amplitudes", amps)


def _check_qubits(n_qubits: int) -> int:
    n = int(n_qubits)
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n_qubits debe estar entre 1 y {MAX_QUBITS} (recibido {n_qubits})")
    return n


def zero_state(n_qubits: int) -> Statevector:
    n = _check_qubits(n_qubits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = 1.0
    return Statevector(n, amps)


def _check_targets(gate: Gate, n_qubits: int) -> None:
    bad = [t for t in gate.targets if t >= n_qubits]
    if bad:
        raise ValueError(f"Qubits fuera de rango para {n_qubits} qubits: {bad}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    _check_targets(gate, state.n_qubits)
    amps = apply_matrix(state.amplitudes, gate_matrix(gate), gate.targets, state.n_qubits)
    return Statevector(state.n_qubits, amps)


def apply_circuit(state: Statevector, gates: Iterable[Gate]) -> Statevector:
    # se trabaja sobre las amplitudes y se valida la norma una sola vez al final
    n = state.n_qubits
    amps = state.amplitudes
    for g in gates:
        _check_targets(g, n)
        amps = apply_matrix(amps, gate_matrix(g), g.targets, n)
    return Statevector(n, amps)


def run_circuit(gates: Iterable[Gate], n_qubits: int) -> Statevector:
    return apply_circuit(zero_state(n_qubits), gates)


# -------------------- Medidas --------------------
def overlap_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    |<a|b>|^2 sobre el último eje (admite lotes con broadcasting).

    Se calcula con partes reales e imaginarias por separado para que el
    resultado sea exactamente simétrico en sus argumentos.
    """
    ar, ai = a.real, a.imag
    br, bi = b.real, b.imag
    re = np.sum(ar * br, axis=-1) + np.sum(ai * bi, axis=-1)
    im = np.sum(ar * bi, axis=-1) - np.sum(ai * br, axis=-1)
    return re * re + im * im


def fidelity(a: Statevector, b: Statevector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"Dimensiones distintas: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(overlap_sq(a.amplitudes, b.amplitudes))


def basis_probabilities(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def marginal_probabilities(probs: np.ndarray, n_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    """Marginal sobre `qubits` (en ese orden); admite ejes de lote delante."""
    p = np.asarray(probs, dtype=float)
    batch = p.shape[:-1]
    nb = len(batch)
    p = p.reshape(batch + (2,) * n_qubits)
    drop = tuple(nb + q for q in range(n_qubits) if q not in qubits)
    if drop:
        p = p.sum(axis=drop)
    kept = [q for q in range(n_qubits) if q in qubits]
    order = [kept.index(q) for q in qubits]
    p = np.transpose(p, list(range(nb)) + [nb + o for o in order])
    return p.reshape(batch + (2 ** len(qubits),))


def bitstring(index: int, n_bits: int) -> str:
    return format(int(index), f"0{int(n_bits)}b")


@dataclass(frozen=True)
class CountsTable:
    shots: int
    counts: Dict[str, int]

    def __post_init__(self) -> None:
        if int(self.shots) < 1:
            raise ValueError("shots debe ser >= 1")
        total = sum(int(c) for c in self.counts.values())
        if total != int(self.shots):
            raise ValueError(f"Los conteos suman {total}, no {self.shots}")
        if any(int(c) < 0 for c in self.counts.values()):
            raise ValueError("Conteos negativos")

    @property
    def n_bits(self) -> int:
        return len(next(iter(self.counts)))

    def frequency(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots

    def marginal(self, positions: Sequence[int]) -> "CountsTable":
        out: Dict[str, int] = {}
        for bits, c in self.counts.items():
            key = "".join(bits[p] for p in positions)
            out[key] = out.get(key, 0) + c
        return CountsTable(self.shots, dict(sorted(out.items())))


def counts_from_histogram(hist: np.ndarray, n_bits: int) -> CountsTable:
    hist = np.asarray(hist, dtype=np.int64)
    counts = {bitstring(i, n_bits): int(c) for i, c in enumerate(hist) if c > 0}
    return CountsTable(int(hist.sum()), counts)


def sample_counts(state: Statevector, shots: int, seed: int, qubits: Optional[Sequence[int]] = None) -> CountsTable:
    """
    Muestreo i.i.d. de la base computacional con un generador sembrado.
    Con `qubits` solo se miden esos qubits (en ese orden).
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots debe ser >= 1")
    probs = basis_probabilities(state)
    n_bits = state.n_qubits
    if qubits is not None:
        probs = marginal_probabilities(probs, state.n_qubits, qubits)
        n_bits = len(qubits)
    # deriva numérica: renormaliza antes de muestrear
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    hist = rng.multinomial(shots, probs)
    return counts_from_histogram(hist, n_bits)
