"""Structured gate alphabet, circuit container, simulator and equivalence.

Gates address qubits by index; qubit 0 is the most significant bit of a
basis index.  Multi-qubit subsets are tuples listed most-significant first,
and the "subset value" of a basis index collects those bits in that order.

Simulation is exact linear algebra on dense statevectors (or batches of
them), capped at :data:`SIM_CAP` total qubits.  Clean ancillas must start
and end in |0>; dirty ancillas may start in any basis state and must be
restored.  :func:`circuit_unitary` checks both disciplines explicitly by
simulating every allowed ancilla basis state.

The module also provides :class:`PermPhase`, the classical form of
operators of shape ``Diag(phases) . Perm``, which the decompositions use to
carry "up to diagonal and permutation" residuals without emitting gates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import householder as hh
from .numerics import (
    EPS0,
    SparseIsometry,
    check_permutation,
    prune_state,
    state_norm,
)

SIM_CAP = 14


class SimulationCapExceeded(ValueError):
    pass


class CircuitVerificationError(AssertionError):
    """Raised when simulation contradicts a circuit's declared contract."""


# ---------------------------------------------------------------------------
# gate kinds


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int


@dataclass(frozen=True)
class SingleQubit:
    target: int
    matrix: np.ndarray  # 2x2 unitary
    label: str = "u"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (2, 2):
            raise ValueError("single-qubit matrix must be 2x2")


@dataclass(frozen=True)
class MCX:
    controls: tuple[tuple[int, int], ...]  # (qubit, polarity) pairs
    target: int


@dataclass(frozen=True)
class MCU:
    controls: tuple[tuple[int, int], ...]
    target: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (2, 2):
            raise ValueError("controlled single-qubit matrix must be 2x2")


@dataclass(frozen=True)
class Diagonal:
    qubits: tuple[int, ...]
    phases: tuple[complex, ...]  # length 2^k, unit modulus

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(complex(p) for p in self.phases))
        if len(self.phases) != 1 << len(self.qubits):
            raise ValueError("diagonal needs 2^k phases")
        if any(abs(abs(p) - 1.0) > 1e-9 for p in self.phases):
            raise ValueError("diagonal phases must have unit modulus")


@dataclass(frozen=True)
class PermutationGate:
    qubits: tuple[int, ...]
    mapping: tuple[int, ...]  # basis value v on the subset goes to mapping[v]

    def __post_init__(self):
        check_permutation(self.mapping, 1 << len(self.qubits))


@dataclass(frozen=True)
class Decrement:
    qubits: tuple[int, ...]  # |v> -> |v - 1 mod 2^k> on the subset


@dataclass(frozen=True)
class SPBlock:
    """Opaque state-preparation block: U|0..0> = state on the subset.

    ``inverted`` applies the inverse (un-preparation).  The simulated
    unitary is the canonical completion from :func:`complete_state_prep`.
    """

    qubits: tuple[int, ...]
    state: tuple[tuple[int, complex], ...]  # sparse (index, amplitude) pairs
    inverted: bool = False

    @classmethod
    def from_dict(cls, qubits, state: dict[int, complex], inverted: bool = False):
        items = tuple(sorted((int(k), complex(a)) for k, a in state.items()))
        return cls(tuple(qubits), items, inverted)

    def state_dict(self) -> dict[int, complex]:
        return dict(self.state)

    def __post_init__(self):
        nrm = state_norm(dict(self.state))
        if abs(nrm - 1.0) > 1e-8:
            raise ValueError(f"SPBlock target has norm {nrm}")


@dataclass(frozen=True)
class H0Phase:
    """I + (e^{i phi} - 1)|0..0><0..0| on the subset; phi = pi reflects."""

    qubits: tuple[int, ...]
    phi: float


Gate = CNOT | SingleQubit | MCX | MCU | Diagonal | PermutationGate | Decrement | SPBlock | H0Phase

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)


def x_gate(q: int) -> SingleQubit:
    return SingleQubit(q, X_MATRIX, label="x")


def _gate_qubits(g: Gate) -> tuple[int, ...]:
    if isinstance(g, CNOT):
        return (g.control, g.target)
    if isinstance(g, SingleQubit):
        return (g.target,)
    if isinstance(g, (MCX, MCU)):
        return tuple(q for q, _ in g.controls) + (g.target,)
    return tuple(g.qubits)


def gate_qubit_count(g: Gate) -> int:
    return len(_gate_qubits(g))


def describe_gate(g: Gate) -> str:
    """Compact one-line rendering for logs and demos."""
    if isinstance(g, CNOT):
        return f"cnot({g.control}->{g.target})"
    if isinstance(g, SingleQubit):
        return f"{g.label}(q{g.target})"
    if isinstance(g, MCX):
        ctr = ",".join(f"{q}" if p else f"!{q}" for q, p in g.controls)
        return f"mcx({ctr}->{g.target})"
    if isinstance(g, MCU):
        ctr = ",".join(f"{q}" if p else f"!{q}" for q, p in g.controls)
        return f"mcu({ctr}->{g.target})"
    if isinstance(g, Diagonal):
        return f"diagonal(q{list(g.qubits)})"
    if isinstance(g, PermutationGate):
        return f"permutation(q{list(g.qubits)})"
    if isinstance(g, Decrement):
        return f"decrement(q{list(g.qubits)})"
    if isinstance(g, SPBlock):
        tag = "unprepare" if g.inverted else "prepare"
        return f"{tag}[{len(g.state)} amps](q{list(g.qubits)})"
    if isinstance(g, H0Phase):
        return f"h0(phi={g.phi:.4g}, q{list(g.qubits)})"
    return repr(g)


def dagger(g: Gate) -> list[Gate]:
    """Inverse of a gate as a (usually singleton) gate list."""
    if isinstance(g, (CNOT, MCX)):
        return [g]
    if isinstance(g, SingleQubit):
        return [SingleQubit(g.target, g.matrix.conj().T, label=g.label + "^")]
    if isinstance(g, MCU):
        return [MCU(g.controls, g.target, g.matrix.conj().T)]
    if isinstance(g, Diagonal):
        return [Diagonal(g.qubits, tuple(p.conjugate() for p in g.phases))]
    if isinstance(g, PermutationGate):
        inv = np.argsort(np.asarray(g.mapping))
        return [PermutationGate(g.qubits, tuple(int(v) for v in inv))]
    if isinstance(g, Decrement):
        # increment = X^k . Dec . X^k on the subset
        xs = [x_gate(q) for q in g.qubits]
        return xs + [g] + xs
    if isinstance(g, SPBlock):
        return [SPBlock(g.qubits, g.state, not g.inverted)]
    if isinstance(g, H0Phase):
        return [H0Phase(g.qubits, -g.phi)]
    raise TypeError(f"unknown gate {g!r}")


def dagger_sequence(gates: list[Gate]) -> list[Gate]:
    out: list[Gate] = []
    for g in reversed(gates):
        out.extend(dagger(g))
    return out


# ---------------------------------------------------------------------------
# circuits


@dataclass
class StructuredCircuit:
    """Ordered gate list over ``n`` data qubits plus declared ancillas.

    Ancilla kinds are "clean" or "dirty"; ancilla qubits sit at indices
    ``n .. n + a - 1`` (least significant bits of the simulation index).
    """

    n: int
    ancillas: tuple[str, ...] = ()
    gates: list[Gate] = field(default_factory=list)

    @property
    def total_qubits(self) -> int:
        return self.n + len(self.ancillas)

    def validate(self) -> None:
        if any(k not in ("clean", "dirty") for k in self.ancillas):
            raise ValueError("ancilla kinds must be 'clean' or 'dirty'")
        nq = self.total_qubits
        for g in self.gates:
            qs = _gate_qubits(g)
            if len(set(qs)) != len(qs):
                raise ValueError(f"repeated qubit in {g!r}")
            if any(not (0 <= q < nq) for q in qs):
                raise ValueError(f"{g!r} addresses a qubit outside 0..{nq - 1}")


# ---------------------------------------------------------------------------
# simulation kernels; states are (2^N,) or (2^N, batch) arrays


def _subset_values(idx: np.ndarray, qubits: tuple[int, ...], nq: int) -> np.ndarray:
    v = np.zeros_like(idx)
    s = len(qubits)
    for k, q in enumerate(qubits):
        v |= ((idx >> (nq - 1 - q)) & 1) << (s - 1 - k)
    return v


def _scatter_subset(idx: np.ndarray, values: np.ndarray, qubits, nq: int) -> np.ndarray:
    out = idx.copy()
    s = len(qubits)
    for k, q in enumerate(qubits):
        bit = (values >> (s - 1 - k)) & 1
        pos = nq - 1 - q
        out = (out & ~(1 << pos)) | (bit << pos)
    return out


def gate_permutation(g: Gate, nq: int) -> np.ndarray | None:
    """Index permutation ``dst[i]`` for gates that act by basis relabeling."""
    idx = np.arange(1 << nq)
    if isinstance(g, CNOT):
        trig = (idx >> (nq - 1 - g.control)) & 1
        return idx ^ (trig << (nq - 1 - g.target))
    if isinstance(g, MCX):
        trig = np.ones_like(idx)
        for q, pol in g.controls:
            bit = (idx >> (nq - 1 - q)) & 1
            trig &= bit == pol
        return idx ^ (trig << (nq - 1 - g.target))
    if isinstance(g, PermutationGate):
        v = _subset_values(idx, g.qubits, nq)
        return _scatter_subset(idx, np.asarray(g.mapping)[v], g.qubits, nq)
    if isinstance(g, Decrement):
        v = _subset_values(idx, g.qubits, nq)
        return _scatter_subset(idx, (v - 1) % (1 << len(g.qubits)), g.qubits, nq)
    if isinstance(g, SingleQubit) and np.allclose(g.matrix, X_MATRIX):
        return idx ^ (1 << (nq - 1 - g.target))
    return None


def apply_gate(state: np.ndarray, g: Gate, nq: int) -> np.ndarray:
    """Exact action of one gate on a statevector or a batch of columns."""
    if state.shape[0] != 1 << nq:
        raise ValueError(f"state dimension {state.shape[0]} != 2^{nq}")
    perm = gate_permutation(g, nq)
    if perm is not None:
        out = np.empty_like(state)
        out[perm] = state
        return out
    idx = np.arange(1 << nq)
    if isinstance(g, Diagonal):
        v = _subset_values(idx, g.qubits, nq)
        p = np.asarray(g.phases)[v]
        return state * (p if state.ndim == 1 else p[:, None])
    if isinstance(g, H0Phase):
        v = _subset_values(idx, g.qubits, nq)
        p = np.where(v == 0, cmath.exp(1j * g.phi), 1.0 + 0j)
        return state * (p if state.ndim == 1 else p[:, None])
    if isinstance(g, (SingleQubit, MCU)):
        u = g.matrix
        tpos = nq - 1 - g.target
        mask = np.ones(1 << nq, dtype=bool)
        if isinstance(g, MCU):
            for q, pol in g.controls:
                mask &= ((idx >> (nq - 1 - q)) & 1) == pol
        i0 = idx[mask & (((idx >> tpos) & 1) == 0)]
        i1 = i0 | (1 << tpos)
        out = state.copy()
        a0, a1 = state[i0], state[i1]
        out[i0] = u[0, 0] * a0 + u[0, 1] * a1
        out[i1] = u[1, 0] * a0 + u[1, 1] * a1
        return out
    if isinstance(g, SPBlock):
        u = complete_state_prep(g.state_dict(), len(g.qubits))
        if g.inverted:
            u = u.conj().T
        return _apply_subset_unitary(state, u, g.qubits, nq)
    raise TypeError(f"unknown gate {g!r}")


def _apply_subset_unitary(state, u, qubits, nq):
    batch = state.ndim == 2
    shape = state.shape
    t = state.reshape([2] * nq + ([shape[1]] if batch else []))
    rest = [a for a in range(nq) if a not in qubits] + ([nq] if batch else [])
    order = list(qubits) + rest
    t = np.transpose(t, order).reshape(1 << len(qubits), -1)
    t = u @ t
    t = t.reshape([2] * nq + ([shape[1]] if batch else []))
    t = np.transpose(t, np.argsort(order))
    return t.reshape(shape).copy()


def apply_circuit(state: np.ndarray, circuit: StructuredCircuit) -> np.ndarray:
    nq = circuit.total_qubits
    for g in circuit.gates:
        state = apply_gate(state, g, nq)
    return state


def gate_unitary(g: Gate, nq: int) -> np.ndarray:
    return apply_gate(np.eye(1 << nq, dtype=complex), g, nq)


# ---------------------------------------------------------------------------
# canonical state preparation (used to simulate SPBlock)


def complete_state_prep(v: dict[int, complex] | np.ndarray, k: int) -> np.ndarray:
    """A deterministic unitary U on k qubits with U|0..0> = v.

    Canonical choice: the generalized reflection mapping |0..0> to v
    (identity when v is |0..0|).  In the narrow band where that reflection
    is numerically degenerate (tiny ``1 - v_0`` but v != |0>), falls back to
    the standard reflection composed with a phase on |0..0>, which is exact
    and stable; any completion yields the same conjugated reflection.
    """
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    if isinstance(v, np.ndarray):
        v = {int(i): complex(a) for i, a in enumerate(v) if abs(a) > EPS0}
    else:
        v = prune_state(v)
    nrm = state_norm(v)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"state norm {nrm} is not 1")
    zero = {0: 1.0 + 0j}
    diff2 = sum(abs(a - (1.0 if x == 0 else 0.0)) ** 2 for x, a in v.items())
    if 0 not in v:
        diff2 += 1.0
    if math.sqrt(diff2) <= EPS0:
        return np.eye(1 << k, dtype=complex)
    spec = hh.generalized_pair_reflection(zero, v)
    if isinstance(spec, hh.IdentityMarker):
        # v within ~1e-4 of |0> but not exactly: phase-safe completion
        std = hh.standard_pair_reflection(v, zero)
        u = std.dense(k)
        u[:, 0] *= cmath.exp(1j * std.theta)
        return u
    return spec.dense(k)


# ---------------------------------------------------------------------------
# classical diag x perm residuals


@dataclass
class PermPhase:
    """The operator Diag(phases) . Perm: |x> -> phases[perm[x]] |perm[x]>."""

    perm: np.ndarray
    phases: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "PermPhase":
        return cls(np.arange(dim), np.ones(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return len(self.perm)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return bool(
            np.array_equal(self.perm, np.arange(self.dim))
            and np.max(np.abs(self.phases - 1.0)) <= tol
        )

    def compose(self, other: "PermPhase") -> "PermPhase":
        """self after other (operator product self . other)."""
        perm = self.perm[other.perm]
        phases = np.empty(self.dim, dtype=complex)
        phases[self.perm] = self.phases[self.perm] * other.phases
        return PermPhase(perm, phases)

    def dagger(self) -> "PermPhase":
        inv = np.argsort(self.perm)
        phases = np.empty(self.dim, dtype=complex)
        phases[inv] = self.phases.conjugate()
        return PermPhase(inv, phases)

    def dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        out[self.perm, np.arange(self.dim)] = self.phases[self.perm]
        return out

    def apply_to_state(self, v: dict[int, complex]) -> dict[int, complex]:
        return {
            int(self.perm[k]): a * complex(self.phases[self.perm[k]])
            for k, a in v.items()
        }

    def apply_to_sparse(self, w: SparseIsometry) -> SparseIsometry:
        out = SparseIsometry(w.n, w.m)
        for i, j, a in w.entries():
            i2 = int(self.perm[i])
            out.set(i2, j, a * complex(self.phases[i2]))
        return out


def gate_perm_phase(g: Gate, nq: int) -> PermPhase:
    """PermPhase form of a basis-relabeling or diagonal gate."""
    perm = gate_permutation(g, nq)
    if perm is not None:
        return PermPhase(perm, np.ones(1 << nq, dtype=complex))
    idx = np.arange(1 << nq)
    if isinstance(g, Diagonal):
        v = _subset_values(idx, g.qubits, nq)
        return PermPhase(idx, np.asarray(g.phases)[v])
    if isinstance(g, H0Phase):
        v = _subset_values(idx, g.qubits, nq)
        return PermPhase(idx, np.where(v == 0, cmath.exp(1j * g.phi), 1.0 + 0j))
    raise TypeError(f"{g!r} is not a permutation/diagonal gate")


def sequence_perm_phase(gates: list[Gate], nq: int) -> PermPhase:
    total = PermPhase.identity(1 << nq)
    for g in gates:
        total = gate_perm_phase(g, nq).compose(total)
    return total


# ---------------------------------------------------------------------------
# relaxed (up-to-diagonal) doubly-controlled NOT: 3 CNOTs + Ry rotations


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _margolus_gates(c1: int, c2: int, t: int) -> list[Gate]:
    q = math.pi / 4.0
    return [
        SingleQubit(t, _ry(q), label="ry"),
        CNOT(c2, t),
        SingleQubit(t, _ry(q), label="ry"),
        CNOT(c1, t),
        SingleQubit(t, _ry(-q), label="ry"),
        CNOT(c2, t),
        SingleQubit(t, _ry(-q), label="ry"),
    ]


def _margolus_diag() -> np.ndarray:
    """Diagonal D with (margolus network) = D . Toffoli on 3 qubits."""
    u = np.eye(8, dtype=complex)
    for g in _margolus_gates(0, 1, 2):
        u = apply_gate(u, g, 3)
    toff = gate_unitary(MCX(((0, 1), (1, 1)), 2), 3)
    d = u @ toff.conj().T
    off = d - np.diag(np.diag(d))
    if np.max(np.abs(off)) > 1e-12:
        raise AssertionError("margolus network is not Toffoli-up-to-diagonal")
    phases = np.diag(d)
    snapped = np.round(phases.real).astype(complex) + 1j * np.round(phases.imag)
    if np.max(np.abs(phases - snapped)) > 1e-9:
        raise AssertionError("margolus residual phases are not exact units")
    return snapped


_MARGOLUS_DIAG = _margolus_diag()


def relaxed_mcx2(controls: tuple[tuple[int, int], tuple[int, int]], target: int, nq: int):
    """Doubly-controlled NOT up to a known diagonal, using 3 CNOTs.

    Returns ``(gates, op)`` where ``op`` is the exact PermPhase form of the
    emitted network, equal to (known diagonal) . MCX.  Negative-polarity
    controls are handled by free X conjugation.
    """
    (q1, p1), (q2, p2) = controls
    gates: list[Gate] = []
    dress = [x_gate(q) for q, p in ((q1, p1), (q2, p2)) if p == 0]
    gates.extend(dress)
    gates.extend(_margolus_gates(q1, q2, target))
    gates.extend(dress)
    idx = np.arange(1 << nq)
    local = np.zeros_like(idx)
    for k, q in enumerate((q1, q2, target)):
        local |= ((idx >> (nq - 1 - q)) & 1) << (2 - k)
    xmask = (4 if p1 == 0 else 0) | (2 if p2 == 0 else 0)
    phases = _MARGOLUS_DIAG[local ^ xmask]
    residual = PermPhase(gate_permutation(MCX(controls, target), nq), phases)
    return gates, residual


# ---------------------------------------------------------------------------
# circuit-level unitary extraction and equivalence


def circuit_unitary(
    circuit: StructuredCircuit, restore_tol: float = 1e-10, in_dim: int | None = None
) -> np.ndarray:
    """The action on the data register, a 2^n x ``in_dim`` matrix.

    Simulates the first ``in_dim`` data basis states (default: all 2^n) for
    every allowed ancilla basis state (clean bits fixed to 0, dirty bits
    free) and verifies that the ancillas are restored and the data action
    does not depend on the dirty state.  For an isometry circuit the
    ancilla contract only holds on the isometry's input subspace, so pass
    the input dimension.
    """
    circuit.validate()
    nq = circuit.total_qubits
    if nq > SIM_CAP:
        raise SimulationCapExceeded(f"{nq} qubits exceeds the {SIM_CAP}-qubit cap")
    n, a = circuit.n, len(circuit.ancillas)
    if in_dim is None:
        in_dim = 1 << n
    full = apply_circuit(np.eye(1 << nq, dtype=complex), circuit)
    dirty_positions = [k for k, kind in enumerate(circuit.ancillas) if kind == "dirty"]
    u_data = None
    for bits in range(1 << len(dirty_positions)):
        y = 0
        for k, pos in enumerate(dirty_positions):
            y |= ((bits >> k) & 1) << (a - 1 - pos)
        in_cols = (np.arange(in_dim) << a) + y
        out_rows = (np.arange(1 << n) << a) + y
        block = full[np.ix_(out_rows, in_cols)]
        if u_data is None:
            u_data = block
        # expected embedding: data action on rows (., y), zero elsewhere
        expected = np.zeros(((1 << nq), in_dim), dtype=complex)
        expected[out_rows] = u_data
        err = np.max(np.abs(full[:, in_cols] - expected))
        if err > restore_tol:
            raise CircuitVerificationError(
                f"ancilla discipline violated for ancilla state {y:0{max(a, 1)}b}: "
                f"max deviation {err:.3e}"
            )
    return u_data


def simulate_on_state(
    circuit: StructuredCircuit, data_state: np.ndarray, restore_tol: float = 1e-10
) -> np.ndarray:
    """Apply the circuit to a data state (clean ancillas |0>, dirty checked
    on all their basis states) and return the resulting data state."""
    circuit.validate()
    nq = circuit.total_qubits
    if nq > SIM_CAP:
        raise SimulationCapExceeded(f"{nq} qubits exceeds the {SIM_CAP}-qubit cap")
    n, a = circuit.n, len(circuit.ancillas)
    dirty_positions = [k for k, kind in enumerate(circuit.ancillas) if kind == "dirty"]
    result = None
    for bits in range(1 << len(dirty_positions)):
        y = 0
        for k, pos in enumerate(dirty_positions):
            y |= ((bits >> k) & 1) << (a - 1 - pos)
        full = np.zeros(1 << nq, dtype=complex)
        full[(np.arange(1 << n) << a) + y] = data_state
        full = apply_circuit(full, circuit)
        block = full.reshape(1 << n, 1 << a)
        out = block[:, y].copy()
        leak = math.sqrt(max(0.0, float(np.sum(np.abs(block) ** 2) - np.sum(np.abs(out) ** 2))))
        if leak > restore_tol:
            raise CircuitVerificationError(
                f"ancillas not restored (leak {leak:.3e}) for ancilla state {y}"
            )
        if result is None:
            result = out
        elif np.max(np.abs(out - result)) > restore_tol:
            raise CircuitVerificationError("data action depends on dirty ancilla state")
    return result


@dataclass(frozen=True)
class EquivalenceResult:
    ok: bool
    residual: float
    diag: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.ok


def equivalent(
    circuit: StructuredCircuit,
    mat,
    mode: str = "exact",
    tol: float = 1e-9,
    row_perm=None,
) -> EquivalenceResult:
    """Does the circuit implement the isometry ``mat``?

    ``mode``:
      * ``exact``  -- || U_c I_{n,m} - M ||_F <= tol
      * ``up_to_diagonal`` -- exists unit-modulus diagonal D (recovered
        column by column) with || U_c I_{n,m} - M D ||_F <= tol
      * ``up_to_diag_and_row_perm`` -- additionally applies the caller's
        row-permutation witness to the circuit action first.
    """
    if isinstance(mat, SparseIsometry):
        m_dense = mat.to_dense()
    else:
        m_dense = np.asarray(mat, dtype=complex)
        if m_dense.ndim == 1:
            m_dense = m_dense[:, None]
    ncols = m_dense.shape[1]
    if m_dense.shape[0] != (1 << circuit.n) or ncols > m_dense.shape[0]:
        return EquivalenceResult(False, math.inf)
    a = circuit_unitary(circuit, restore_tol=max(tol, 1e-10), in_dim=ncols)
    if mode == "up_to_diag_and_row_perm":
        if row_perm is None:
            raise ValueError("mode up_to_diag_and_row_perm needs a row_perm witness")
        rp = check_permutation(row_perm, a.shape[0])
        moved = np.empty_like(a)
        moved[rp] = a
        a = moved
    diag = None
    if mode in ("up_to_diagonal", "up_to_diag_and_row_perm"):
        diag = np.ones(ncols, dtype=complex)
        for j in range(ncols):
            ip = np.vdot(m_dense[:, j], a[:, j])
            if abs(ip) > EPS0:
                diag[j] = ip / abs(ip)
        residual = float(np.linalg.norm(a - m_dense * diag[None, :]))
    elif mode == "exact":
        residual = float(np.linalg.norm(a - m_dense))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return EquivalenceResult(residual <= tol, residual, diag)


# ---------------------------------------------------------------------------
# circuit JSON
#
# {"n": int, "ancillas": ["clean"|"dirty", ...], "gates": [{...}, ...]}
# with one object per gate; complex numbers are [re, im] pairs.


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _mat2(m: np.ndarray) -> list:
    return [[_c(m[0, 0]), _c(m[0, 1])], [_c(m[1, 0]), _c(m[1, 1])]]


def gate_to_dict(g: Gate) -> dict:
    if isinstance(g, CNOT):
        return {"kind": "cnot", "control": g.control, "target": g.target}
    if isinstance(g, SingleQubit):
        return {"kind": "single", "target": g.target, "matrix": _mat2(g.matrix), "label": g.label}
    if isinstance(g, MCX):
        return {"kind": "mcx", "controls": [list(c) for c in g.controls], "target": g.target}
    if isinstance(g, MCU):
        return {
            "kind": "mcu",
            "controls": [list(c) for c in g.controls],
            "target": g.target,
            "matrix": _mat2(g.matrix),
        }
    if isinstance(g, Diagonal):
        return {"kind": "diagonal", "qubits": list(g.qubits), "phases": [_c(p) for p in g.phases]}
    if isinstance(g, PermutationGate):
        return {"kind": "permutation", "qubits": list(g.qubits), "map": list(g.mapping)}
    if isinstance(g, Decrement):
        return {"kind": "decrement", "qubits": list(g.qubits)}
    if isinstance(g, SPBlock):
        return {
            "kind": "spblock",
            "qubits": list(g.qubits),
            "state": [[k, a.real, a.imag] for k, a in g.state],
            "inverted": g.inverted,
        }
    if isinstance(g, H0Phase):
        return {"kind": "h0phase", "qubits": list(g.qubits), "phi": g.phi}
    raise TypeError(f"unknown gate {g!r}")


def _mat2_from(d) -> np.ndarray:
    return np.array([[complex(*e) for e in row] for row in d], dtype=complex)


def gate_from_dict(d: dict) -> Gate:
    kind = d["kind"]
    if kind == "cnot":
        return CNOT(d["control"], d["target"])
    if kind == "single":
        return SingleQubit(d["target"], _mat2_from(d["matrix"]), label=d.get("label", "u"))
    if kind == "mcx":
        return MCX(tuple((q, p) for q, p in d["controls"]), d["target"])
    if kind == "mcu":
        return MCU(tuple((q, p) for q, p in d["controls"]), d["target"], _mat2_from(d["matrix"]))
    if kind == "diagonal":
        return Diagonal(tuple(d["qubits"]), tuple(complex(*p) for p in d["phases"]))
    if kind == "permutation":
        return PermutationGate(tuple(d["qubits"]), tuple(d["map"]))
    if kind == "decrement":
        return Decrement(tuple(d["qubits"]))
    if kind == "spblock":
        state = {int(k): complex(re, im) for k, re, im in d["state"]}
        return SPBlock.from_dict(tuple(d["qubits"]), state, d["inverted"])
    if kind == "h0phase":
        return H0Phase(tuple(d["qubits"]), float(d["phi"]))
    raise ValueError(f"unknown gate kind {kind!r}")


def circuit_to_dict(c: StructuredCircuit) -> dict:
    return {
        "n": c.n,
        "ancillas": list(c.ancillas),
        "gates": [gate_to_dict(g) for g in c.gates],
    }


def circuit_from_dict(d: dict) -> StructuredCircuit:
    c = StructuredCircuit(
        int(d["n"]), tuple(d.get("ancillas", ())), [gate_from_dict(g) for g in d["gates"]]
    )
    c.validate()
    return c
