"""End-to-end circuit decompositions built on Householder reflections.

All methods reduce the input column by column to a (possibly permuted)
diagonal isometry and return the inverse gate sequence.  Reflections are
emitted "up to diagonal and permutation": each reflection's pivoting stage
yields an operator that is exactly ``Diag . Perm . H`` for a classically
known diagonal and permutation (:class:`~hhsynth.gates.PermPhase`), which
is applied to the working matrix instead of being emitted as gates.  The
accumulated permutation decides each step's current target row, and the
closing permuted-diagonal stage emits one small permutation plus one
diagonal gate that absorb everything.

The gate order convention: ``StructuredCircuit.gates`` lists gates in
application order, so a reduction sequence with operator product
``G_k ... G_1 G_0`` (G_0 applied first to the matrix) yields the circuit
``dagger(G_0), dagger(G_1), ..., dagger(G_k)`` appended after the gates
implementing the reduced form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import costs as C
from . import gates as G
from . import householder as hh
from . import ordering as O
from . import pivoting as P
from .numerics import (
    EPS0,
    NotAnIsometryError,
    SparseIsometry,
    invert_permutation,
    prune_state,
    validate_isometry,
)


@dataclass
class StepTrace:
    """Per-column record of one reduction step (working coordinates)."""

    step: int
    column: int
    target_original: int
    target_current: int
    nnz: int  # nonzeros of the reduced column (1 when skipped)
    s: int  # register size budgeted for the reflection
    skipped: bool
    hh_support: frozenset = frozenset()
    col_support: frozenset = frozenset()
    row_support: frozenset = frozenset()
    modified: tuple = ()
    fill_in: tuple = ()
    eliminated: tuple = ()
    row_relabel: np.ndarray | None = None  # original row -> current row, pre-step


@dataclass
class DecompositionResult:
    circuit: G.StructuredCircuit
    residual_phases: np.ndarray | None  # closing diagonal values (2^m)
    residual_perm: np.ndarray | None  # closing input permutation (2^m)
    audit: C.CostReport
    trace: list[StepTrace]

    @property
    def cnot_total(self) -> int:
        return self.audit.total


def _require_isometry(w, tol: float = 1e-9):
    rep = validate_isometry(w, tol)
    if not rep.ok:
        raise NotAnIsometryError(rep)


def _dress_x(index: int, qubits: tuple[int, ...], n: int) -> list[G.Gate]:
    """Free X gates mapping basis ``index`` to 0 on the listed qubits."""
    return [G.x_gate(q) for q in qubits if (index >> (n - 1 - q)) & 1]


# ---------------------------------------------------------------------------
# one reflection, up to diagonal and permutation


def householder_up_to(
    v: dict[int, complex],
    n: int,
    samples: int = 100,
    seed=0,
    relax_toffoli: bool = True,
) -> tuple[list[G.Gate], G.PermPhase, dict]:
    """Gates implementing the reflection about ``v`` up to diag x perm.

    Returns ``(gates, residual, meta)`` with
    ``product(gates) == residual . H_v`` exactly, where the residual is the
    pivot stage's own operator.  When ``v`` is a single basis state the
    reflection is itself diagonal: no gates are emitted and the residual is
    that diagonal.
    """
    v = prune_state(v)
    if not v:
        raise ValueError("zero vector has no reflection")
    nnz = len(v)
    if nnz == 1:
        idx = next(iter(v))
        phases = np.ones(1 << n, dtype=complex)
        phases[idx] = -1.0
        residual = G.PermPhase(np.arange(1 << n), phases)
        return [], residual, {"s": 0, "nnz": nnz, "insertions": 0}
    s = (nnz - 1).bit_length()
    splitting, blk = P.choose_splitting(v.keys(), n, s, samples=samples, seed=seed)
    plan = P.pivot_plan(v, splitting, blk, relax_toffoli)
    gates: list[G.Gate] = list(plan.gates)
    xs = _dress_x(
        splitting.join(blk, 0), splitting.block_qubits, n
    )
    gates.extend(xs)
    residual = G.sequence_perm_phase(xs, n).compose(plan.residual)
    # register factor of the pivoted vector, after the X layer (block -> 0)
    vtil = plan.register_state
    gates.append(G.SPBlock.from_dict(splitting.register_qubits, vtil, inverted=True))
    gates.append(G.H0Phase(tuple(range(n)), math.pi))
    gates.append(G.SPBlock.from_dict(splitting.register_qubits, vtil, inverted=False))
    meta = {"s": s, "nnz": nnz, "insertions": len(plan.steps)}
    return gates, residual, meta


# ---------------------------------------------------------------------------
# permuted diagonal isometries


def perm_diag_reduce(
    w: SparseIsometry,
    relax_toffoli: bool = True,
) -> tuple[list[G.Gate], np.ndarray, np.ndarray]:
    """Circuit for an isometry with one unit-modulus entry per column.

    Pivots the occupied rows (the column-sum pattern) into one block of the
    canonical splitting (register = trailing m qubits, target block chosen
    greedily), which reduces the matrix to ``I_{n,m} . Perm_m . Diag_m``;
    returns the gate list ``[Diagonal_m, PermutationGate_m, inverted
    grouping gates]`` whose action on an embedded input |j> reproduces the
    matrix, plus the closing diagonal values and permutation as data.
    """
    n, m = w.n, w.m
    rows_of = np.empty(1 << m, dtype=np.int64)
    amp_of = np.empty(1 << m, dtype=complex)
    for j in range(1 << m):
        col = w.col(j)
        if len(col) != 1:
            raise ValueError(f"column {j} does not hold exactly one entry")
        ((r, a),) = col.items()
        if abs(abs(a) - 1.0) > 1e-6:
            raise ValueError(f"column {j} entry is not unit modulus")
        rows_of[j] = r
        amp_of[j] = a / abs(a)
    if len(set(rows_of.tolist())) != (1 << m):
        raise ValueError("occupied rows are not distinct")

    colsum = {int(r): complex(amp_of[j]) / math.sqrt(1 << m) for j, r in enumerate(rows_of)}
    splitting = P.QubitSplitting(tuple(range(n - m)), tuple(range(n - m, n)))
    if m == n:
        blk = 0
    else:
        _, blk = P._score(splitting, set(colsum))
    plan = P.pivot_plan(colsum, splitting, blk, relax_toffoli)
    f_gates = list(plan.gates)
    f_gates += _dress_x(splitting.join(blk, 0), splitting.block_qubits, n)
    f_pp = G.sequence_perm_phase(f_gates[len(plan.gates):], n).compose(plan.residual)

    # grouped matrix: column j's entry sits at plain index perm_f[rows_of[j]]
    perm_m = f_pp.perm[rows_of]
    if np.any(perm_m >= (1 << m)):
        raise AssertionError("grouping failed to land in the top block")
    delta = amp_of * f_pp.phases[perm_m]
    delta = delta / np.abs(delta)

    gates: list[G.Gate] = []
    if np.max(np.abs(delta - 1.0)) > EPS0:
        gates.append(G.Diagonal(tuple(range(n - m, n)), tuple(delta)))
    if not np.array_equal(perm_m, np.arange(1 << m)):
        gates.append(G.PermutationGate(tuple(range(n - m, n)), tuple(int(x) for x in perm_m)))
    gates.extend(G.dagger_sequence(f_gates))
    return gates, delta, perm_m


# ---------------------------------------------------------------------------
# sparse Householder decomposition (basic method)


def sparse_householder_iso(
    w: SparseIsometry,
    strategy: O.EliminationStrategy | None = None,
    regime: C.AncillaRegime = C.AncillaRegime.none(),
    samples: int = 100,
    seed=0,
    relax_toffoli: bool = True,
) -> DecompositionResult:
    """Column-by-column sparse reduction with reflections up to diag x perm.

    At step ``i`` the column ``sigma^{-1}(i)`` of the working matrix is
    reflected onto the current position of original row ``rho^{-1}(i)``;
    the pivot residual is folded into the working matrix and the running
    row relabeling.  Ends with :func:`perm_diag_reduce`.
    """
    _require_isometry(w)
    if strategy is None:
        strategy = O.greedy_order(w)
    n, m = w.n, w.m
    rng = P.as_rng(seed)
    sigma_inv = invert_permutation(strategy.sigma)
    rho_inv = invert_permutation(strategy.rho)
    work = w.copy()
    pi_acc = np.arange(1 << n)
    committed: list[G.Gate] = []
    trace: list[StepTrace] = []
    for i in range(1 << m):
        c = int(sigma_inv[i])
        t = int(pi_acc[rho_inv[i]])
        col = dict(work.col(c))
        relabel = pi_acc.copy()
        if len(col) == 1 and t in col:
            trace.append(
                StepTrace(i, c, int(rho_inv[i]), t, 1, 0, True, row_relabel=relabel)
            )
            continue
        row_support = frozenset(work.row(t))
        u, theta = hh.reduction_vector(col, t)
        rec = hh.reduce_column(work, c, t)
        gates, residual, meta = householder_up_to(
            u, n, samples=samples, seed=rng, relax_toffoli=relax_toffoli
        )
        work = residual.apply_to_sparse(work)
        pi_acc = residual.perm[pi_acc]
        committed.extend(gates)
        trace.append(
            StepTrace(
                i,
                c,
                int(rho_inv[i]),
                t,
                rec.nnz_before,
                meta["s"],
                False,
                hh_support=frozenset(u),
                col_support=frozenset(col),
                row_support=row_support,
                modified=tuple(rec.modified),
                fill_in=tuple(rec.fill_in),
                eliminated=tuple(rec.eliminated),
                row_relabel=relabel,
            )
        )
    pd_gates, delta, perm_m = perm_diag_reduce(work, relax_toffoli=relax_toffoli)
    gates = pd_gates + G.dagger_sequence(committed)
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return DecompositionResult(circuit, delta, perm_m, C.audit_circuit(circuit, regime), trace)


# ---------------------------------------------------------------------------
# dense Householder decompositions


def _reduce_dense_columns(
    v: np.ndarray, sp_qubits: tuple[int, ...], h0_qubits: tuple[int, ...], dress: list[G.Gate]
) -> tuple[list[list[G.Gate]], np.ndarray, list[StepTrace]]:
    """Reduce every column of a dense isometry to its own index.

    Returns (per-step reflection triples, diagonal values, trace).  The
    triple for step i is [SP^, H0 (dressed), SP]; columns already reduced
    are skipped.
    """
    rows, cols = v.shape
    work = v.copy()
    triples: list[list[G.Gate]] = []
    trace: list[StepTrace] = []
    for i in range(cols):
        col = work[:, i]
        off = np.abs(col) ** 2
        if math.sqrt(max(0.0, float(np.sum(off) - off[i]))) <= 1e-12:
            trace.append(StepTrace(i, i, i, i, 1, 0, True))
            continue
        aii = col[i]
        if abs(aii) <= EPS0:
            eith = 1.0 + 0j
        else:
            eith = -aii / abs(aii)
        u = col.copy()
        u[i] -= eith
        u /= math.sqrt(2.0 * (1.0 + abs(aii)))
        col_support = frozenset(int(x) for x in np.flatnonzero(np.abs(col) > EPS0))
        row_support = frozenset(int(x) for x in np.flatnonzero(np.abs(work[i, :]) > EPS0))
        pre = work.copy()
        work = work - 2.0 * np.outer(u, u.conj() @ work)
        changed = np.argwhere(np.abs(work - pre) > 1e-12)
        mod = tuple(
            (int(s), int(t))
            for s, t in changed
            if int(s) != i and int(t) != i
        )
        udict = prune_state({int(k): complex(a) for k, a in enumerate(u)})
        triples.append(
            [G.SPBlock.from_dict(sp_qubits, udict, inverted=True)]
            + dress
            + [G.H0Phase(h0_qubits, math.pi)]
            + dress
            + [G.SPBlock.from_dict(sp_qubits, udict, inverted=False)]
        )
        trace.append(
            StepTrace(
                i, i, i, i,
                int(np.sum(np.abs(col) > EPS0)), len(sp_qubits), False,
                hh_support=frozenset(udict),
                col_support=col_support,
                row_support=row_support,
                modified=mod,
            )
        )
    delta = np.array([work[j, j] for j in range(cols)], dtype=complex)
    body = np.abs(work.copy())
    for j in range(cols):
        body[j, j] = 0.0
    if np.max(body) > 1e-8:
        raise AssertionError("dense reduction left off-diagonal residue")
    delta = delta / np.abs(delta)
    return triples, delta, trace


def dense_householder_iso(
    v: np.ndarray,
    regime: C.AncillaRegime = C.AncillaRegime.none(),
) -> DecompositionResult:
    """Dense isometry via one reflection per column plus a diagonal."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    _require_isometry(v)
    from .numerics import qubit_count

    n = qubit_count(v.shape[0])
    m = qubit_count(v.shape[1])
    triples, delta, trace = _reduce_dense_columns(
        v, tuple(range(n)), tuple(range(n)), []
    )
    gates: list[G.Gate] = []
    if np.max(np.abs(delta - 1.0)) > EPS0:
        gates.append(G.Diagonal(tuple(range(n - m, n)), tuple(delta)))
    for tri in reversed(triples):
        gates.extend(tri)
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return DecompositionResult(circuit, delta, np.arange(1 << m), C.audit_circuit(circuit, regime), trace)


def dense_householder_unitary(
    u: np.ndarray,
    regime: C.AncillaRegime = C.AncillaRegime.none(),
) -> DecompositionResult:
    """Unitary via recursive halving.

    Step k reduces the first half of the remaining block's columns as an
    isometry from n-k-1 to n-k qubits; its phase-fix diagonal and every H0
    acquire the k already-fixed qubits as controls (free X dressing), while
    the state-preparation blocks stay uncontrolled, so with controls off
    each reflection telescopes to the identity.
    """
    u = np.asarray(u, dtype=complex)
    from .numerics import qubit_count

    n = qubit_count(u.shape[0])
    if u.shape[0] != u.shape[1]:
        raise ValueError("not square")
    if n < 1:
        raise ValueError("need at least one qubit")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if dev > 1e-9:
        raise NotAnIsometryError(validate_isometry(u))
    work = u.copy()
    sections: list[list[G.Gate]] = []
    trace: list[StepTrace] = []
    for k in range(n):
        half = 1 << (n - k - 1)
        controls = tuple(range(k))
        dress = [G.x_gate(q) for q in controls]
        triples, delta, tr = _reduce_dense_columns(
            work[:, :half],
            tuple(range(k, n)),
            tuple(range(n)),
            dress,
        )
        # apply the same reflections to the full block to expose U1
        red = work.copy()
        for i in range(half):
            col = red[:, i]
            aii = col[i]
            off = np.abs(col) ** 2
            if math.sqrt(max(0.0, float(np.sum(off) - off[i]))) <= 1e-12:
                continue
            eith = (-aii / abs(aii)) if abs(aii) > EPS0 else 1.0 + 0j
            hv = col.copy()
            hv[i] -= eith
            hv /= math.sqrt(2.0 * (1.0 + abs(aii)))
            red = red - 2.0 * np.outer(hv, hv.conj() @ red)
        if np.max(np.abs(red[:half, half:])) > 1e-8 or np.max(np.abs(red[half:, :half])) > 1e-8:
            raise AssertionError("halving step left cross-block residue")
        section: list[G.Gate] = []
        if k == n - 1:
            # deepest level: the leftover 1x1 block is a phase on |1..1>,
            # folded into this level's diagonal (full width, not halved)
            gamma = complex(red[1, 1] / abs(red[1, 1]))
            if abs(delta[0] - 1.0) > EPS0 or abs(gamma - 1.0) > EPS0:
                subset = controls + (n - 1,)
                phases = np.ones(1 << n, dtype=complex)
                phases[(1 << n) - 2] = delta[0]
                phases[(1 << n) - 1] = gamma
                section.append(G.Diagonal(subset, tuple(phases)))
            work = np.ones((1, 1), dtype=complex)
        else:
            if np.max(np.abs(delta - 1.0)) > EPS0:
                subset = controls + tuple(range(k + 1, n))
                phases = np.ones(1 << len(subset), dtype=complex)
                base = ((1 << k) - 1) << (n - k - 1)
                for j in range(half):
                    phases[base | j] = delta[j]
                section.append(G.Diagonal(subset, tuple(phases)))
            work = red[half:, half:] * delta.conj()[:, None]
        for tri in reversed(triples):
            section.extend(tri)
        sections.append(section)
        trace.extend(tr)
    gates: list[G.Gate] = []
    for section in reversed(sections):
        gates.extend(section)
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return DecompositionResult(circuit, None, None, C.audit_circuit(circuit, regime), trace)


# ---------------------------------------------------------------------------
# fixed envelope method


def fixed_envelope_iso(
    w: SparseIsometry,
    strategy: O.EliminationStrategy | None = None,
    regime: C.AncillaRegime = C.AncillaRegime.none(),
    samples: int = 100,
    seed=0,
    relax_toffoli: bool = True,
) -> DecompositionResult:
    """Envelope-confined reduction: reflect each column onto the top row,
    decrement, repeat; no pivoting inside the reflections.

    The reflection at step i acts on the trailing ``s(i)`` qubits with
    ``2^{s(i)}`` covering the permuted envelope's height above the
    diagonal, which bounds every Householder vector's support a priori.
    """
    _require_isometry(w)
    if strategy is None:
        strategy = O.greedy_order(w)
    n, m = w.n, w.m
    rng = P.as_rng(seed)
    from .numerics import apply_permutations

    env = O.envelope(apply_permutations(w, strategy.rho, strategy.sigma)).env
    sigma_inv = invert_permutation(strategy.sigma)
    work = apply_permutations(w, strategy.rho, np.arange(1 << m))
    reduction: list[G.Gate] = []  # operators applied to the matrix, in order
    if not np.array_equal(strategy.rho, np.arange(1 << n)):
        rho_gate = G.PermutationGate(tuple(range(n)), tuple(int(x) for x in strategy.rho))
        reduction.append(rho_gate)
    dec_gate = G.Decrement(tuple(range(n)))
    dec_pp = G.gate_perm_phase(dec_gate, n)
    trace: list[StepTrace] = []
    for i in range(1 << m):
        c = int(sigma_inv[i])
        col = dict(work.col(c))
        height = int(env[i]) - i
        s_i = height.bit_length()  # ceil(log2(1 + height))
        if max(col) >= (1 << s_i):
            raise G.CircuitVerificationError(
                f"column support escaped the envelope at step {i}"
            )
        if len(col) == 1 and 0 in col:
            trace.append(StepTrace(i, c, 0, 0, 1, s_i, True))
        else:
            row_support = frozenset(work.row(0))
            u, theta = hh.reduction_vector(col, 0)
            if max(u) >= (1 << s_i):
                raise G.CircuitVerificationError("Householder vector escaped the top block")
            rec = hh.reduce_column(work, c, 0)
            reg = tuple(range(n - s_i, n))
            udict = {k: a for k, a in u.items()}
            reduction.append(G.SPBlock.from_dict(reg, udict, inverted=True))
            reduction.append(G.H0Phase(tuple(range(n)), math.pi))
            reduction.append(G.SPBlock.from_dict(reg, udict, inverted=False))
            trace.append(
                StepTrace(
                    i, c, 0, 0, rec.nnz_before, s_i, False,
                    hh_support=frozenset(u),
                    col_support=frozenset(col),
                    row_support=row_support,
                    modified=tuple(rec.modified),
                    fill_in=tuple(rec.fill_in),
                    eliminated=tuple(rec.eliminated),
                )
            )
        reduction.append(dec_gate)
        work = dec_pp.apply_to_sparse(work)
    x_layer = [G.x_gate(q) for q in range(n - m)]
    reduction.extend(x_layer)
    if x_layer:
        work = G.sequence_perm_phase(x_layer, n).apply_to_sparse(work)
    pd_gates, delta, perm_m = perm_diag_reduce(work, relax_toffoli=relax_toffoli)
    gates = pd_gates + G.dagger_sequence(reduction)
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return DecompositionResult(circuit, delta, perm_m, C.audit_circuit(circuit, regime), trace)


# ---------------------------------------------------------------------------
# no fill-in method


def _remap_gate(g: G.Gate, table: dict[int, int]) -> G.Gate:
    if isinstance(g, G.CNOT):
        return G.CNOT(table[g.control], table[g.target])
    if isinstance(g, G.SingleQubit):
        return G.SingleQubit(table[g.target], g.matrix, label=g.label)
    if isinstance(g, G.MCX):
        return G.MCX(tuple((table[q], p) for q, p in g.controls), table[g.target])
    if isinstance(g, G.MCU):
        return G.MCU(tuple((table[q], p) for q, p in g.controls), table[g.target], g.matrix)
    if isinstance(g, G.Diagonal):
        return G.Diagonal(tuple(table[q] for q in g.qubits), g.phases)
    if isinstance(g, G.PermutationGate):
        return G.PermutationGate(tuple(table[q] for q in g.qubits), g.mapping)
    if isinstance(g, G.Decrement):
        return G.Decrement(tuple(table[q] for q in g.qubits))
    if isinstance(g, G.SPBlock):
        return G.SPBlock(tuple(table[q] for q in g.qubits), g.state, g.inverted)
    if isinstance(g, G.H0Phase):
        return G.H0Phase(tuple(table[q] for q in g.qubits), g.phi)
    raise TypeError(f"unknown gate {g!r}")


def no_fill_in_iso(
    w: SparseIsometry,
    regime: C.AncillaRegime = C.AncillaRegime.with_dirty(1),
    samples: int = 100,
    seed=0,
    relax_toffoli: bool = True,
) -> DecompositionResult:
    """Fill-in-free reduction using one clean ancilla as a new top qubit.

    The input embeds as the top block of an (n+1)-qubit isometry whose
    bottom 2^n rows are empty; column i reduces onto empty row 2^n + i, so
    the update formula never touches another column.  Register sizes come
    from the original column supports.
    """
    _require_isometry(w)
    n, m = w.n, w.m
    nn = n + 1
    rng = P.as_rng(seed)
    work = SparseIsometry(nn, m)
    for i, j, a in w.entries():
        work.set(i, j, a)
    pi_acc = np.arange(1 << nn)
    committed: list[G.Gate] = []
    trace: list[StepTrace] = []
    for i in range(1 << m):
        c = i
        t = int(pi_acc[(1 << n) + i])
        col = dict(work.col(c))
        relabel = pi_acc.copy()
        row_support = frozenset(work.row(t))
        u, theta = hh.reduction_vector(col, t)
        rec = hh.reduce_column(work, c, t)
        if rec.fill_in:
            raise G.CircuitVerificationError("fill-in occurred in the no-fill-in method")
        gates, residual, meta = householder_up_to(
            u, nn, samples=samples, seed=rng, relax_toffoli=relax_toffoli
        )
        work = residual.apply_to_sparse(work)
        pi_acc = residual.perm[pi_acc]
        committed.extend(gates)
        trace.append(
            StepTrace(
                i, c, (1 << n) + i, t, rec.nnz_before, meta["s"], False,
                hh_support=frozenset(u),
                col_support=frozenset(col),
                row_support=row_support,
                modified=tuple(rec.modified),
                fill_in=tuple(rec.fill_in),
                eliminated=tuple(rec.eliminated),
                row_relabel=relabel,
            )
        )
    pd_gates, delta, perm_m = perm_diag_reduce(work, relax_toffoli=relax_toffoli)
    virtual_gates = pd_gates + G.dagger_sequence(committed)
    table = {0: n}
    table.update({q + 1: q for q in range(n)})
    gates = [_remap_gate(g, table) for g in virtual_gates]
    circuit = G.StructuredCircuit(n, ("clean",), gates)
    circuit.validate()
    return DecompositionResult(circuit, delta, perm_m, C.audit_circuit(circuit, regime), trace)


# ---------------------------------------------------------------------------
# permutations and controlled single-qubit gates via reflections


_R0 = np.array([[1, -1], [1, 1]], dtype=complex) / math.sqrt(2.0)
_R1 = np.array([[1, 1], [-1, 1]], dtype=complex) / math.sqrt(2.0)


def _transposition_gates(i: int, j: int, n: int) -> list[G.Gate]:
    """Reflection exchanging basis states |i> and |j| exactly.

    At most n-1 shared-control CNOTs fold the pair onto one qubit, a free
    rotation maps the fold to |i>, and the dressed reflection about |i>
    costs one (n-1)-controlled NOT.
    """
    diffs = [q for q in range(n) if ((i >> (n - 1 - q)) & 1) != ((j >> (n - 1 - q)) & 1)]
    k = diffs[0]
    pol = (j >> (n - 1 - k)) & 1
    adj: list[G.Gate] = []
    for q in diffs[1:]:
        adj.append(G.CNOT(k, q) if pol == 1 else G.MCX(((k, 0),), q))
    bk = (i >> (n - 1 - k)) & 1
    rot = G.SingleQubit(k, _R0 if bk == 0 else _R1, label="fold")
    dress = _dress_x(i, tuple(range(n)), n)
    out: list[G.Gate] = []
    out.extend(adj)
    out.append(rot)
    out.extend(dress)
    out.append(G.H0Phase(tuple(range(n)), math.pi))
    out.extend(dress)
    out.extend(G.dagger(rot))
    out.extend(reversed(adj))
    return out


def perm_via_householder(perm, regime: C.AncillaRegime = C.AncillaRegime.none()) -> G.StructuredCircuit:
    """Permutation gate as a product of basis-state transpositions.

    Reduces the permutation matrix column by column; each non-fixed column
    costs one transposition reflection (2(n-1) CNOTs + one dressed
    (n-1)-controlled NOT), at most 2^n - 1 of them in total.
    """
    p = np.asarray(perm, dtype=np.int64)
    from .numerics import check_permutation, qubit_count

    n = qubit_count(len(p))
    check_permutation(p, 1 << n)
    cur = p.copy()
    transpositions: list[list[G.Gate]] = []
    pos_of = invert_permutation(cur)  # column holding each row value
    for i in range(1 << n):
        j = int(cur[i])
        if j == i:
            continue
        transpositions.append(_transposition_gates(i, j, n))
        ci = int(pos_of[i])  # column currently mapping to row i
        cur[i], cur[ci] = i, j
        pos_of[i], pos_of[j] = i, ci
    gates: list[G.Gate] = []
    for tr in reversed(transpositions):
        gates.extend(tr)
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return circuit


def controlled_u_via_householder(
    k: int, u: np.ndarray, regime: C.AncillaRegime = C.AncillaRegime.none()
) -> tuple[G.StructuredCircuit, np.ndarray]:
    """k-controlled single-qubit gate up to a diagonal, via one reflection.

    Emits two free single-qubit gates around one dressed reflection about
    the basis state |1..10>, so the CNOT cost equals one k-controlled NOT.
    Returns (circuit, residual diagonal) with
    ``circuit = C_k(u) . Diag(residual)`` exactly.
    """
    if k < 1:
        raise ValueError("need at least one control")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or np.max(np.abs(u.conj().T @ u - np.eye(2))) > 1e-10:
        raise ValueError("u must be a 2x2 unitary")
    n = k + 1
    dim = 1 << n
    residual = np.ones(dim, dtype=complex)
    if np.max(np.abs(u - np.diag(np.diag(u)))) <= EPS0:
        residual[dim - 2] = u[0, 0]
        residual[dim - 1] = u[1, 1]
        circuit = G.StructuredCircuit(n, (), [])
        return circuit, residual
    alpha, beta = u[0, 0], u[1, 0]
    target_idx = dim - 2
    eith = (-alpha / abs(alpha)) if abs(alpha) > EPS0 else 1.0 + 0j
    wvec = np.array([alpha - eith, beta], dtype=complex)
    wvec /= math.sqrt(2.0 * (1.0 + abs(alpha)))
    gh = np.array([[wvec[0], -wvec[1].conjugate()], [wvec[1], wvec[0].conjugate()]], dtype=complex)
    dress = _dress_x(target_idx, tuple(range(n)), n)
    gates: list[G.Gate] = []
    gates.append(G.SingleQubit(n - 1, gh.conj().T, label="fold"))
    gates.extend(dress)
    gates.append(G.H0Phase(tuple(range(n)), math.pi))
    gates.extend(dress)
    gates.append(G.SingleQubit(n - 1, gh, label="fold"))
    # residual: H (2x2 block on the last two basis states) = C_k(u) . D
    h2 = np.eye(2, dtype=complex) - 2.0 * np.outer(wvec, wvec.conj())
    d2 = u.conj().T @ h2
    if np.max(np.abs(d2 - np.diag(np.diag(d2)))) > 1e-10:
        raise AssertionError("controlled-u residual is not diagonal")
    residual[dim - 2] = d2[0, 0]
    residual[dim - 1] = d2[1, 1]
    circuit = G.StructuredCircuit(n, (), gates)
    circuit.validate()
    return circuit, residual
