"""The CNOT cost model at a glance.

Every structured gate is priced by the cheapest applicable closed form
given the ancilla regime; spare circuit qubits a gate does not touch count
as dirty helpers automatically.  More ancillas never cost more.
"""

import hhsynth as hh

regimes = {
    "none": hh.AncillaRegime.none(),
    "dirty:1": hh.AncillaRegime.with_dirty(1),
    "dirty:3": hh.AncillaRegime.with_dirty(3),
    "clean:3": hh.AncillaRegime.with_clean(3),
}

print("k-controlled NOT on a tight register (k + 1 qubits):")
header = f"{'k':>3} " + "".join(f"{name:>9}" for name in regimes)
print(header)
for k in range(1, 9):
    row = f"{k:>3} "
    for regime in regimes.values():
        row += f"{hh.cost_mcx(k, k + 1, regime):>9}"
    print(row)

print("\nsame gate with 4 spare circuit qubits (free dirty workspace):")
print(header)
for k in range(1, 9):
    row = f"{k:>3} "
    for regime in regimes.values():
        row += f"{hh.cost_mcx(k, k + 5, regime):>9}"
    print(row)

print("\nother structured gates:")
print(f"{'qubits':>7} {'dense SP':>9} {'diagonal':>9} {'perm none':>10} {'perm dirty':>11}")
for q in range(1, 9):
    print(
        f"{q:>7} {hh.cost_dense_sp(q):>9} {hh.cost_diagonal(q):>9} "
        f"{hh.cost_permutation(q):>10} "
        f"{hh.cost_permutation(q, hh.AncillaRegime.with_dirty(1)):>11}"
    )

print("\nauditing a small circuit under two regimes:")
import math

from hhsynth import gates as G

circuit = G.StructuredCircuit(
    5,
    (),
    [
        G.CNOT(0, 1),
        G.MCX(((0, 1), (1, 1), (2, 1)), 4),
        G.H0Phase((0, 1, 2, 3, 4), math.pi),
        G.Decrement((0, 1, 2, 3, 4)),
    ],
)
for name, regime in regimes.items():
    print(f"  {name:<8} total = {hh.audit_circuit(circuit, regime).total}")
