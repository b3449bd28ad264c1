"""Walk through the exact qc pipeline on the three seven-dimensional groups.

For each group: solve the Biquard connection, read off the scalar curvature S,
split the torsion, and evaluate the qc-conformal curvature WR.
"""

from qcgeom.biquard import curvature, solve_biquard, standard_qc, torsion_decompose
from qcgeom.conformal import is_zero_tensor, wr_tensor

for name in ("L1", "L2", "L3", "heisenberg7"):
    q = standard_qc(name)
    conn = solve_biquard(q)
    R = curvature(conn)
    td = torsion_decompose(q, conn, R)
    WR = wr_tensor(R, td, q)
    print(f"{name:12s} S = {td.S!s:5s} torsion-free: {td.torsion_free!s:5s} "
          f"R(e1,e2,e3,e4) = {R[0, 1, 2, 3]!s:5s} WR flat: {is_zero_tensor(WR)}")

# the Christoffel table is keyed (a, b, c) -> Gamma^c_ab, one-based
table = solve_biquard(standard_qc("L1")).christoffel_table()
print("\nnonzero Christoffel symbols on L1:", len(table))
for key in sorted(table)[:6]:
    a, b, c = key
    print(f"  Gamma^{c}_{a}{b} = {table[key]}")
