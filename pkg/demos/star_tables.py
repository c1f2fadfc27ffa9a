"""Print the Hodge star on every basis form for both signatures and the
eigenvalues of the star on 2-forms.

    python3 demos/star_tables.py
"""
import numpy as np

from ymforms.forms import basis, basis_name
from ymforms.hodge import build_star_table, self_dual_eigenvalue

for metric in ("euclidean", "minkowski"):
    t = build_star_table(metric)
    print(f"{metric}:")
    for p in range(5):
        for b in basis(p):
            img = " + ".join(f"({v.real:g}{v.imag:+g}i) {basis_name(k)}" for k, v in t.image(b).items())
            print(f"  *({basis_name(b)}) = {img}")
    ev = np.linalg.eigvals(t.tables[2]) / self_dual_eigenvalue(metric)
    print("  2-form eigenvalues / lambda:", np.round(np.sort(ev.real), 12).tolist())
    print()
