"""Balanced reduction of a skewed Gaussian-integer form.

A form with very different scales on the diagonal is hidden behind a unimodular change
of basis.  Reduction recovers the successive minima h_i, and balancing brings
the unipotent factor T and its inverse within the entry bounds c(j - i).

    python demos/reduction_walkthrough.py
"""

from waringforms import FieldSpec, HermitianForm, Matrix, balanced_hkz

Zi = FieldSpec.imag_quad(1)
w = Zi.omega


def fmt(M):
    return "\n".join("  " + "  ".join(f"{str(x):>10}" for x in r) for r in M.rows)


if __name__ == "__main__":
    D = Matrix(Zi, [[3, 1 + w, 0], [1 - w, 50, 7 + 2 * w], [0, 7 - 2 * w, 4000]])
    U = Matrix(Zi, [[1, 2 + w, 0], [0, 1, -3 * w], [0, 0, 1]]) @ Matrix(Zi, [[1, 0, 0], [1 - w, 1, 0], [5, 2, 1]])
    form = HermitianForm(U.H @ D @ U)
    print("input Gram matrix:")
    print(fmt(form.gram))

    red = balanced_hkz(form)
    print("h =", [str(h) for h in red.H])
    print("T =")
    print(fmt(red.T))
    for key, val in red.report().items():
        print(f"{key:>24}: {val}")
