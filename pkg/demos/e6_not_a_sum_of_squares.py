"""The E6 root lattice has integral Gram matrix but is not a sum of squares of
integral linear forms.  The oracle proves it with a finite search tree that can
be replayed independently, and the same run finds a representation for A2.

    python demos/e6_not_a_sum_of_squares.py
"""

from waringforms import Certificate, FieldSpec, HermitianForm, prove_not_representable

Q = FieldSpec.rational()

E6 = [
    [2, -1, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0],
    [0, -1, 2, -1, 0, -1],
    [0, 0, -1, 2, -1, 0],
    [0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 2],
]


def show(name, rows):
    form = HermitianForm.from_rows(Q, rows)
    out = prove_not_representable(form)
    if isinstance(out, Certificate):
        print(f"{name}: no representation; search tree with {out.nodes} nodes, replay ok = {out.replay()}")
    else:
        rep = out.representation
        print(f"{name}: {out.reason}")
        if rep is not None:
            for r in rep.rows:
                print("   ", [str(x) for x in r])


if __name__ == "__main__":
    show("A2", [[2, 1], [1, 2]])
    show("E6", E6)
