"""Certified constants and the threshold G_E(n) for each field, plus the
lower bound on the first rank where sqrt(s) L stops embedding in a sum of
squares, for s = 10^k.

    python demos/bounds_and_phi.py
"""

from waringforms import FieldSpec
from waringforms.decomposer import default_profile

if __name__ == "__main__":
    fields = [FieldSpec.rational()] + [FieldSpec.imag_quad(l) for l in (1, 3, 163)]
    print(f"{'field':>12} {'D1':>8} {'D2':>8} {'D3':>10} {'G(2)':>12} {'G(8)':>12}")
    for f in fields:
        p = default_profile(f)
        name = "Q" if f.is_rational else f"Q(sqrt-{f.ell})"
        print(f"{name:>12} {float(p.D1):8.3g} {float(p.D2):8.3g} {float(p.D3):10.4g} {float(p.G(2)):12.4g} {float(p.G(8)):12.4g}")

    q = default_profile(FieldSpec.rational())
    lo, hi = q.k_E()
    print(f"\nk_Q in [{float(lo):.9f}, {float(hi):.9f}]")
    for k in (0, 3, 6, 9, 12):
        print(f"s = 10^{k:<2}  phi lower bound = {q.phi_lower_bound(10**k)}")
