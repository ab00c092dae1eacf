"""Print both sides of the LkGAN and RényiGAN identities for a few density pairs.

    python scripts/verify_identities.py
"""

import math

from renyigan_lab import oracle as O
from renyigan_lab.distributions import gaussian, histogram
from renyigan_lab.losses import LkganParams

PAIRS = {
    "N(0,1) vs N(1,1)": O.DensityPair(gaussian(0, 1), gaussian(1, 1)),
    "N(0,1) vs N(0.5,2)": O.DensityPair(gaussian(0, 1), gaussian(0.5, 2)),
    "hist vs hist": O.DensityPair(histogram([0, 1, 2, 3], [0.2, 0.5, 0.3]),
                                  histogram([0, 1, 2, 3], [0.4, 0.4, 0.2])),
    "disjoint hists": O.DensityPair(histogram([0, 1], [1.0]), histogram([2, 3], [1.0])),
}


def main():
    print(f"{'pair':20s} {'identity':18s} {'lhs':>16s} {'rhs':>16s} {'gap':>10s}")
    for label, pair in PAIRS.items():
        for version in ("v1", "v2"):
            for k in (1.0, 2.0, 3.0):
                c = O.verify_lkgan_identity(pair, LkganParams.version(version, k))
                print(f"{label:20s} {f'LkGAN-{version} k={k:g}':18s} {c.lhs:16.10f} {c.rhs:16.10f} "
                      f"{c.gap:10.2e}")
        for alpha in (0.5, 2.0, 3.0, 9.0):
            c = O.verify_renyigan_identity(pair, alpha)
            print(f"{label:20s} {f'RenyiGAN a={alpha:g}':18s} {c.lhs:16.10f} {c.rhs:16.10f} "
                  f"{c.gap:10.2e}")
    print(f"lower bound -2 log 2 = {-2 * math.log(2):.10f}")


if __name__ == "__main__":
    main()
