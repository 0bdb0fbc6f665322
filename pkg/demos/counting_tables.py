"""Exact counting tables and the two-particle interpolation family.

Runs in well under a second; everything here is rational arithmetic.
"""

from fractions import Fraction

from pairstats.occupancy import (
    be_probability,
    classify_pair,
    fd_probability,
    mb_probability,
    occupancy_vectors,
    pair_family,
)


def table(num_particles, num_states):
    print(f"N = {num_particles} particles over M = {num_states} states")
    print(f"{'vector':<14}{'MB':>10}{'BE':>10}{'FD':>10}")
    totals = [Fraction(0)] * 3
    for vec in occupancy_vectors(num_particles, num_states):
        cells = (
            mb_probability(vec),
            be_probability(num_particles, num_states),
            fd_probability(vec),
        )
        totals = [t + c for t, c in zip(totals, cells)]
        label = ",".join(str(n) for n in vec.counts)
        print(f"{label:<14}" + "".join(f"{str(c):>10}" for c in cells))
    print(f"{'total':<14}" + "".join(f"{str(t):>10}" for t in totals))
    print()


def main():
    table(2, 2)
    table(3, 2)
    table(2, 3)

    print("two-particle side family p20 = p02 = a, p11 = 1 - 2a")
    print(f"{'a':>8}  {'p11':>8}  label")
    for a in (0.0, 0.125, 0.25, 0.295, 1.0 / 3.0, 0.42):
        fam = pair_family(a)
        print(f"{fam.a:>8.4f}  {fam.p11:>8.4f}  {classify_pair(a, tol=5e-3)}")


if __name__ == "__main__":
    main()
