#!/usr/bin/env python3
"""The branched seed: O(eps) cost with a fixed transformed fraction.

The seed is a y-periodic sawtooth with parabolic caps on [L/2, L], taped to
zero on [0, L/2].  Its surface + elastic cost scales like eps while area(B)
stays a fixed fraction of L; the ratio cost/area is what drives the upper
bound on the critical well-depth.
"""

from wellscape import (BranchedSpec, EnergyParams, b_geometry, branched_seed,
                       energy, make_grid)


def main():
    L = 1.0
    print("eps        N   c       cost=E3-E3(0)  cost/eps   area(B)    cost/area")
    for eps in (1e-4, 1e-3, 1e-2):
        grid = make_grid(L, 1024, 1024)
        spec = BranchedSpec.from_epsilon(eps, L)
        seed = branched_seed(spec, grid)
        br = energy(seed, EnergyParams(eps, 0.0, 3))
        cost = br.surface + br.elastic
        area = b_geometry(seed).area_b
        print(f"{eps:8.0e}  {spec.N:2d}  {spec.c:.4f}  {cost:12.6f}  "
              f"{cost / eps:8.3f}  {area:.5f}  {cost / area:10.6f}")
    print("\ncost/eps sits in a narrow band (the O(eps) bookkeeping) and")
    print("area(B)/L stays near 1/8 = l/4 / L independently of eps;")
    print("hence any well-depth above ~ 8 * (cost/eps) * eps/L beats austenite.")


if __name__ == "__main__":
    main()
