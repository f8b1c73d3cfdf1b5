#!/usr/bin/env python3
"""Nucleation is arbitrarily cheap: bumps with tiny B at vanishing cost.

The corner bump has area(B) = 4*a*delta*(1 - lambda^(-1/2))^2, which can be
made as small as desired by sending lambda -> 1+, while the energy with
a = delta^(1/2) scales like delta^(1/2) -> 0.
"""

import math

from wellscape import (BumpSpec, EnergyParams, b_geometry, energy, make_grid,
                       nucleation_bump)


def main():
    # lambda -> 1+: B shrinks but keeps positive measure
    grid = make_grid(1.0, 1024, 1024)
    print("lambda    area(B)        closed form")
    for lam in (4.0, 2.0, 1.5, 1.2):
        spec = BumpSpec(0.01, 0.01, lam, 1.0)
        area = b_geometry(nucleation_bump(spec, grid)).area_b
        closed = 4 * spec.a * spec.delta_x * (1 - lam**-0.5) ** 2
        print(f"{lam:5.2f}  {area:12.3e}  {closed:12.3e}")

    # a = sqrt(delta): energy ~ delta^(1/2)
    print("\ndelta      E1(bump)     E1/sqrt(delta)")
    for delta in (1e-2, 1e-3, 1e-4):
        a = math.sqrt(delta)
        ny = 2048 if a >= 0.02 else 8192
        grid = make_grid(delta, 512, ny)
        bump = nucleation_bump(BumpSpec(a, delta, 1.1, delta), grid)
        e1 = energy(bump, EnergyParams(0.1, 0.0, 1)).total
        print(f"{delta:8.0e}  {e1:10.5f}  {e1 / math.sqrt(delta):12.4f}")
    print("\nthe normalized column is flat: cost ~ sqrt(delta), so sets of")
    print("positive measure appear at arbitrarily small energy.")


if __name__ == "__main__":
    main()
