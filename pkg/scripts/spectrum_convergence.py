#!/usr/bin/env python3
"""Eigenvalue convergence study: lambda_1..lambda_5 across mesh refinement
for the fractional kernel, printed as a table with rates."""

import argparse

import numpy as np

import nonlocal_saddle as ns


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--meshes", type=int, nargs="+",
                    default=[16, 32, 64, 128, 256, 512])
    args = ap.parse_args()

    kern = ns.make_fractional_kernel(args.s)
    close = {}
    for n in args.meshes:
        op = ns.assemble(ns.build_uniform_mesh(-1.0, 1.0, n), kern,
                         skip_audit=True)
        close[n] = ns.solve_eigenproblem(op).eigenvalues[:args.count]

    ref = close[args.meshes[-1]]
    header = "    N  " + "".join(f"  lambda_{j+1:<12d}" for j in range(args.count))
    print(header)
    for n in args.meshes:
        row = "".join(f"  {v:<14.8f}" for v in close[n])
        print(f"{n:5d}  {row}")
    print("\nrelative error against the finest mesh:")
    for n in args.meshes[:-1]:
        err = np.abs(close[n] - ref) / ref
        row = "".join(f"  {e:<14.3e}" for e in err)
        print(f"{n:5d}  {row}")


if __name__ == "__main__":
    main()
