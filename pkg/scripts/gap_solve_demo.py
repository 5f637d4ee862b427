#!/usr/bin/env python3
"""End-to-end demo of the gap (saddle point) case: verify hypotheses,
solve with Newton, probe the saddle geometry, and report the Morse index."""

import argparse

import numpy as np

import nonlocal_saddle as ns
from nonlocal_saddle import nonlinearity as nl


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--m", type=float, default=20.0)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--g", type=float, default=1.0)
    args = ap.parse_args()

    kern = ns.make_fractional_kernel(args.s)
    audit = ns.audit_kernel(kern)
    print(f"kernel audit: K1 integral = {audit.k1_integral:.6f}, "
          f"passed = {audit.passed}")

    mesh = ns.build_uniform_mesh(-1.0, 1.0, args.n)
    op = ns.assemble(mesh, kern, audit=audit)
    sp = ns.solve_eigenproblem(op)
    print("lambda_1..5:", np.array2string(sp.eigenvalues[:5], precision=4))

    spec = nl.saturating(args.m, args.delta, nl.constant_profile(args.g))
    cls = nl.classify(spec, sp)
    print(f"classification: {cls.case.value}, k = {cls.k}")
    if cls.case is not nl.Case.GAP:
        raise SystemExit("pick m, delta inside a spectral gap")
    f2 = nl.check_f2_gap(spec, sp, cls.k)
    print(f"(f2) slope gap check: passed = {f2.passed}, "
          f"slopes {f2.slope_range} in gap {tuple(round(v, 4) for v in f2.gap)}")

    rep = ns.solve_case_b(op, sp, spec, ns.SolverOptions(), classification=cls)
    print(f"Newton: {rep.iterations} iterations, "
          f"residual {rep.residual_inf:.3e}, J = {rep.j_value:.6f}")
    print(f"Morse index: {ns.morse_index(op, spec, rep.solution)} "
          f"(expected {cls.k})")

    verdict = ns.uniqueness_probe(op, sp, spec, cls.k, n_starts=8,
                                  opts=ns.SolverOptions())
    print(f"uniqueness probe: {verdict.kind}, max pairwise Z-distance "
          f"{verdict.max_pairwise_z:.3e}")

    probe = ns.geometry_probe(op, sp, spec, cls.k)
    print(f"geometry probe: separated = {probe.separated}")
    for sample in probe.head:
        print(f"  head  T = {sample.radius:>7.1f}  max J/|u|_L2^2 = "
              f"{sample.extreme_ratio_l2:+.6f}")
    for sample in probe.tail:
        print(f"  tail  T = {sample.radius:>7.1f}  min J/|u|_L2^2 = "
              f"{sample.extreme_ratio_l2:+.6f}")


if __name__ == "__main__":
    main()
