"""Exact bookkeeping for Maynard weights on the twin tuple.

With F = 1 - x1 - x2 on the simplex and the presift Z = 6, the weights
lambda are obtained from eta = F(log ratios) by Mobius inversion.  The
quadratic form S0 and the prime-weighted form S1 are computed twice,
directly from lambda and through eta, and must agree as rationals.  The
S0 diagonal term is compared with the rigorous off-diagonal bound, and
the finite sums with their asymptotic targets.
"""

from primegap import SimplexPolynomial, Tuple
from primegap.sums import asymptotic_targets, s0_direct, s0_eta, s1_direct, s1_eta
from primegap.tuples import build_presift
from primegap.weights import WeightSpec, eta1_table, eta_from_F, eta_from_lambda, lambda_from_eta


def main():
    twin = Tuple((0, 2))
    F = SimplexPolynomial.linear([-1, -1], 1)
    ps = build_presift(twin, 3)
    print(f"presift Z = {ps.Z}, c0 = {ps.c0}")
    print(f"{'D':>4} {'support':>8} {'S0 exact':>12} {'S1 exact':>12} {'|S0 - main|':>12} {'bound':>12}")
    for D in (10, 30, 100, 200):
        spec = WeightSpec("Maynard", twin, D, F=F, presift=ps)
        eta = eta_from_F(spec)
        lam = lambda_from_eta(eta)
        assert eta_from_lambda(lam).entries == eta.entries
        rep = s0_eta(eta, ps)
        s0 = s0_direct(lam)
        s1 = s1_direct(lam)
        assert s0 == rep.full
        assert s1 == s1_eta(eta1_table(eta, ps, lam))
        print(
            f"{D:>4} {len(lam.entries):>8} {float(s0):>12.6f} {float(s1):>12.6f} "
            f"{abs(float(rep.defect)):>12.4g} {float(rep.bound):>12.4g}"
        )

    D = 200
    tg = asymptotic_targets(F, D, ps)
    print(f"\nD = {D}: I(F) = {tg['I']}, J1(F) = {tg['J1']}")
    for key in ("target_S0", "target_S1", "ratio"):
        print(f"  {key:10s} {tg[key]}")


if __name__ == "__main__":
    main()
