"""Tabulate the closed-form analysis across a channel grid.

For each BSC flip probability: capacity, the operating pass count, the
divergence-based and Gallager exponents at that rate.  For each AWGN SNR:
capacity and the constellation recipe hitting a chosen capacity gap.

    python scripts/exponent_table.py
"""

import argparse

from spinal.exponents import (
    awgn_report,
    bsc_report,
    capacity_awgn,
    capacity_bsc,
    choose_pass_count,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--bsc", type=str, default="0.01,0.05,0.1,0.2")
    ap.add_argument("--snr", type=str, default="1,4,10")
    ap.add_argument("--gap", type=float, default=0.1, help="AWGN capacity gap")
    args = ap.parse_args()

    print(f"{'p':>6}  {'C':>7}  {'L':>3}  {'R=k/L':>7}  {'case':>4}  "
          f"{'bound exp':>9}  {'rho*':>6}  {'E_r(R)':>8}")
    for p in (float(x) for x in args.bsc.split(",")):
        cap = capacity_bsc(p)
        L = choose_pass_count(args.k, cap)
        rep = bsc_report(p, args.k / L)
        print(f"{p:>6.3f}  {cap:>7.4f}  {L:>3}  {rep.rate:>7.4f}  {rep.bound_case:>4}  "
              f"{rep.bound_exponent:>9.5f}  {rep.rho_star:>6.3f}  {rep.e0_exponent:>8.5f}")

    print()
    print(f"{'SNR':>5}  {'C':>7}  {'R':>7}  {'zeta*':>9}  {'beta':>6}  {'c':>3}  "
          f"{'exponent':>8}")
    for snr in (float(x) for x in args.snr.split(",")):
        cap = capacity_awgn(snr, 1.0)
        rep = awgn_report(snr, 1.0, cap - args.gap)
        print(f"{snr:>5.1f}  {cap:>7.4f}  {rep.rate:>7.4f}  {rep.zeta:>9.1f}  "
              f"{rep.beta:>6.3f}  {rep.c:>3}  {rep.awgn_exponent:>8.4f}")


if __name__ == "__main__":
    main()
