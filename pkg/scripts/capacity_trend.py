"""Rate-versus-beam-width experiment at desk scale.

Runs genie-stopped sessions over a BSC for several beam widths and reports
how the achieved rate approaches capacity as the beam grows.  Writes the
raw per-trial CSV next to the summary table.

    python scripts/capacity_trend.py --trials 200 --out trend.csv
"""

import argparse
import statistics

from spinal.channels import Bsc
from spinal.encoder import CodeParams
from spinal.exponents import capacity_bsc
from spinal.hashfam import HashSeed
from spinal.session import SWEEP_CSV_HEADER, Genie, SweepCell, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.05, help="BSC flip probability")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--nu", type=int, default=32)
    ap.add_argument("--tail-guard", type=int, default=32)
    ap.add_argument("--beams", type=str, default="1,16,256,1024")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=str, default="7e57")
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", type=str, default=None, help="optional CSV path")
    args = ap.parse_args()

    master = HashSeed.from_hex(args.seed)
    params = CodeParams(n=args.n, k=args.k, nu=args.nu, seed=master)
    beams = [int(b) for b in args.beams.split(",")]
    cells = [SweepCell(params=params, channel=Bsc(args.p), beam_width=b) for b in beams]
    rule = Genie(tail_guard=args.tail_guard)

    rows, per_cell = sweep(cells, args.trials, rule, master, threads=args.threads)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join([SWEEP_CSV_HEADER] + rows) + "\n")

    cap = capacity_bsc(args.p)
    print(f"BSC(p={args.p})  capacity C = {cap:.4f}  n={args.n} k={args.k} nu={args.nu} "
          f"tail_guard={args.tail_guard}  trials={args.trials}")
    print(f"{'B':>6}  {'success':>8}  {'median rate':>11}  {'mean rate':>9}  {'C - mean':>8}")
    for beam, results in zip(beams, per_cell):
        rates = [r.achieved_rate for r in results]
        success = sum(r.success for r in results) / len(results)
        mean = sum(rates) / len(rates)
        print(f"{beam:>6}  {success:>8.3f}  {statistics.median(rates):>11.3f}  "
              f"{mean:>9.3f}  {cap - mean:>8.3f}")


if __name__ == "__main__":
    main()
