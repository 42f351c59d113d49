"""Visibility against the frame choice lambda_1 at fixed dilation difference.

    python scripts/fig2_frame_sweep.py --out frame.csv
"""
import argparse
import csv
from dataclasses import dataclass

from dilacoh import frames


@dataclass
class SweepConfig:
    delta: float = 1e-6
    w0: float = 1e6
    kappa_tau: float = 1e-2
    lambda_max: float = 5.0
    steps: int = 2000


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(SweepConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    p.add_argument("--out", default="frame_sweep.csv")
    args = p.parse_args()
    out = args.out
    cfg = SweepConfig(**{k: v for k, v in vars(args).items() if k != "out"})

    curve = frames.sweep_lambda(cfg.delta, cfg.w0, cfg.kappa_tau, (0.0, cfg.lambda_max), cfg.steps)
    opt = frames.optimal_frame(cfg.delta, cfg.w0, cfg.kappa_tau)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda1", "V"])
        w.writerows(zip(curve.abscissa, curve.v))
    print(f"{cfg}\noptimum lambda1 = {opt.lambda1:.6f}, V = {opt.v:.6f}; wrote {out}")


if __name__ == "__main__":
    main()
