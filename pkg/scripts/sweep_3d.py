"""Compare 1D and 3D visibilities across tau.

    python scripts/sweep_3d.py --w0 10 --tau-max 5
"""
import argparse
from dataclasses import dataclass

import numpy as np

from dilacoh import model, three_d
from dilacoh.config import PhysicsConfig


@dataclass
class Sweep3dConfig:
    lambda1: float = 1.0
    delta: float = 0.01
    w0: float = 10.0
    tau_max: float = 5.0
    steps: int = 26


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Sweep3dConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    cfg = Sweep3dConfig(**vars(p.parse_args()))
    print(f"{'kappa_tau':>10} {'V_1d':>10} {'V_3d':>10} {'regime':>8}")
    for kt in np.linspace(0.0, cfg.tau_max, cfg.steps):
        phys = PhysicsConfig.from_delta(cfg.lambda1, cfg.delta, cfg.w0, float(kt))
        print(f"{kt:10.4f} {model.visibility_asymptotic(phys):10.6f} "
              f"{three_d.visibility_3d_closed(phys):10.6f} {three_d.classify(phys).value:>8}")


if __name__ == "__main__":
    main()
