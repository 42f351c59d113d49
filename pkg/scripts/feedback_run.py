"""Mirror feedback: trapped excitation and visibility on and off resonance.

    python scripts/feedback_run.py --t-max 20
"""
import argparse
import math
from dataclasses import dataclass

from dilacoh import feedback
from dilacoh.config import PhysicsConfig


@dataclass
class FeedbackRunConfig:
    delta: float = 1e-3
    w0: float = 1e3
    kappa_tau: float = 1e-2
    n: int = 1
    t_max: float = 20.0


def report(label, cfg, fb, t_max):
    res = feedback.resonance_check(cfg, fb)
    run = feedback.integrate_dde(cfg, fb, t_max, min(fb.delays(cfg)) / 20)
    vis = feedback.visibility_feedback(cfg, fb, t_max)
    print(f"{label}: phi1 = {fb.phi1:.4f}, phi2/pi = {fb.phi2 / math.pi:.6f}, "
          f"branch 2 resonant = {res.on_resonance_2}, branch 1 excluded = {res.excluded_1}")
    print(f"  |c1|^2 = {run.population(1)[-1]:.3e}, |c2|^2 = {run.population(2)[-1]:.5f} "
          f"(exact trapped {feedback.bound_state_fraction(cfg, fb):.5f}), V = {vis.v:.4f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(FeedbackRunConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    cfg = FeedbackRunConfig(**vars(p.parse_args()))
    asym = PhysicsConfig.centered(cfg.delta, cfg.w0, cfg.kappa_tau)
    report("asymmetric", asym,
           feedback.FeedbackConfig.from_geometry(asym, feedback.resonant_r(asym, cfg.n), cfg.n), cfg.t_max)
    sym = PhysicsConfig.centered(0.0, cfg.w0, 0.0)
    report("symmetric", sym,
           feedback.FeedbackConfig.from_geometry(sym, feedback.resonant_r(sym, cfg.n), cfg.n), cfg.t_max)


if __name__ == "__main__":
    main()
