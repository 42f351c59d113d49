import math

import pytest

from dilacoh.config import Direction, DomainError, PhysicsConfig


def test_from_delta_sets_lambda2():
    cfg = PhysicsConfig.from_delta(1.2, 0.3, 5.0, 0.1)
    assert cfg.lambda2 == pytest.approx(1.5)
    assert cfg.delta == pytest.approx(0.3)
    assert cfg.tau == cfg.kappa_tau


def test_centered_frame_is_symmetric():
    cfg = PhysicsConfig.centered(0.2, 10.0, 0.0)
    assert (cfg.lambda1, cfg.lambda2) == pytest.approx((0.9, 1.1))
    with pytest.raises(DomainError):
        PhysicsConfig.centered(2.0, 10.0, 0.0)


@pytest.mark.parametrize("kwargs", [
    dict(lambda1=0.0, lambda2=1.0, w0=1.0, kappa_tau=0.0),
    dict(lambda1=1.0, lambda2=-1.0, w0=1.0, kappa_tau=0.0),
    dict(lambda1=1.0, lambda2=1.0, w0=0.0, kappa_tau=0.0),
    dict(lambda1=1.0, lambda2=1.0, w0=1.0, kappa_tau=-0.1),
    dict(lambda1=math.nan, lambda2=1.0, w0=1.0, kappa_tau=0.0),
])
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(DomainError):
        PhysicsConfig(**kwargs)


def test_decay_rate_is_lambda_squared():
    cfg = PhysicsConfig(1.5, 2.0, 3.0, 0.0)
    assert cfg.decay_rate(1) == pytest.approx(2.25)
    assert cfg.decay_rate(2) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        cfg.decay_rate(3)


def test_direction_parsing():
    assert Direction.parse("UP") is Direction.UPWARD
    assert Direction.parse("downward") is Direction.DOWNWARD
    assert Direction.UPWARD.sign == 1 and Direction.DOWNWARD.sign == -1
    with pytest.raises(DomainError):
        Direction.parse("sideways")


def test_physical_constructor_matches_dimensionless():
    # g x / c^2 sets the dilation, kappa (x2 - x1) / c the delay
    g, c, kappa, w0 = 0.5, 2.0, 4.0, 400.0
    cfg = PhysicsConfig.from_physical(g=g, c=c, x1=0.0, x2=0.3, kappa=kappa, w0=w0)
    assert cfg.lambda2 - cfg.lambda1 == pytest.approx(g * 0.3 / c**2, rel=1e-6)
    assert cfg.kappa_tau == pytest.approx(kappa * 0.3 / c)
    assert cfg.w0 == pytest.approx(w0 / kappa)


def test_with_returns_modified_copy():
    cfg = PhysicsConfig(1.0, 1.1, 10.0, 0.2)
    new = cfg.with_(kappa_tau=0.5)
    assert new.kappa_tau == 0.5 and cfg.kappa_tau == 0.2
