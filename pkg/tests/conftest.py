import numpy as np
import pytest

from helicoid.geometry import HelicoidSpec
from helicoid.material import Material


@pytest.fixture
def small_spec():
    return HelicoidSpec(H=0.12, D=0.06, w=0.008, t=0.004, n_h=3)


@pytest.fixture
def large_spec():
    return HelicoidSpec(H=0.17, D=0.08, w=0.012, t=0.005, n_h=4)


@pytest.fixture
def mat_2mpa():
    return Material.from_modulus(2.0e6, nu=0.48)


def random_valid_specs(rng: np.random.Generator, n: int) -> list[HelicoidSpec]:
    """Valid, non-degenerate specs spread over a practical design range."""
    out = []
    while len(out) < n:
        D = rng.uniform(0.03, 0.12)
        H = rng.uniform(0.5 * D, 4.0 * D)
        w = rng.uniform(0.08, 0.45) * (D / 2)
        n_h = int(rng.integers(1, 8))
        t_hi = min(0.9 * H / n_h, 0.02)
        t = rng.uniform(0.1 * t_hi, 0.95 * t_hi)
        spec = HelicoidSpec(H=H, D=D, w=w, t=t, n_h=n_h)
        if np.pi * (D - w) - 2 * t > 1e-6:
            out.append(spec)
    return out
