import math

import numpy as np
import pytest

nlsf = pytest.importorskip("nlsf")

J_CUBIC_R3 = 18.89725130  # scipy shooting reference


def cubic3():
    return nlsf.truncate(nlsf.NonlinearitySpec.power(1, 4, 2, 3))


def test_invalid_nonlinearity_raises():
    with pytest.raises(nlsf.ConfigError, match=r"\(g1\)"):
        nlsf.NonlinearitySpec.power(-1, 4, 2, 3)
    with pytest.raises(nlsf.ConfigError, match=r"\(g2\)"):
        nlsf.NonlinearitySpec.power(1, 4, 2, 4)


def test_shoot_matches_reference():
    prof = nlsf.shoot(cubic3(), 3)
    assert prof.J == pytest.approx(J_CUBIC_R3, rel=1e-6)
    assert np.all(np.diff(prof.u) < 0)


def test_radial_minimize():
    spec = cubic3()
    sector = nlsf.SymmetrySector(nlsf.SectorKind.Radial, 3)
    grid = nlsf.build_grid(sector, 20.0, 512)
    rep = nlsf.minimize(nlsf.default_seed(grid, spec), spec)
    assert rep.state.J == pytest.approx(J_CUBIC_R3, rel=1e-2)
    assert abs(rep.theta - 1) < 5e-3
    vals = rep.iterate.values
    assert isinstance(vals, np.ndarray) and vals.shape == (grid.size,)
    assert nlsf.verify(rep, spec).all_passed


def test_sample_radial_psi():
    sector = nlsf.SymmetrySector(nlsf.SectorKind.Radial, 3)
    grid = nlsf.build_grid(sector, 8.0, 512)
    u = nlsf.sample_radial(grid, lambda r: math.exp(-r * r))
    assert nlsf.psi(u) == pytest.approx(3 * (math.pi / 2) ** 1.5, rel=1e-4)


def test_bad_sector():
    with pytest.raises(nlsf.ConfigError):
        nlsf.SymmetrySector(nlsf.SectorKind.Radial, 3, 0, True)
