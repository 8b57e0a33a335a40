import json

import pytest

from gestark.addressability import tunability
from gestark.stark import P31, Source, StarkParameters

F0 = 9.6e9


def test_factor_of_four(registry):
    p = registry.lookup("P31", (1, 1, 1), (1, 1, 1), "inferred")
    assert p.source is Source.inferred
    r = tunability(p, P31, F0, 480.0, 1.1e6)
    # 0.19 * 9.6e9 * 0.048^2
    assert r.max_shift == pytest.approx(4202496.0, rel=1e-12)
    assert r.ratio == pytest.approx(4202496.0 / 1.1e6, rel=1e-12)
    assert r.source == "inferred"


def test_100_orientation_ratio(registry):
    r = tunability(registry.lookup("P31", (1, 0, 0), (1, 0, 0)), P31, F0, 480.0, 1.1e6)
    assert r.max_shift == pytest.approx(28753.92, rel=1e-12)
    assert r.ratio == pytest.approx(0.02614, abs=1e-5)


def test_zero_field_and_quadratic_scaling():
    p = StarkParameters(-3.0e-2)
    assert tunability(p, P31, F0, 0.0).ratio == 0.0
    r1 = tunability(p, P31, F0, 100.0)
    r2 = tunability(p, P31, F0, 300.0)
    assert r2.ratio == pytest.approx(9 * r1.ratio, rel=1e-12)
    assert r1.max_shift >= 0


def test_defaults_and_reference():
    r = tunability(StarkParameters(1e-2), P31, F0)
    assert r.e_max == 480.0 and r.linewidth == 1.1e6
    assert r.comparison_shift_si == -3.0 and r.comparison_field_si == 50.0


def test_bad_inputs():
    with pytest.raises(ValueError):
        tunability(StarkParameters(1e-2), P31, F0, -1.0)
    with pytest.raises(ValueError):
        tunability(StarkParameters(1e-2), P31, F0, 10.0, 0.0)


def test_outputs():
    r = tunability(StarkParameters(1e-2), P31, F0, orientation="E[111] ∥ B[111]")
    doc = json.loads(r.dumps())
    assert doc["ratio"] == r.ratio and doc["orientation"] == "E[111] ∥ B[111]"
    table = r.table()
    assert "Hz" in table and "V/cm" in table and "shift / linewidth" in table
