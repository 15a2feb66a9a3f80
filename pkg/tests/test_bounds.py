import math
from fractions import Fraction

import numpy as np
import pytest

from specpart import bounds, eigen, geometry, report
from specpart.errors import ConfigError


@pytest.fixture(scope="module")
def consts():
    return bounds.pleijel_constants(1e-5)


def test_constants_chain(consts):
    assert bounds.chain_consistency(consts)
    assert consts.nu_pl == pytest.approx(0.6917, abs=1e-4)
    assert consts.nu_hex == pytest.approx(0.6760, abs=1e-4)
    assert consts.ratio == pytest.approx(consts.nu_hex / consts.nu_pl, rel=1e-12)


@pytest.mark.parametrize("dom", [geometry.SQ1, geometry.HEXA1, geometry.T1, geometry.DISK1])
def test_faber_krahn_family(dom):
    fk = bounds.faber_krahn_check(dom)
    hn = bounds.hansen_nadirashvili_check(dom)
    assert fk.holds and hn.holds
    assert hn.left >= fk.left


def test_faber_krahn_equality_for_disk():
    fk = bounds.faber_krahn_check(geometry.DISK1)
    assert abs(fk.slack) < 1e-9
    assert "equality" in fk.notes


def test_bdpv_disk_vacuous():
    r = bounds.bdpv_check(geometry.DISK1)
    assert r.inputs["asymmetry"] == 0.0 and r.holds and r.notes
    with pytest.raises(ConfigError):
        bounds.bdpv_check(geometry.SQ1, C=0)


def test_bdpv_tight_constant_square():
    r = bounds.bdpv_check(geometry.SQ1, C=1.0)
    assert r.holds
    assert 2.4 < r.inputs["tight_C"] < 2.9
    assert not bounds.bdpv_check(geometry.SQ1, C=4.0).holds


def test_delta0_is_root_in_bracket():
    for p in (0.5, 0.743, 0.9):
        d = bounds.bourgain_delta0(p)
        assert 0 < d < 1 - p
        assert abs(bounds._bourgain_residual(d, p)) < 1e-10
    assert bounds.bourgain_delta0(0.743) == pytest.approx(0.2569747836, abs=1e-9)
    assert bounds.bourgain_delta0(0.6) > bounds.bourgain_delta0(0.8)
    with pytest.raises(ConfigError):
        bounds.bourgain_delta0(1.2)


def test_b_above_one_iff_below_threshold():
    t = bounds.bourgain_threshold()
    for d in np.linspace(0.002, 0.25, 60):
        ex = bounds.bourgain_b_minus_one(d)
        assert (ex > 0) == (d < t)
        assert bounds.bourgain_b(d) - 1 == pytest.approx(ex, abs=1e-12)


def test_bourgain_sup(consts):
    bs = bounds.bourgain_sup()
    assert bs.excess > 0
    assert 0 < bs.argmax < bounds.bourgain_threshold()
    assert bs.sup <= 1 / consts.ratio


def test_steinerberger_against_exact_arithmetic():
    rng = np.random.default_rng(5)
    for _ in range(10):
        c = Fraction(int(rng.integers(1, 199)), 100)
        C = Fraction(int(rng.integers(1, 500)), 100)
        b1 = 1 - c / 2
        b2 = 1 - C * c ** 3 / (216 + 6 * C * c ** 2)
        res = bounds.steinerberger_factor(float(c), float(C))
        assert res.factor == pytest.approx(float(max(b1, b2)), rel=1e-14)
        assert res.branch == (1 if b1 >= b2 else 2)


def test_steinerberger_no_crossing():
    assert bounds.steinerberger_crossing(1.0) is None
    with pytest.raises(ConfigError):
        bounds.steinerberger_factor(2.5)


def test_uncertainty_audit_quadrants(quadrants):
    r = bounds.uncertainty_principle_audit(quadrants)
    sq = geometry.fraenkel_asymmetry(geometry.SQ1, 1 / 400)
    # equal areas: the sum reduces to the common cell asymmetry
    assert r.right == pytest.approx(sq, abs=0.02)
    assert r.holds


def test_uncertainty_audit_single_cell(square):
    from specpart import partition
    mask = geometry.rasterize(square, math.pi / 30)
    r = bounds.uncertainty_principle_audit(partition.from_labels(mask, np.ones(mask.n, int)))
    assert r.inputs["k"] == 1 and r.right > 0


def test_weyl_below_ground_energy():
    r = bounds.weyl_check(geometry.DomainSpec.rectangle(1, 1), 1.5)
    assert r.inputs["count"] == 0
    assert r.notes


def test_weyl_rectangle_lattice_count():
    r = bounds.weyl_check(geometry.DomainSpec.rectangle(1, 1), 10.5)
    # (1,1),(1,2),(2,1),(2,2),(1,3),(3,1) lie below 10.5
    assert r.inputs["count"] == 6


def test_report_csv_layout():
    reps = [bounds.faber_krahn_check(geometry.SQ1)]
    text = report.reports_to_csv(reps, ["x = 1"])
    assert text.startswith("# x = 1")
    assert "Faber-Krahn" in text
    assert "Faber-Krahn" in report.summary_table(reps)


def test_lambda_domain_closed_forms():
    assert bounds.lambda_domain(geometry.DomainSpec.rectangle(2, 1)) == 1.25
    assert bounds.lambda_domain(geometry.DISK1) == pytest.approx(eigen.lambda_disk1(), rel=1e-14)
