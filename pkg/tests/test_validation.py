import pytest

from kpho import validation
from kpho.model import LatticeConfig


def test_empty_selection_is_noop(cfg6):
    report = validation.run_checks(cfg6, [])
    assert report.results == [] and report.passed


def test_unknown_check(cfg6):
    with pytest.raises(KeyError):
        validation.run_checks(cfg6, ["no_such_check"])


def test_full_suite_passes(cfg6):
    report = validation.run_checks(cfg6)
    assert report.passed, report.to_csv()
    assert [r.name for r in report.results] == list(validation.CHECKS)


def test_perturbed_element_is_located(cfg6):
    fault = validation.Perturbation("dirichlet", 1, 3, 1e-4)
    report = validation.run_checks(cfg6, ["levels_dirichlet", "levels_periodic"], [fault])
    assert report.failed == ["levels_dirichlet"]


def test_perturbation_caught_by_audit(cfg6):
    # the audit samples (n, m) pairs from a seeded generator; perturb one it visits
    report = validation.run_checks(cfg6, ["matrix_elements_periodic"])
    n, m = (int(v.split("=")[1]) for v in report.results[0].detail.strip("()").split(", "))
    fault = validation.Perturbation("periodic", n, m, 1e-6)
    assert validation.run_checks(cfg6, ["matrix_elements_periodic"], [fault]).failed == ["matrix_elements_periodic"]


def test_perturbation_parse():
    p = validation.Perturbation.parse("bloch:0:-1:0.5")
    assert p == validation.Perturbation("bloch", 0, -1, 0.5)
    assert p.offset("bloch", -1, 0) == 0.5 and p.offset("periodic", 0, -1) == 0.0
    with pytest.raises(ValueError):
        validation.Perturbation.parse("bloch:0:1")


def test_singular_points_and_samples():
    cfg = LatticeConfig(6.0, 2 / 3)
    pts = validation.singular_points(cfg)
    assert pts[-1] == 6.0 and len(pts) >= 3
    eps = validation.form_samples(cfg, 1000)
    assert 990 <= len(eps) <= 1000


def test_report_csv(cfg6):
    text = validation.run_checks(cfg6, ["square_well_forms"]).to_csv()
    assert text.splitlines()[0] == "check,passed,measured,tolerance,detail"
    assert text.splitlines()[1].startswith("square_well_forms,true,")
