"""
Tests for the registries, published tables, convergence sweeps and CSV output
"""

import io
import math

import numpy as np
import pytest

from src.common.errors import (
    DomainError,
    NonDyadicSequence,
    NotInAdmissibleSet,
    RowMismatch,
    SweepFailed,
    UnknownFunction,
    UnknownProblem,
)
from src.core.fc.shape_functions import ShapeFamily
from src.core.fc.trig_interp import ConvergenceRow, noc
from src.core.study.harness import (
    StudyKind,
    StudySpec,
    compare_to_table,
    detect_stagnation,
    parse_n_range,
    run_convergence,
    run_family_comparison,
    run_shape_dump,
    verify_invariants,
    verify_published_tables,
    write_comparison_csv,
    write_csv,
    write_shape_csv,
)
from src.core.study.reference_tables import TABLE_N, TABLES, get_table
from src.core.study.registry import FUNCTIONS, function_registry, parse_params, predicted_rate, problem_registry


def table_rows(label):
    return [ConvergenceRow(n, e, order) for n, e, order in get_table(label).rows]


# --------------------------------------------------------------------------------
# Registries

@pytest.mark.parametrize("function_id, rate", [
    ("abspow", 3.5),
    ("osc-singular", 0.7),
    ("one-sided-pow", 3.4),
    ("smooth-osc", 5),
    ("exp-neg-cos", 5),
])
def test_predicted_rates(function_id, rate):
    assert function_registry(function_id).predicted_rate(5) == pytest.approx(rate)


def test_predicted_rate_is_capped_by_d():
    assert predicted_rate(3, 0.5, 2) == 2
    assert predicted_rate(math.inf, 0.0, 7) == 7


def test_every_registered_function_is_finite_on_unit_interval():
    x = np.linspace(0.0, 1.0, 101)
    for function_id in FUNCTIONS:
        values = function_registry(function_id).func(x)
        assert values.shape == x.shape
        assert np.all(np.isfinite(values)), function_id


def test_function_parameters():
    assert function_registry("osc-singular").func(np.array([0.0]))[0] == 0.0
    assert function_registry("poly", {"coefficients": "1,2"}).func(0.5) == pytest.approx(2.0)
    assert function_registry("abspow", {"p": "2.5"}).params["p"] == 2.5
    assert function_registry("inv-shift", {"eps": 0.001}).func(0.0) == pytest.approx(1000.0)


@pytest.mark.parametrize("function_id, params", [
    ("abspow", {"q": 1}),
    ("abspow", {"p": "many"}),
    ("inv-shift", {"eps": -1}),
    ("one-sided-pow", {"beta": 1.5}),
    ("smooth-osc", {"k": 1}),
])
def test_bad_function_parameters(function_id, params):
    with pytest.raises(DomainError):
        function_registry(function_id, params)


def test_unknown_registry_ids():
    with pytest.raises(UnknownFunction):
        function_registry("sinc")
    with pytest.raises(UnknownProblem):
        problem_registry("heat")


def test_parse_params():
    assert parse_params(["k=200", " lam = 0.1 "]) == {"k": "200", "lam": "0.1"}
    assert parse_params(None) == {}
    with pytest.raises(DomainError):
        parse_params(["k200"])


# --------------------------------------------------------------------------------
# Published tables

def test_published_tables_are_complete():
    assert len(TABLES) == 12
    for table in TABLES.values():
        assert tuple(n for n, _, _ in table.rows) == TABLE_N
        assert table.rows[0][2] is None
        assert table.family in ("hermite", "beta")
        problem_registry(table.problem, table.param_dict)


def test_get_table():
    assert get_table("genfc-coskx-k100").row(1024) == (1024, 2.19e-10, 6.93)
    with pytest.raises(KeyError):
        get_table("genfc-heat")


# --------------------------------------------------------------------------------
# Study specs

def test_parse_n_range():
    assert parse_n_range("2^6:2^8") == (64, 128, 256)
    assert parse_n_range("64:256") == (64, 128, 256)
    assert parse_n_range("2^5") == (32,)


@pytest.mark.parametrize("text", ["2^6:100", "a:b", "256:64", "0:4"])
def test_parse_n_range_rejects(text):
    with pytest.raises(NonDyadicSequence):
        parse_n_range(text)


def test_study_spec_validation():
    with pytest.raises(NonDyadicSequence):
        StudySpec(kind="approx", target="abspow", family=ShapeFamily.reg_beta(5), n_range=(64, 96))
    with pytest.raises(NotInAdmissibleSet):
        StudySpec(kind="approx", target="abspow", family=ShapeFamily.reg_beta(2), d=2, b="5/4", n_range=(2, 4))


def test_study_spec_header():
    spec = StudySpec(kind="bvp", target="coskx", family=ShapeFamily.hermite(), params={"k": "200"},
                     n_range=(64, 128), ref_grid=4096)
    assert spec.header() == {
        "kind": "bvp", "problem": "coskx", "param.k": "200", "d": "5", "b": "2",
        "shape.family": "hermite", "n_range": "64,128", "ref_grid": "4096",
    }


# --------------------------------------------------------------------------------
# Sweeps

def small_spec(**overrides):
    options = dict(kind=StudyKind.APPROX, target="inv-shift", family=ShapeFamily.reg_beta(5),
                   params={"eps": 0.1}, n_range=(32, 64, 128), ref_grid=4096, workers=2)
    options.update(overrides)
    return StudySpec(**options)


def test_run_convergence_rows():
    rows = run_convergence(small_spec())
    assert [row.n for row in rows] == [32, 64, 128]
    assert rows[0].noc_n is None
    assert rows[2].e_n < rows[0].e_n
    assert rows[1].noc_n == pytest.approx(math.log2(rows[0].e_n / rows[1].e_n))


def test_run_convergence_is_deterministic_across_worker_counts():
    serial = run_convergence(small_spec(workers=1))
    threaded = run_convergence(small_spec(workers=3))
    assert serial == threaded


def test_failed_sweep_reports_n():
    spec = small_spec(target="const", params={"value": 0.0})
    with pytest.raises(SweepFailed) as excinfo:
        run_convergence(spec)
    assert excinfo.value.n == 32


def test_run_convergence_rejects_shape_dumps():
    spec = StudySpec(kind=StudyKind.SHAPE_DUMP, target="shape", family=ShapeFamily.bump(), n_range=(32,))
    with pytest.raises(ValueError):
        run_convergence(spec)


def test_family_comparison_keys():
    results = run_family_comparison(small_spec(n_range=(32, 64)), [ShapeFamily.reg_beta(5), ShapeFamily.hermite()])
    assert list(results) == ["beta", "hermite"]
    assert all(len(rows) == 2 for rows in results.values())


def observed_order(function_id, params, d, n_range, b="2", last=None):
    spec = small_spec(target=function_id, params=params, family=ShapeFamily.reg_beta(d), d=d, b=b,
                      n_range=parse_n_range(n_range), ref_grid=2 ** 17)
    rows = run_convergence(spec)
    orders = [row.noc_n for row in rows[1:]]
    return float(np.mean(orders[-last:] if last else orders))


@pytest.mark.slow
@pytest.mark.parametrize("d", [3, 4, 5])
def test_smooth_function_converges_at_order_d(d):
    assert observed_order("smooth-osc", {}, d, "2^8:2^11") == pytest.approx(d, abs=0.5)


@pytest.mark.slow
@pytest.mark.parametrize("d", [4, 5])
def test_limited_regularity_rate(d):
    assert observed_order("abspow", {"p": 3.5}, d, "2^9:2^12") == pytest.approx(3.5, abs=0.3)


@pytest.mark.slow
@pytest.mark.parametrize("d", [3, 4, 5])
def test_oscillatory_singular_rate(d):
    assert observed_order("osc-singular", {}, d, "2^11:2^14", last=2) == pytest.approx(0.7, abs=0.15)


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.2, 0.4, 0.8])
def test_one_sided_power_rate_follows_beta(beta):
    assert observed_order("one-sided-pow", {"beta": beta}, 5, "2^9:2^12") == pytest.approx(3 + beta, abs=0.3)


@pytest.mark.slow
@pytest.mark.parametrize("b", ["2", "3/2", "5/4"])
def test_rate_does_not_depend_on_extension_period(b):
    assert observed_order("smooth-osc", {}, 4, "2^8:2^11", b=b) == pytest.approx(4, abs=0.5)


@pytest.mark.slow
def test_published_tables_reproduce():
    checks = verify_published_tables(1024, tolerance_decades=1.0, ref_grid=2 ** 17, workers=2)
    failing = [check for check in checks if not check.passed]
    assert not failing, failing


# --------------------------------------------------------------------------------
# Table comparison and stagnation

def test_table_against_itself_passes():
    report = compare_to_table(table_rows("genfc-euler-eps50"), get_table("genfc-euler-eps50"), 0.01)
    assert report.passed
    assert list(report.to_frame().columns[:3]) == ["n", "e_n", "e_published"]


def test_table_comparison_flags_rows_outside_tolerance():
    rows = table_rows("genfc-euler-eps50")
    rows[3] = ConvergenceRow(rows[3].n, rows[3].e_n * 100, rows[3].noc_n)
    report = compare_to_table(rows, get_table("genfc-euler-eps50"), 1.0)
    assert not report.passed
    assert [row.n for row in report.rows if not row.passed] == [512]


def test_table_comparison_ignores_orders_after_stagnation():
    rows = table_rows("modfc-coskx-k100")
    rows[-1] = ConvergenceRow(rows[-1].n, rows[-1].e_n, 5.0)
    assert compare_to_table(rows, get_table("modfc-coskx-k100"), 0.1).passed


def test_table_comparison_requires_published_n():
    with pytest.raises(RowMismatch):
        compare_to_table([ConvergenceRow(32, 1e-3)], get_table("genfc-coskx-k100"), 1.0)


def test_stagnation_detected_after_three_flat_orders():
    n_values = [64, 128, 256, 512, 1024, 2048]
    errors = [1e-2, 1e-4, 1e-6, 1e-6, 1.1e-6, 0.9e-6]
    stalled = detect_stagnation(noc([ConvergenceRow(n, e) for n, e in zip(n_values, errors)]))
    assert stalled.start_n == 256
    assert stalled.level == 1e-6


def test_no_stagnation_in_short_plateau():
    assert detect_stagnation(table_rows("modfc-coskx-k100")) is None
    assert detect_stagnation([]) is None


# --------------------------------------------------------------------------------
# CSV output

def test_csv_layout_and_determinism(tmp_path):
    rows = noc([ConvergenceRow(64, 1e-2), ConvergenceRow(128, 1e-4)])
    header = {"kind": "approx", "function": "abspow"}
    text = write_csv(rows, header)
    assert text == write_csv(rows, header)
    assert text.splitlines() == [
        "# kind=approx",
        "# function=abspow",
        "n,e_n,noc_n",
        "64,1.000000e-02,",
        "128,1.000000e-04,6.643856e+00",
    ]

    path = tmp_path / "sweep.csv"
    write_csv(rows, header, path)
    assert path.read_text() == text

    stream = io.StringIO()
    write_csv(rows, header, stream)
    assert stream.getvalue() == text


def test_comparison_csv_columns():
    results = {
        "beta": noc([ConvergenceRow(64, 1e-2), ConvergenceRow(128, 1e-4)]),
        "hermite": noc([ConvergenceRow(64, 2e-2), ConvergenceRow(128, 4e-4)]),
    }
    lines = write_comparison_csv(results, {"kind": "approx"}).splitlines()
    assert lines[1] == "n,e_n_beta,noc_n_beta,e_n_hermite,noc_n_hermite"
    assert len(lines) == 4


def test_shape_dump():
    spec = StudySpec(kind=StudyKind.SHAPE_DUMP, target="shape", family=ShapeFamily.reg_beta(5),
                     n_range=(32,), ell=1, samples=21)
    frame = run_shape_dump(spec)
    assert list(frame.columns) == ["x", "eta_right", "eta_left", "blend_right", "blend_left"]
    assert len(frame) == 21
    text = write_shape_csv(frame, spec.header())
    assert "# ell=1" in text and "# samples=21" in text and "# n=32" in text


def test_invariant_suite_passes():
    checks = verify_invariants()
    assert all(check.passed for check in checks), [c for c in checks if not c.passed]
    assert len(checks) == 6
