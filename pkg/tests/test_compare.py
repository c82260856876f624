import csv
import io
import json
import math

import pytest

from rieszwave.analytic import EvalPoint, PhysicalParams, Representation, u_hseries
from rieszwave.compare import (ComparisonRecord, GridSpec, compare_reps, format_float,
                               records_to_csv, to_json, validity_map)

BASE = PhysicalParams(1.0, 1.0, 0.0)
SMALL = GridSpec((-3.0, -0.4, 0.7, 2.0, 9.0), (0.1, 1.7, 6.5), (1.0, math.sqrt(0.1)))
REMNANT_1 = math.exp(-1.0) / math.sqrt(math.pi)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec((), (1.0,), (0.0,))
    with pytest.raises(ValueError):
        GridSpec((0.0, 1.0), (1.0,), (0.0,))
    with pytest.raises(ValueError):
        GridSpec((1.0,), (1.0,), (-1.0,))
    with pytest.raises(ValueError):
        GridSpec((math.nan,), (1.0,), (0.0,))


def test_fig1_lattice():
    g = GridSpec.fig1_lattice()
    assert len(g.x_values) == 128
    assert g.x_values[0] == -15.0 and g.x_values[-1] == 15.0
    assert min(abs(x) for x in g.x_values) == 0.2
    assert g.t_values == (0.1, 1.7, 5.0, 6.5)
    assert len(list(g.points())) == 128 * 4 * 3


def test_xi_range_grid():
    g = GridSpec.xi_range(0.01, 40.0, 16)
    xi = sorted(1.0 / x for x in g.x_values)
    assert xi[0] == pytest.approx(0.01) and xi[-1] == pytest.approx(40.0)


def test_record_order_is_x0_t_x():
    rep = compare_reps(SMALL, BASE, "lambda", "doublesum")
    keys = [(r.x0, r.t, r.x) for r in rep.records]
    assert keys == list(SMALL.points())


def test_rearrangement_on_small_grid():
    rep = compare_reps(SMALL, BASE, "lambda", "doublesum")
    assert rep.summary["n_errors"] == 0
    assert rep.summary["max_rel_dev"] <= 1e-10


def test_summary_consistent_with_records():
    rep = compare_reps(SMALL, BASE, "lambda", "spectral")
    for r in rep.records:
        assert r.abs_dev == abs(r.uA - r.uB)
        assert r.rel_dev == r.abs_dev / max(abs(r.uA), abs(r.uB), 1e-300)
    s = rep.summary
    assert s["max_abs_dev"] == max(r.abs_dev for r in rep.records)
    w = max(rep.records, key=lambda r: r.abs_dev)
    assert s["worst_point"] == {"x": w.x, "t": w.t, "x0": w.x0}
    assert s["n_points"] == len(rep.records)


def test_swap_keeps_abs_dev():
    ab = compare_reps(SMALL, BASE, "hseries", "spectral")
    ba = compare_reps(SMALL, BASE, "spectral", "hseries")
    assert [r.abs_dev for r in ab.records] == [r.abs_dev for r in ba.records]


def test_parallel_output_is_byte_identical():
    serial = to_json(compare_reps(SMALL, BASE, "lambda", "spectral"))
    parallel = to_json(compare_reps(SMALL, BASE, "lambda", "spectral", workers=2))
    assert serial == parallel


def test_delta_series_vs_closed_form():
    g = GridSpec.xi_range(0.01, 40.0, 64)
    rep = compare_reps(g, BASE, Representation.DeltaSeries, Representation.FresnelDelta)
    assert rep.summary["max_abs_dev"] <= 1e-9


def test_series_misses_remnant_at_short_time():
    rep = compare_reps(GridSpec((1.0,), (0.1,), (1.0,)), BASE, "lambda", "spectral")
    d = rep.records[0].abs_dev
    assert rep.records[0].gaussian_remnant == pytest.approx(REMNANT_1, rel=1e-14)
    assert 0.5 * REMNANT_1 < d < 2 * REMNANT_1


def test_errors_recorded_not_raised():
    g = GridSpec((1.0, 2.0), (1.0,), (0.0,))
    rep = compare_reps(g, BASE, "lambda", "spectral")
    assert rep.summary["n_errors"] == 2
    assert all(r.error and "DomainError" in r.error for r in rep.records)
    assert all(math.isnan(r.uA) for r in rep.records)
    doc = json.loads(to_json(rep))
    assert doc["records"][0]["uA"] is None


def test_near_node_flag():
    from rieszwave.nodes import scan_nodes
    z = scan_nodes(1.7, PhysicalParams(1.0, 1.0, 1.0)).nodes[-1]
    rep = compare_reps(GridSpec((0.1, z, 1.0), (1.7,), (1.0,)), BASE, "spectral",
                       "convolution")
    flags = [r.near_node for r in rep.records]
    assert flags == [False, True, False]
    assert rep.summary["n_near_node"] == 1
    assert rep.summary["max_rel_dev"] == max(rep.records[0].rel_dev, rep.records[2].rel_dev)
    assert rep.summary["max_abs_dev"] < 1e-8


def test_as_printed_leading_ratio_is_half():
    for xi in (1e-2, 1e-3, 1e-4):
        pt = EvalPoint(1.0 / xi, 1.0)
        ratio = u_hseries(pt, BASE, as_printed=True) / u_hseries(pt, BASE)
        assert abs(ratio - 0.5) < xi


def test_validity_map_delta_points_pass():
    g = GridSpec.xi_range(0.01, 40.0, 32)
    recs = validity_map(g, BASE, 1e-8)
    assert all(r.passed for r in recs)
    assert all(r.ratio_x_x0 == math.inf for r in recs)


def test_validity_map_fields():
    recs = validity_map(GridSpec((1.0, 6.0), (0.1,), (1.0,)), BASE, 1e-6)
    r0, r1 = recs
    assert r0.xi == pytest.approx(0.01) and r0.ratio_x_x0 == 1.0
    assert r0.allowance == pytest.approx(2 * REMNANT_1)
    # the remnant allowance absorbs the short-time deviation
    assert r0.passed
    assert r1.allowance == 1e-6
    for r in recs:
        assert r.abs_dev == abs(r.u_series - r.u_oracle)
        assert r.passed == (r.abs_dev <= r.allowance)


def test_csv_format():
    rep = compare_reps(GridSpec((0.7, 2.0), (1.7,), (1.0,)), BASE, "lambda", "doublesum")
    text = records_to_csv(rep.records)
    assert "\r" not in text and text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == [f for f in ComparisonRecord.__dataclass_fields__]
    assert len(rows) == 3
    assert float(rows[1][3]) == rep.records[0].uA
    assert rows[1][8] == "false"


def test_format_float_round_trips():
    for v in (0.1, 1 / 3, 1.5915494309189535e-3, -2.5e-300, 1e22):
        assert float(format_float(v)) == v
    assert format_float(math.nan) == ""


def test_json_deterministic_and_sorted():
    rep = compare_reps(GridSpec((0.7,), (1.7,), (1.0,)), BASE, "lambda", "doublesum")
    a, b = to_json(rep), to_json(rep)
    assert a == b
    doc = json.loads(a)
    assert list(doc) == sorted(doc)
    assert doc["repA"] == "lambda"
