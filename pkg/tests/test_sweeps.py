"""Sweep engine: determinism, error rows, serialization, figure presets."""

import json
import re

import numpy as np
import pytest

from chargeqfi.model import SystemParams
from chargeqfi.qfi import EstimandTag
from chargeqfi.sweeps import (
    CSV_HEADER,
    FIGURE_MIN_POINTS,
    FIGURES,
    SweepConfig,
    figure_dataset,
    format_float,
    resolve_parallelism,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
)

P_REF = SystemParams.degenerate(e_j=0.1, e_m=0.1, gamma=0.4)


def small_time_sweep(**kw):
    base = dict(params=P_REF, estimand=EstimandTag.GAMMA, axis="time",
                axis_start=0.0, axis_end=2.0, points=5)
    base.update(kw)
    return SweepConfig(**base)


def test_format_float_round_trip():
    assert format_float(0.1) == "1.0000000000000001e-01"
    assert format_float(1.0) == "1.0000000000000000e+00"
    assert format_float(float("inf")) == "inf"
    assert format_float(float("-inf")) == "-inf"
    assert format_float(float("nan")) == "nan"
    for x in (0.1, 1.0 / 3.0, 2.5e-17, 123456.789):
        assert float(format_float(x)) == x


def test_run_sweep_rows_and_order():
    res = run_sweep(small_time_sweep())
    assert len(res.rows) == 5
    axis = [r.axis_value for r in res.rows]
    assert axis == sorted(axis)
    assert axis[0] == 0.0 and axis[-1] == 2.0
    first = res.rows[0]
    assert first.error is None
    assert abs(first.breakdown.f_total) < 1e-6
    assert first.breakdown.crb == float("inf")
    assert res.provenance["errors"] == 0
    assert res.provenance["worst_oracle_rel_dev"] < 1e-4


def test_sweep_deterministic_across_parallelism():
    a = sweep_to_csv(run_sweep(small_time_sweep(parallelism=1)))
    b = sweep_to_csv(run_sweep(small_time_sweep(parallelism=4)))
    assert a == b
    c = sweep_to_csv(run_sweep(small_time_sweep(parallelism=4)))
    assert b == c


def test_sweep_csv_shape():
    text = sweep_to_csv(run_sweep(small_time_sweep()))
    lines = text.split("\n")
    assert lines[0] == CSV_HEADER
    assert lines[-1] == ""          # trailing newline
    assert len(lines) == 7
    body = lines[1:-1]
    float_re = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$|^-?inf$|^nan$")
    for row in body:
        cells = row.split(",")
        assert len(cells) == 6
        for cell in cells:
            assert float_re.match(cell), cell
    assert "\r" not in text


def test_sweep_error_rows_do_not_abort():
    # a gamma axis that starts at 0 cannot take a symmetric gamma step at
    # the first point; the row is recorded as an error and the sweep goes on
    cfg = SweepConfig(params=P_REF, estimand=EstimandTag.GAMMA, axis="gamma",
                      axis_start=0.0, axis_end=0.4, points=3, t=1.0)
    res = run_sweep(cfg)
    assert res.rows[0].error is not None
    assert res.rows[0].breakdown is None
    assert res.rows[1].error is None
    assert res.provenance["errors"] == 1
    csv_text = sweep_to_csv(res)
    first_body = csv_text.split("\n")[1]
    assert first_body.split(",")[1:] == ["nan"] * 5
    parsed = json.loads(sweep_to_json(res))
    assert parsed["rows"][0]["error"]
    assert parsed["rows"][2]["error"] is None


def test_sweep_json_round_trip():
    res = run_sweep(small_time_sweep(points=3))
    parsed = json.loads(sweep_to_json(res))
    assert parsed["config"]["axis"] == "time"
    assert parsed["config"]["estimand"] == "gamma"
    assert len(parsed["rows"]) == 3
    assert parsed["rows"][0]["crb"] == "inf"
    assert isinstance(parsed["rows"][1]["f_total"], float)
    assert parsed["provenance"]["engine"] == "chargeqfi"


def test_sweep_axes_move_the_right_parameter():
    cfg = SweepConfig(params=P_REF, estimand=EstimandTag.GAMMA, axis="em",
                      axis_start=0.05, axis_end=0.2, points=2, t=1.0)
    res = run_sweep(cfg)
    # em = 0.05 at t = 1 matches the em-shifted golden configuration
    from chargeqfi.qfi import qfi_sld
    p = SystemParams.degenerate(e_j=0.1, e_m=0.05, gamma=0.4)
    assert abs(res.rows[0].sld - qfi_sld(p, 1.0, EstimandTag.GAMMA)) < 1e-12


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        small_time_sweep(axis="bogus")
    with pytest.raises(ValueError):
        small_time_sweep(axis_start=2.0, axis_end=2.0)
    with pytest.raises(ValueError):
        small_time_sweep(points=1)
    with pytest.raises(ValueError):
        small_time_sweep(parallelism=0)
    with pytest.raises(ValueError):
        small_time_sweep(fd_step=1.0)
    with pytest.raises(ValueError):
        small_time_sweep(output_format="yaml")
    # t only matters off the time axis, where it must be non-negative
    small_time_sweep(t=-1.0)
    with pytest.raises(ValueError):
        small_time_sweep(axis="gamma", axis_start=0.1, axis_end=0.4, t=-1.0)


def test_resolve_parallelism_env(monkeypatch):
    monkeypatch.delenv("QFI_DEPHASE_THREADS", raising=False)
    assert resolve_parallelism(3) == 3
    assert resolve_parallelism(None) == 1
    monkeypatch.setenv("QFI_DEPHASE_THREADS", "6")
    assert resolve_parallelism(None) == 6
    assert resolve_parallelism(2) == 2
    monkeypatch.setenv("QFI_DEPHASE_THREADS", "0")
    with pytest.raises(ValueError):
        resolve_parallelism(None)


def test_figure_preset_table():
    assert set(FIGURES) == {"fig1a", "fig1b", "fig2a", "fig2b",
                            "fig3a", "fig3b", "fig4a", "fig4b",
                            "fig5a", "fig5b", "fig6a", "fig6b"}
    by_estimand = {"fig1": EstimandTag.GAMMA, "fig2": EstimandTag.GAMMA,
                   "fig3": EstimandTag.EJ, "fig4": EstimandTag.EJ,
                   "fig5": EstimandTag.EM, "fig6": EstimandTag.EM}
    for fid, spec in FIGURES.items():
        assert spec.estimand == by_estimand[fid[:4]]
    # family a of the odd figures: fixed gamma 0.4, three couplings
    for fid in ("fig1a", "fig3a", "fig5a"):
        labels = [c[0] for c in FIGURES[fid].curves]
        assert labels == ["e0.05", "e0.1", "e0.2"]
        assert all(c[1].gamma == 0.4 for c in FIGURES[fid].curves)
        assert [c[1].e_j1 for c in FIGURES[fid].curves] == [0.05, 0.1, 0.2]
        assert all(c[1].e_j1 == c[1].e_m for c in FIGURES[fid].curves)
    # family b: fixed coupling 0.1, three dephasing rates
    for fid in ("fig1b", "fig3b", "fig5b"):
        labels = [c[0] for c in FIGURES[fid].curves]
        assert labels == ["g0.3", "g0.4", "g0.5"]
        assert [c[1].gamma for c in FIGURES[fid].curves] == [0.3, 0.4, 0.5]
        assert all(c[1].e_j1 == 0.1 and c[1].e_m == 0.1 for c in FIGURES[fid].curves)
    # single-curve panels
    for fid, e in (("fig2a", 0.1), ("fig2b", 0.2), ("fig4a", 0.1),
                   ("fig4b", 0.2), ("fig6a", 0.1), ("fig6b", 0.2)):
        curves = FIGURES[fid].curves
        assert len(curves) == 1
        assert curves[0][1].e_j1 == e and curves[0][1].e_m == e
        assert curves[0][1].gamma == 0.4


def test_figure_dataset_grid_and_validation():
    data = figure_dataset("fig2a", points=FIGURE_MIN_POINTS)
    assert len(data) == 1
    label, res = data[0]
    assert label == "e0.1"
    assert len(res.rows) == FIGURE_MIN_POINTS
    assert res.rows[0].axis_value == 1e-6
    assert res.rows[-1].axis_value == 10.0
    assert res.provenance["errors"] == 0
    with pytest.raises(ValueError):
        figure_dataset("fig2a", points=FIGURE_MIN_POINTS - 1)
    with pytest.raises(ValueError):
        figure_dataset("fig99")
