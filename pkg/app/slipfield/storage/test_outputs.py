import math

import numpy as np
import pytest

from slipfield.models.grid import Field2D, GridSpec, Profile1D
from slipfield.models.state import EnergyReport, Record, TimeSeries
from slipfield.storage.outputs import (
    PROFILE_COLUMNS,
    TIMESERIES_COLUMNS,
    RunOutput,
    profiles_frame,
    read_field,
    read_timeseries,
    predicted_annihilation_time,
    summarize,
    write_field,
    write_timeseries,
)


def _series(positions):
    series = TimeSeries()
    for i, pos in enumerate(positions):
        t = 0.5 * i
        series.append(Record(
            t=t,
            position=pos,
            energy=EnergyReport(t, 1.0 - t, -t, 1.0 - 2 * t, -2.0),
            crossings=0 if pos is None else 1,
        ))
    series.fill_dissipation_lhs()
    return series


def test_time_series_must_increase():
    series = _series([0.0])

    with pytest.raises(ValueError):
        series.append(Record(t=0.0, position=None, energy=EnergyReport(0.0, 0.0, 0.0, 0.0, 0.0)))


def test_dissipation_lhs_is_centered_difference():
    series = _series([1.0, 0.5, 0.0])

    assert series.records[0].energy.dissipation_lhs is None
    assert series.records[1].energy.dissipation_lhs == pytest.approx(-2.0)
    assert series.records[2].energy.dissipation_lhs is None


def test_timeseries_csv_leaves_missing_positions_empty(tmp_path):
    out = RunOutput(tmp_path)

    write_timeseries(out, _series([1.0, 0.5, None]))

    lines = out.timeseries.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(TIMESERIES_COLUMNS)
    assert lines[3].split(",")[1] == ""
    frame = read_timeseries(out.timeseries)
    assert math.isnan(frame["position"].iloc[2])
    assert frame["E_total"].tolist() == pytest.approx([1.0, 0.0, -1.0])


def test_profiles_long_format():
    grid = GridSpec(Nx=4, Ny=4)
    frame = profiles_frame([(0.0, Profile1D.constant(grid, 0.0)), (1.0, Profile1D.constant(grid, 2.0))])

    assert list(frame.columns) == PROFILE_COLUMNS
    assert len(frame) == 10
    assert frame["snapshot_index"].tolist() == [0] * 5 + [1] * 5
    assert frame["u"].iloc[-1] == 2.0
    np.testing.assert_allclose(frame["x"].iloc[:5], grid.x)


def test_field_dump_round_trip(tmp_path):
    grid = GridSpec(L=1.5, H=0.5, Nx=6, Ny=4)
    field = Field2D.from_function(grid, lambda X, Y: X * Y + 0.1)
    out = RunOutput(tmp_path)

    path = write_field(out, 3, field)

    assert path.name == "field_3.csv"
    meta, values = read_field(path)
    assert meta == {"Nx": 6, "Ny": 4, "L": 1.5, "H": 0.5}
    np.testing.assert_array_equal(values, field.values)


def test_summary_reports_annihilation():
    summary = summarize(_series([1.0, 0.0, -1.0, None, None]), predicted_speed=-2.0)

    assert summary["annihilation_time"] == 1.5
    assert summary["last_position"] == -1.0
    assert summary["mean_velocity"] == pytest.approx(-2.0)
    assert summary["tracked_snapshots"] == 3


def test_summary_without_crossings():
    summary = summarize(_series([None, None]))

    assert summary["annihilation_time"] is None
    assert summary["mean_velocity"] is None


def test_timeseries_csv_carries_crossing_counts(tmp_path):
    out = RunOutput(tmp_path)

    write_timeseries(out, _series([1.0, None]))

    lines = out.timeseries.read_text(encoding="utf-8").splitlines()
    assert [line.split(",")[-1] for line in lines] == ["crossings", "1", "0"]


def test_summary_predicts_annihilation_from_wall_speed():
    summary = summarize(_series([1.0, 0.0, -1.0, None]), predicted_speed=-2.0, L=2.0)

    assert summary["predicted_annihilation_time"] == pytest.approx(1.5)
    assert summary["annihilation_time"] == 1.5


def test_predicted_annihilation_needs_a_moving_tracked_wall():
    assert predicted_annihilation_time(_series([None, None]), -1.0, 2.0) is None
    assert predicted_annihilation_time(_series([0.5]), None, 2.0) is None
    assert predicted_annihilation_time(_series([0.5, 1.0]), 0.5, 2.0) == pytest.approx(3.0)


def test_summary_counts_ambiguous_snapshots():
    series = TimeSeries()
    for t, n in [(0.0, 1), (0.5, 3), (1.0, 2)]:
        series.append(Record(t=t, position=0.0, energy=EnergyReport(t, 0.0, 0.0, 0.0, 0.0), crossings=n))

    assert summarize(series)["multiple_crossing_snapshots"] == 2
