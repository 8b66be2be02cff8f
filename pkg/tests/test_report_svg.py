import numpy as np
import pytest

from pyrokin.errors import InputError
from pyrokin.kinetics import AnalysisTable, KineticEstimate
from pyrokin.report import (
    analysis_from_csv,
    analysis_to_csv,
    analysis_to_text,
    ea_plot_series,
    history_to_csv,
    leaderboard_to_csv,
    metrics_to_text,
    predictions_from_csv,
    predictions_to_csv,
)
from pyrokin.seqmodel.metrics import metrics_from_arrays
from pyrokin.svgplot import emit_svg


def small_table():
    ests = []
    for method in ("friedman", "kas", "fwo"):
        for alpha in (0.1, 0.2):
            ests.append(
                KineticEstimate(method, alpha, 150e3 + alpha * 1e4, 1e13, 0.999,
                                -18000.0, 30.0)
            )
    return AnalysisTable("sample", (5.0, 10.0, 15.0), tuple(ests), (0.1, 0.2))


class TestReport:
    def test_analysis_csv_round_trip(self):
        table = small_table()
        again = analysis_from_csv(analysis_to_csv(table))
        assert len(again.estimates) == len(table.estimates)
        for a, b in zip(again.estimates, table.estimates):
            assert a.method == b.method
            assert a.ea == pytest.approx(b.ea, rel=1e-12)
            assert a.a == pytest.approx(b.a, rel=1e-12)

    def test_text_table_mirrors_layout(self):
        text = analysis_to_text(small_table())
        assert "Friedman model" in text and "KAS model" in text and "FWO model" in text
        assert "Ea(kJ/mol)" in text
        assert text.strip().splitlines()[-1].startswith("   Avg")

    def test_text_table_average_value(self):
        text = analysis_to_text(small_table())
        # mean of 151.0 and 152.0 kJ/mol
        assert "151.50" in text.splitlines()[-1]

    def test_plot_series_per_method(self):
        series = ea_plot_series(small_table())
        assert [name for name, _, _ in series] == ["Friedman", "KAS", "FWO"]
        assert all(len(xs) == 2 for _, xs, _ in series)

    def test_predictions_round_trip(self):
        T = np.array([100.0, 150.0, 200.0])
        a = np.array([99.0, 80.0, 60.0])
        p = np.array([98.5, 81.0, 59.0])
        T2, a2, p2 = predictions_from_csv(predictions_to_csv(T, a, p))
        assert np.array_equal(T, T2) and np.array_equal(a, a2) and np.array_equal(p, p2)

    def test_metrics_text_four_decimals(self):
        m = metrics_from_arrays([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        text = metrics_to_text(m)
        assert "R^2  = 1.0000" in text

    def test_history_and_leaderboard_headers(self):
        from pyrokin.seqmodel.search import TrialResult
        from pyrokin.seqmodel.training import EpochRecord, TrainConfig

        hist = history_to_csv([EpochRecord(1, 0.5, 0.6)])
        assert hist.splitlines()[0] == "epoch,train_loss,val_loss"
        board = leaderboard_to_csv(
            [TrialResult(0, TrainConfig(), 0.123)]
        )
        assert board.splitlines()[0].startswith("rank,trial,val_loss")
        assert ",adam," in board.splitlines()[1]


class TestSvg:
    def test_two_point_series_has_exactly_one_polyline(self):
        svg = emit_svg([("line", [0.0, 1.0], [0.0, 1.0])])
        assert svg.count("<polyline") == 1
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")

    def test_identical_input_identical_bytes(self):
        series = [("a", [0.0, 0.5, 1.0], [1.0, 0.4, 0.2])]
        assert emit_svg(series) == emit_svg(series)

    def test_legend_carries_series_names(self):
        svg = emit_svg(
            [
                ("actual", [0.0, 1.0], [1.0, 0.5]),
                ("predicted", [0.0, 1.0], [0.9, 0.55]),
            ]
        )
        assert ">actual</text>" in svg
        assert ">predicted</text>" in svg
        assert svg.count("<polyline") == 2

    def test_no_external_references(self):
        svg = emit_svg([("a", [0.0, 1.0], [0.0, 1.0])])
        assert "http" not in svg.replace("http://www.w3.org/2000/svg", "")

    def test_empty_input_rejected(self):
        with pytest.raises(InputError):
            emit_svg([])
        with pytest.raises(InputError):
            emit_svg([("one-point", [1.0], [1.0])])

    def test_constant_series_still_renders(self):
        svg = emit_svg([("flat", [0.0, 1.0], [3.0, 3.0])])
        assert svg.count("<polyline") == 1
