"""
簡潔性実験と出力モジュールのテスト
"""

import pandas as pd
import pytest

from analysis_engine import bounded_cutpoint_report
from constructions import build_lhp_dfa, lhp_membership
from output_formatter import (EXPERIMENT_COLUMNS, REPORT_COLUMNS, bound_dataframe, experiment_dataframe,
                              export_to_csv, export_to_excel, report_dataframe)
from succinctness_experiment import run_row, run_succinctness_experiment


@pytest.fixture(scope="module")
def rows():
    return run_succinctness_experiment([1], [2, 3, 5], 0.2, 8)


def test_rows(rows):
    assert [(r.h, r.p) for r in rows] == [(1, 2), (1, 3), (1, 5)]
    assert [r.dfa_states for r in rows] == [7, 10, 16]
    assert [r.pfa_lower_bound for r in rows] == [2, 3, 5]
    for r in rows:
        assert r.mm_forbidden and r.f_construction
        assert r.qfac_classical == 4
        assert r.observed_isolation > 0
        assert r.max_len == 8


def test_bound_check(rows):
    for r in rows:
        check = r.bound_check()
        assert check.bound_name == "qfac_dfa"
        assert check.holds


def test_row_order_is_h_major():
    result = run_succinctness_experiment([2, 1], [3, 2], 0.3, 4)
    assert [(r.h, r.p) for r in result] == [(2, 3), (2, 2), (1, 3), (1, 2)]


def test_run_row_quantum_dimension():
    row = run_row(2, 3, 0.2, 5)
    assert row.qfac_quantum % 2 == 0
    assert row.dfa_states == 13


class TestOutput:
    def test_experiment_csv(self, rows, tmp_path):
        path = tmp_path / "out" / "exp.csv"
        assert export_to_csv(experiment_dataframe(rows), str(path))
        df = pd.read_csv(path)
        assert list(df.columns) == EXPERIMENT_COLUMNS
        assert len(df) == 3

    def test_report_dataframe(self):
        report = bounded_cutpoint_report(build_lhp_dfa(1, 2), lhp_membership(1, 2), 4)
        df = report_dataframe([("lhp.json", "L(1,2)", report)])
        assert list(df.columns) == REPORT_COLUMNS
        assert df.loc[0, 'isolation'] == pytest.approx(0.5)

    def test_bound_dataframe_inputs_are_json(self, rows):
        df = bound_dataframe(r.bound_check() for r in rows)
        assert df.loc[0, 'inputs'].startswith('{"eps": 0.')

    def test_excel(self, rows, tmp_path):
        path = tmp_path / "exp.xlsx"
        assert export_to_excel({'experiment': experiment_dataframe(rows)}, str(path))
        assert len(pd.read_excel(path, sheet_name='experiment')) == 3

    def test_csv_failure_returns_false(self, rows, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding='utf-8')
        assert not export_to_csv(experiment_dataframe(rows), str(blocker / "exp.csv"))


class TestDeterminism:
    def test_same_seed_same_rows(self):
        first = run_succinctness_experiment([1, 2], [3], 0.2, 5, seed=13)
        second = run_succinctness_experiment([1, 2], [3], 0.2, 5, seed=13)
        assert first == second
        assert all(r.seed == 13 for r in first)

    def test_csv_is_byte_stable(self, rows, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert export_to_csv(experiment_dataframe(rows), str(a))
        assert export_to_csv(experiment_dataframe(run_succinctness_experiment([1], [2, 3, 5], 0.2, 8)), str(b))
        assert a.read_bytes() == b.read_bytes()
