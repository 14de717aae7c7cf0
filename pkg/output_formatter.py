"""
出力モジュール
レポート・上界検査・実験結果を DataFrame に変換し、CSV/Excel ファイルへ出力
"""

import json
import os
from dataclasses import asdict
from typing import Dict, Iterable, Tuple

import pandas as pd

from analysis_engine import BoundCheck, RecognitionReport
from logging_config import get_logger

logger = get_logger(__name__)

# 列の順序は固定（ヘッダ必須）
REPORT_COLUMNS = [
    'machine', 'language', 'max_len', 'member_min_prob', 'nonmember_max_prob',
    'cut_point', 'isolation', 'hardest_member', 'hardest_nonmember',
    'member_count', 'nonmember_count',
]
BOUND_COLUMNS = ['bound_name', 'lhs', 'rhs', 'holds', 'inputs']
EXPERIMENT_COLUMNS = [
    'h', 'p', 'epsilon', 'dfa_states', 'pfa_lower_bound', 'qfac_classical', 'qfac_quantum',
    'mm_forbidden', 'f_construction', 'observed_isolation', 'max_len', 'seed',
]

FLOAT_FORMAT = '%.12g'


def report_dataframe(reports: Iterable[Tuple[str, str, RecognitionReport]]) -> pd.DataFrame:
    """(機械名, 言語名, レポート) の列を 1 行ずつの DataFrame に変換"""
    rows = []
    for machine, language, report in reports:
        row = asdict(report)
        row['machine'] = machine
        row['language'] = language
        rows.append(row)
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def bound_dataframe(checks: Iterable[BoundCheck]) -> pd.DataFrame:
    """上界検査の結果を DataFrame に変換（inputs は JSON 文字列）"""
    rows = []
    for check in checks:
        rows.append({
            'bound_name': check.bound_name,
            'lhs': check.lhs,
            'rhs': check.rhs,
            'holds': check.holds,
            'inputs': json.dumps(check.inputs, sort_keys=True),
        })
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)


def experiment_dataframe(rows: Iterable) -> pd.DataFrame:
    """ExperimentRow の列を DataFrame に変換"""
    return pd.DataFrame([asdict(row) for row in rows], columns=EXPERIMENT_COLUMNS)


def _ensure_folder(filename: str):
    folder = os.path.dirname(filename)
    if folder:
        os.makedirs(folder, exist_ok=True)


def export_to_csv(df: pd.DataFrame, filename: str) -> bool:
    """CSV ファイルに出力"""
    try:
        _ensure_folder(filename)
        df.to_csv(filename, index=False, encoding='utf-8', float_format=FLOAT_FORMAT, lineterminator='\n')
        logger.info(f"CSV 出力: {filename}（{len(df)} 行）")
        return True

    except OSError as e:
        logger.error(f"CSV 出力エラー: {filename}: {e}")
        return False


def export_to_excel(sheets: Dict[str, pd.DataFrame], filename: str) -> bool:
    """シート名 → DataFrame を Excel ファイルに出力"""
    try:
        _ensure_folder(filename)
        with pd.ExcelWriter(filename, engine='openpyxl') as writer:
            for sheet_name, df in sheets.items():
                df.to_excel(writer, sheet_name=sheet_name, index=False)
        logger.info(f"Excel 出力: {filename}（{len(sheets)} シート）")
        return True

    except (OSError, ValueError) as e:
        logger.error(f"Excel 出力エラー: {filename}: {e}")
        return False
