"""
CLI メインモジュール
機械ファイルの検証・実行・変換・構成・解析と簡潔性実験をサブコマンドとして提供

終了コード: 0 成功、1 検証違反・禁止構成の検出・入力ファイルの不備・出力の失敗、2 使い方の誤り、3 内部整合性の破綻
"""

import argparse
import os
import sys
from typing import List, Optional

import pandas as pd

from analysis_engine import bounded_cutpoint_report, qfac_cycle_factor
from app_config import AppConfig
from classical_automata import (Dfa, ProductOp, dfa_accepts, dfa_minimize, dfa_product)
from constructions import (BINARY, LhpParams, build_base_dfa, build_exact_finite_qfac,
                           build_lhp_dfa, build_lhp_qfac, dfa_as_qfac, kletter_to_qfac,
                           lhp_membership, moqfa_as_qfac, moqfa_from_modp_params,
                           reversible_qfac_to_mo, search_modp_multipliers)
from forbidden_constructions import detect_f_construction, detect_mm_forbidden
from logging_config import get_logger, init_app_logging
from machine_io import MachineLoader, load_machine, save_machine
from model_validator import validate
from output_formatter import (bound_dataframe, experiment_dataframe, export_to_csv,
                              export_to_excel, report_dataframe)
from quantum_models import MmQfa, MoQfa, MultiLetterQfa, Qfac, accept_probability, mm_accept_prob, model_name
from sample_generator import generate_sample_files
from succinctness_experiment import run_succinctness_experiment
from toolkit_errors import (ConstructionError, CycleFactorError, MachineDocumentError,
                            ModPSearchError, NonReversibleError, ToolkitError)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    """引数の組合せが不正（終了コード 2）"""


def _parse_language(text: str) -> List[str]:
    """カンマ区切りの有限言語（空要素は ε）"""
    return sorted(set(text.split(",")), key=lambda w: (len(w), w))


class CommandRunner:
    """サブコマンドの実行クラス"""

    def __init__(self, config: AppConfig):
        self.config = config

    # ------------------------------------------------------------ 共通処理

    def _load_valid(self, path: str):
        """機械ファイルを読み込み、検証に通ったものだけを返す（違反は表示して None）"""
        machine, _ = load_machine(path)
        violations = validate(machine, self.config.tolerance)
        if violations:
            print(f"{path}: 検証違反 {len(violations)} 件")
            for v in violations:
                print(f"  {v}")
            return None
        return machine

    def _require(self, args, *names: str):
        missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
        if missing:
            raise UsageError(f"{args.command}: {', '.join(missing)} が必要です")

    def _save(self, machine, out: Optional[str], metadata=None):
        if out is None:
            raise UsageError("--out が必要です")
        save_machine(machine, out, metadata)
        print(f"{model_name(machine)} -> {out}")

    # ------------------------------------------------------------ サブコマンド

    def cmd_validate(self, args) -> int:
        self._require(args, 'input')
        loader = MachineLoader(args.input)
        ok, msg = loader.load()
        if not ok:
            print(f"error: {msg}", file=sys.stderr)
            return EXIT_FAILURE
        violations = validate(loader.machine, self.config.tolerance)
        if violations:
            # 同じ種類・構成要素の違反は 1 件にまとめる
            distinct = {v.get_comparison_key(): v for v in violations}
            print(f"{args.input}: 検証違反 {len(distinct)} 件")
            for v in distinct.values():
                print(f"  {v}")
            return EXIT_FAILURE
        print(f"{args.input}: OK ({model_name(loader.machine)})")
        return EXIT_OK

    def cmd_run(self, args) -> int:
        self._require(args, 'input', 'word')
        machine = self._load_valid(args.input)
        if machine is None:
            return EXIT_FAILURE
        row = {'word': args.word, 'model': model_name(machine)}
        if isinstance(machine, MmQfa):
            p_acc, p_rej = mm_accept_prob(machine, args.word)
            print(f"accept {p_acc:.12f}")
            print(f"reject {p_rej:.12f}")
            row.update(accept=p_acc, reject=p_rej)
        else:
            p_acc = accept_probability(machine, args.word)
            print(f"accept {p_acc:.12f}")
            row.update(accept=p_acc)
        if args.csv and not export_to_csv(pd.DataFrame([row]), args.csv):
            return EXIT_FAILURE
        return EXIT_OK

    def cmd_minimize(self, args) -> int:
        self._require(args, 'input')
        machine = self._load_valid(args.input)
        if machine is None:
            return EXIT_FAILURE
        if not isinstance(machine, Dfa):
            raise UsageError(f"minimize は DFA のみ対象です: {model_name(machine)}")
        minimal = dfa_minimize(machine)
        print(f"{len(machine.states)} -> {len(minimal.states)} states")
        if args.out:
            self._save(minimal, args.out)
        return EXIT_OK

    def cmd_product(self, args) -> int:
        self._require(args, 'input', 'other')
        left, right = self._load_valid(args.input), self._load_valid(args.other)
        if left is None or right is None:
            return EXIT_FAILURE
        if not isinstance(left, Dfa) or not isinstance(right, Dfa):
            raise UsageError("product は DFA 同士のみ対象です")
        product = dfa_product(left, right, ProductOp(args.op))
        print(f"{args.op}: {len(product.states)} states")
        if args.out:
            self._save(product, args.out)
        return EXIT_OK

    def cmd_detect(self, args) -> int:
        self._require(args, 'input')
        machine = self._load_valid(args.input)
        if machine is None:
            return EXIT_FAILURE
        if not isinstance(machine, Dfa):
            raise UsageError(f"detect は DFA のみ対象です: {model_name(machine)}")
        minimal = dfa_minimize(machine)
        if len(minimal.states) != len(machine.states):
            print(f"notice: 入力は最小ではないため最小化しました ({len(machine.states)} -> {len(minimal.states)} states)")
            logger.warning(f"detect: 非最小 DFA を自動最小化 {args.input}")

        detectors = []
        if args.which in ("mm", "both"):
            detectors.append(detect_mm_forbidden)
        if args.which in ("f", "both"):
            detectors.append(detect_f_construction)
        found = False
        for detector in detectors:
            witness = detector(minimal)
            if witness is None:
                continue
            found = True
            print(witness.describe())
        if not found:
            print("none")
        return EXIT_FAILURE if found and args.expect_none else EXIT_OK

    def cmd_convert(self, args) -> int:
        self._require(args, 'input', 'to')
        machine = self._load_valid(args.input)
        if machine is None:
            return EXIT_FAILURE
        if args.to == "qfac":
            if isinstance(machine, MultiLetterQfa):
                converted = kletter_to_qfac(machine)
            elif isinstance(machine, MoQfa):
                converted = moqfa_as_qfac(machine)
            elif isinstance(machine, Dfa):
                converted = dfa_as_qfac(machine)
            else:
                raise UsageError(f"{model_name(machine)} から qfac へは変換できません")
        else:
            if not isinstance(machine, Qfac):
                raise UsageError(f"{model_name(machine)} から mo1qfa へは変換できません")
            converted = reversible_qfac_to_mo(machine)
        self._save(converted, args.out, {'converted_from': model_name(machine), 'source': args.input})
        return EXIT_OK

    def cmd_build(self, args) -> int:
        kind = args.kind
        if kind == "base-dfa":
            self._require(args, 'h')
            self._save(build_base_dfa(args.h), args.out, {'h': args.h})
        elif kind == "lhp-dfa":
            self._require(args, 'h', 'p')
            machine = build_lhp_dfa(args.h, args.p)
            print(f"{len(machine.states)} states")
            self._save(machine, args.out, {'h': args.h, 'p': args.p})
        elif kind == "modp":
            self._require(args, 'p', 'eps', 'seed')
            params = search_modp_multipliers(args.p, args.eps, args.seed, self.config.modp_draw_budget,
                                             self.config.modp_draws_per_size)
            print(f"d={params.block_count} certificate={params.certificate:.12f}")
            self._save(moqfa_from_modp_params(params, args.alphabet), args.out, {
                'p': args.p, 'epsilon': args.eps, 'seed': args.seed,
                'rotation_multipliers': list(params.rotation_multipliers),
                'block_count': params.block_count, 'certificate': params.certificate,
                'draws': params.draws,
            })
        elif kind == "exact-finite":
            self._require(args, 'lang')
            language = _parse_language(args.lang)
            machine = build_exact_finite_qfac(language, args.alphabet)
            print(f"classical {len(machine.classical_states)}, quantum {machine.dim}")
            self._save(machine, args.out, {'language': language})
        elif kind == "lhp-qfac":
            self._require(args, 'h', 'p', 'eps', 'seed')
            machine = build_lhp_qfac(LhpParams(args.h, args.p, args.eps), args.seed,
                                     self.config.modp_draw_budget, self.config.modp_draws_per_size)
            print(f"classical {len(machine.classical_states)}, quantum {machine.dim}")
            self._save(machine, args.out, {'h': args.h, 'p': args.p, 'epsilon': args.eps, 'seed': args.seed})
        return EXIT_OK

    def _membership(self, args):
        if args.oracle:
            oracle = self._load_valid(args.oracle)
            if not isinstance(oracle, Dfa):
                raise UsageError("--oracle には検証に通る DFA ファイルを指定してください")
            return f"dfa:{args.oracle}", lambda w: dfa_accepts(oracle, w)
        if args.lang is not None:
            language = set(_parse_language(args.lang))
            return f"finite:{args.lang}", language.__contains__
        if args.h is not None and args.p is not None:
            return f"L({args.h},{args.p})", lhp_membership(args.h, args.p)
        raise UsageError("report: --oracle, --lang, または --h と --p のいずれかが必要です")

    def cmd_report(self, args) -> int:
        self._require(args, 'input')
        machine = self._load_valid(args.input)
        if machine is None:
            return EXIT_FAILURE
        language, membership = self._membership(args)
        max_len = args.max_len if args.max_len is not None else self.config.report_max_len
        report = bounded_cutpoint_report(machine, membership, max_len)
        print(f"max_len {report.max_len}")
        print(f"member_min_prob {report.member_min_prob:.12f}")
        print(f"nonmember_max_prob {report.nonmember_max_prob:.12f}")
        print(f"cut_point {report.cut_point:.12f}")
        print(f"isolation {report.isolation:.12f}")
        print(f"hardest_member {report.hardest_member!r}")
        print(f"hardest_nonmember {report.hardest_nonmember!r}")
        if args.csv and not export_to_csv(report_dataframe([(args.input, language, report)]), args.csv):
            return EXIT_FAILURE
        return EXIT_OK

    def cmd_cycle(self, args) -> int:
        self._require(args, 'input', 'oracle')
        machine, oracle = self._load_valid(args.input), self._load_valid(args.oracle)
        if machine is None or oracle is None:
            return EXIT_FAILURE
        classical = machine.classical_part() if isinstance(machine, Qfac) else machine
        if not isinstance(classical, Dfa) or not isinstance(oracle, Dfa):
            raise UsageError("cycle には qfac または DFA と、最小 DFA の --oracle が必要です")
        l_d, l_a, l0 = qfac_cycle_factor(classical, dfa_minimize(oracle))
        print(f"l_D {l_d}")
        print(f"l_A {l_a}")
        print(f"l0 {l0}")
        return EXIT_OK

    def cmd_experiment(self, args) -> int:
        self._require(args, 'h', 'p', 'eps')
        seed = args.seed if args.seed is not None else self.config.default_seed
        max_len = args.max_len if args.max_len is not None else self.config.experiment_max_len
        rows = run_succinctness_experiment(args.h, args.p, args.eps, max_len, seed,
                                           self.config.modp_draw_budget, self.config.modp_draws_per_size)
        df = experiment_dataframe(rows)
        print(df.to_string(index=False))
        exported = True
        if args.csv:
            exported = export_to_csv(df, args.csv) and exported
        if args.xlsx:
            checks = bound_dataframe(row.bound_check() for row in rows if row.observed_isolation > 0)
            exported = export_to_excel({'experiment': df, 'bounds': checks}, args.xlsx) and exported
        return EXIT_OK if exported else EXIT_FAILURE

    def cmd_samples(self, args) -> int:
        out = args.out or self.config.output_folder
        seed = args.seed if args.seed is not None else self.config.default_seed
        if not generate_sample_files(out, seed):
            return EXIT_FAILURE
        print(f"samples -> {os.path.join(out, 'machines')}")
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfac", description="1QFAC と周辺モデルのツールキット")
    parser.add_argument("--config", default="app_config.json", help="設定ファイル (default: app_config.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="機械ファイルの不変条件を検査")
    p.add_argument("--input", required=True)

    p = sub.add_parser("run", help="文字列の受理確率を計算")
    p.add_argument("--input", required=True)
    p.add_argument("--word", default="", help="入力文字列 (default: 空文字列)")
    p.add_argument("--csv")

    p = sub.add_parser("minimize", help="DFA を最小化")
    p.add_argument("--input", required=True)
    p.add_argument("--out")

    p = sub.add_parser("product", help="二つの DFA の積構成")
    p.add_argument("--input", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--op", choices=[op.value for op in ProductOp], default="intersect")
    p.add_argument("--out")

    p = sub.add_parser("detect", help="MM-1QFA 禁止構成・F 構成の検出")
    p.add_argument("--input", required=True)
    p.add_argument("--which", choices=["mm", "f", "both"], default="both")
    p.add_argument("--expect-none", action="store_true", help="証拠が見つかれば終了コード 1")

    p = sub.add_parser("convert", help="モデル間の変換")
    p.add_argument("--input", required=True)
    p.add_argument("--to", choices=["qfac", "mo"], required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build", help="構成した機械をファイルに書き出す")
    p.add_argument("kind", choices=["lhp-dfa", "base-dfa", "modp", "exact-finite", "lhp-qfac"])
    p.add_argument("--h", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--lang", help="カンマ区切りの有限言語（空要素は ε）")
    p.add_argument("--alphabet", type=lambda s: tuple(s), default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="有界長の cut-point / isolation")
    p.add_argument("--input", required=True)
    p.add_argument("--oracle", help="所属判定に使う DFA ファイル")
    p.add_argument("--lang")
    p.add_argument("--h", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--csv")

    p = sub.add_parser("cycle", help="単項言語のサイクル長の比 l_D = l_A·l0")
    p.add_argument("--input", required=True)
    p.add_argument("--oracle", required=True)

    p = sub.add_parser("experiment", help="実験")
    p.add_argument("name", choices=["succinctness"])
    p.add_argument("--h", type=int, nargs="+", required=True)
    p.add_argument("--p", type=int, nargs="+", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--csv")
    p.add_argument("--xlsx")

    p = sub.add_parser("samples", help="サンプル機械ファイルを生成")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    config = AppConfig(args.config)
    init_app_logging(config.log_level, log_to_file=config.log_to_file)
    if getattr(args, 'alphabet', None) is None and args.command == "build":
        args.alphabet = ("0",) if args.kind == "modp" else BINARY

    runner = CommandRunner(config)
    handler = getattr(runner, f"cmd_{args.command}")
    try:
        return handler(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CycleFactorError as e:
        print(f"internal error: {e}", file=sys.stderr)
        logger.error(f"内部整合性エラー: {e}")
        return EXIT_INTERNAL
    except (NonReversibleError, ModPSearchError, MachineDocumentError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ConstructionError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error(f"ファイル入出力エラー: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
