"""
機械ファイル読み書きモジュール
6 種類のモデルを schema_version "1" の JSON 文書として保存・読み込みする

複素数は [re, im]、行列は行優先の入れ子配列。1QFAC のユニタリは "state|symbol"、
多文字 1QFA の窓は空白記号を "_" で綴ったものをキーにする。
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from classical_automata import Dfa, Pfa
from logging_config import get_logger
from quantum_models import MmQfa, MoQfa, MultiLetterQfa, Qfac, model_name
from toolkit_errors import MachineDocumentError, ToolkitError

logger = get_logger(__name__)

SCHEMA_VERSION = "1"
MACHINE_TYPES = ("dfa", "pfa", "mo1qfa", "mm1qfa", "ml1qfa", "qfac")
UNITARY_KEY_SEPARATOR = "|"


@dataclass
class MachineDocument:
    """機械ファイル 1 件分（body は型ごとのレコード）"""
    type: str
    body: Dict[str, Any]
    schema_version: str = SCHEMA_VERSION
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        doc = {'schema_version': self.schema_version, 'type': self.type, 'body': self.body}
        if self.metadata:
            doc['metadata'] = self.metadata
        return doc


# ---------------------------------------------------------------- 値の変換

def _complex_to_json(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _vector_to_json(v) -> List[List[float]]:
    return [_complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def _matrix_to_json(m) -> List[List[List[float]]]:
    return [[_complex_to_json(z) for z in row] for row in np.asarray(m)]


def _parse_complex(value, location: str) -> complex:
    if isinstance(value, bool):
        raise MachineDocumentError(location, "複素数が必要です")
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
        return complex(value[0], value[1])
    raise MachineDocumentError(location, f"複素数は [re, im] で表してください: {value!r}")


def _parse_vector(value, location: str) -> np.ndarray:
    if not isinstance(value, list):
        raise MachineDocumentError(location, "配列が必要です")
    return np.array([_parse_complex(z, f"{location}.{i}") for i, z in enumerate(value)],
                    dtype=np.complex128)


def _parse_matrix(value, location: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise MachineDocumentError(location, "空でない二次元配列が必要です")
    rows = [_parse_vector(row, f"{location}.{i}") for i, row in enumerate(value)]
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MachineDocumentError(f"{location}.{i}", f"行の長さ {len(row)} が {width} と一致しません")
    return np.array(rows)


def _parse_real_vector(value, location: str) -> np.ndarray:
    if not isinstance(value, list):
        raise MachineDocumentError(location, "配列が必要です")
    for i, x in enumerate(value):
        if not isinstance(x, (int, float)) or isinstance(x, bool):
            raise MachineDocumentError(f"{location}.{i}", f"実数が必要です: {x!r}")
    return np.array(value, dtype=float)


def _parse_real_matrix(value, location: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise MachineDocumentError(location, "空でない二次元配列が必要です")
    rows = [_parse_real_vector(row, f"{location}.{i}") for i, row in enumerate(value)]
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MachineDocumentError(f"{location}.{i}", f"行の長さ {len(row)} が {width} と一致しません")
    return np.array(rows)


def _require(body: Dict, key: str, location: str):
    if key not in body:
        raise MachineDocumentError(f"{location}.{key}", "必須項目がありません")
    return body[key]


def _string_list(body: Dict, key: str, location: str) -> List[str]:
    value = _require(body, key, location)
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise MachineDocumentError(f"{location}.{key}", "文字列の配列が必要です")
    return value


def _string(body: Dict, key: str, location: str) -> str:
    value = _require(body, key, location)
    if not isinstance(value, str):
        raise MachineDocumentError(f"{location}.{key}", "文字列が必要です")
    return value


def _mapping(body: Dict, key: str, location: str) -> Dict:
    value = _require(body, key, location)
    if not isinstance(value, dict):
        raise MachineDocumentError(f"{location}.{key}", "オブジェクトが必要です")
    return value


def _transitions(body: Dict, location: str) -> Dict[str, Dict[str, str]]:
    table = _mapping(body, 'transitions', location)
    for state, row in table.items():
        if not isinstance(row, dict) or not all(isinstance(t, str) for t in row.values()):
            raise MachineDocumentError(f"{location}.transitions.{state}", "記号 → 状態のオブジェクトが必要です")
    return table


def _matrix_map(body: Dict, key: str, location: str) -> Dict[str, np.ndarray]:
    return {name: _parse_matrix(m, f"{location}.{key}.{name}")
            for name, m in _mapping(body, key, location).items()}


# ---------------------------------------------------------------- 機械 → 文書

def machine_to_document(machine, metadata: Optional[Dict[str, Any]] = None) -> MachineDocument:
    """機械を MachineDocument に変換"""
    kind = model_name(machine)
    if isinstance(machine, Dfa):
        body = {
            'states': list(machine.states),
            'alphabet': list(machine.alphabet),
            'initial': machine.initial,
            'accepting': sorted(machine.accepting),
            'transitions': {s: dict(row) for s, row in machine.transitions.items()},
        }
    elif isinstance(machine, Pfa):
        body = {
            'states': list(machine.states),
            'alphabet': list(machine.alphabet),
            'rho': machine.rho.tolist(),
            'matrices': {s: m.tolist() for s, m in machine.matrices.items()},
            'accepting': sorted(machine.accepting),
        }
    elif isinstance(machine, Qfac):
        body = {
            'classical_states': list(machine.classical_states),
            'basis_states': list(machine.basis_states),
            'alphabet': list(machine.alphabet),
            'initial_classical': machine.initial_classical,
            'initial_quantum': _vector_to_json(machine.initial_quantum),
            'transitions': {s: dict(row) for s, row in machine.transitions.items()},
            'unitaries': {f"{s}{UNITARY_KEY_SEPARATOR}{symbol}": _matrix_to_json(u)
                          for (s, symbol), u in machine.unitaries.items()},
            'accept_projectors': {s: _matrix_to_json(p) for s, p in machine.accept_projectors.items()},
        }
    else:
        body = {
            'basis_states': list(machine.basis_states),
            'alphabet': list(machine.alphabet),
            'initial_state': _vector_to_json(machine.initial_state),
            'unitaries': {key: _matrix_to_json(u) for key, u in machine.unitaries.items()},
            'accepting': sorted(machine.accepting),
        }
        if isinstance(machine, MmQfa):
            body['end_marker_unitary'] = _matrix_to_json(machine.end_marker_unitary)
            body['rejecting'] = sorted(machine.rejecting)
        if isinstance(machine, MultiLetterQfa):
            body['k'] = machine.k
    return MachineDocument(kind, body, metadata=dict(metadata or {}))


# ---------------------------------------------------------------- 文書 → 機械

def _build_dfa(body: Dict) -> Dfa:
    loc = "body"
    return Dfa(_string_list(body, 'states', loc), _string_list(body, 'alphabet', loc),
               _string(body, 'initial', loc), _transitions(body, loc),
               _string_list(body, 'accepting', loc))


def _build_pfa(body: Dict) -> Pfa:
    loc = "body"
    matrices = {s: _parse_real_matrix(m, f"{loc}.matrices.{s}")
                for s, m in _mapping(body, 'matrices', loc).items()}
    return Pfa(_string_list(body, 'states', loc), _string_list(body, 'alphabet', loc),
               _parse_real_vector(_require(body, 'rho', loc), f"{loc}.rho"), matrices,
               _string_list(body, 'accepting', loc))


def _build_moqfa(body: Dict) -> MoQfa:
    loc = "body"
    return MoQfa(_string_list(body, 'basis_states', loc), _string_list(body, 'alphabet', loc),
                 _parse_vector(_require(body, 'initial_state', loc), f"{loc}.initial_state"),
                 _matrix_map(body, 'unitaries', loc), _string_list(body, 'accepting', loc))


def _build_mmqfa(body: Dict) -> MmQfa:
    loc = "body"
    return MmQfa(_string_list(body, 'basis_states', loc), _string_list(body, 'alphabet', loc),
                 _parse_vector(_require(body, 'initial_state', loc), f"{loc}.initial_state"),
                 _matrix_map(body, 'unitaries', loc),
                 _parse_matrix(_require(body, 'end_marker_unitary', loc), f"{loc}.end_marker_unitary"),
                 _string_list(body, 'accepting', loc), _string_list(body, 'rejecting', loc))


def _build_mlqfa(body: Dict) -> MultiLetterQfa:
    loc = "body"
    k = _require(body, 'k', loc)
    if not isinstance(k, int) or isinstance(k, bool):
        raise MachineDocumentError(f"{loc}.k", "整数が必要です")
    return MultiLetterQfa(k, _string_list(body, 'basis_states', loc), _string_list(body, 'alphabet', loc),
                          _parse_vector(_require(body, 'initial_state', loc), f"{loc}.initial_state"),
                          _matrix_map(body, 'unitaries', loc), _string_list(body, 'accepting', loc))


def _build_qfac(body: Dict) -> Qfac:
    loc = "body"
    unitaries = {}
    for key, m in _mapping(body, 'unitaries', loc).items():
        if UNITARY_KEY_SEPARATOR not in key:
            raise MachineDocumentError(f"{loc}.unitaries.{key}", "キーは \"state|symbol\" の形式です")
        state, symbol = key.rsplit(UNITARY_KEY_SEPARATOR, 1)
        unitaries[(state, symbol)] = _parse_matrix(m, f"{loc}.unitaries.{key}")
    return Qfac(_string_list(body, 'classical_states', loc), _string_list(body, 'basis_states', loc),
                _string_list(body, 'alphabet', loc), _string(body, 'initial_classical', loc),
                _parse_vector(_require(body, 'initial_quantum', loc), f"{loc}.initial_quantum"),
                _transitions(body, loc), unitaries, _matrix_map(body, 'accept_projectors', loc))


_BUILDERS = {
    'dfa': _build_dfa,
    'pfa': _build_pfa,
    'mo1qfa': _build_moqfa,
    'mm1qfa': _build_mmqfa,
    'ml1qfa': _build_mlqfa,
    'qfac': _build_qfac,
}


def parse_document(data: Any) -> MachineDocument:
    """JSON 値を MachineDocument に変換（構造だけを検査）"""
    if not isinstance(data, dict):
        raise MachineDocumentError("$", "オブジェクトが必要です")
    version = data.get('schema_version')
    if version != SCHEMA_VERSION:
        raise MachineDocumentError("schema_version", f"未対応のバージョンです: {version!r}")
    kind = data.get('type')
    if kind not in MACHINE_TYPES:
        raise MachineDocumentError("type", f"未知のモデル型です: {kind!r}（{', '.join(MACHINE_TYPES)}）")
    body = data.get('body')
    if not isinstance(body, dict):
        raise MachineDocumentError("body", "オブジェクトが必要です")
    metadata = data.get('metadata', {})
    if not isinstance(metadata, dict):
        raise MachineDocumentError("metadata", "オブジェクトが必要です")
    return MachineDocument(kind, body, version, metadata)


def document_to_machine(doc: MachineDocument):
    """MachineDocument から機械を組み立てる"""
    try:
        return _BUILDERS[doc.type](doc.body)
    except MachineDocumentError:
        raise
    except ToolkitError as e:
        raise MachineDocumentError("body", e.message) from e
    except (ValueError, TypeError) as e:
        raise MachineDocumentError("body", str(e)) from e


def load_machine(path: str) -> Tuple[Any, MachineDocument]:
    """
    機械ファイルを読み込む

    Returns:
        (機械, 文書)

    Raises:
        MachineDocumentError: JSON として読めない、または構造が不正
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise MachineDocumentError(path, f"ファイルを開けません: {e}") from e
    except json.JSONDecodeError as e:
        raise MachineDocumentError(f"{path}:{e.lineno}:{e.colno}", f"JSON として読めません: {e.msg}") from e
    doc = parse_document(data)
    machine = document_to_machine(doc)
    logger.debug("機械ファイル読み込み: %s (%s)", path, doc.type)
    return machine, doc


def save_machine(machine, path: str, metadata: Optional[Dict[str, Any]] = None) -> MachineDocument:
    """機械を JSON ファイルに保存（UTF-8、インデント 2、キーは挿入順）"""
    doc = machine_to_document(machine, metadata)
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(doc.to_dict(), f, ensure_ascii=False, indent=2)
        f.write("\n")
    logger.info(f"機械ファイル保存: {path} ({doc.type})")
    return doc


class MachineLoader:
    """機械ファイル読み込みクラス"""

    def __init__(self, path: str):
        self.path = path
        self.machine = None
        self.document: Optional[MachineDocument] = None

    def load(self) -> Tuple[bool, str]:
        """機械ファイルを読み込む

        Returns:
            (成功: bool, エラーメッセージ: str)
        """
        if not os.path.exists(self.path):
            return False, f"{self.path} が見つかりません"
        try:
            self.machine, self.document = load_machine(self.path)
        except MachineDocumentError as e:
            return False, f"機械ファイルの解析エラー: {e}"
        return True, f"{self.document.type} を読み込みました"
