"""
例外定義モジュール
ツールキット共通の例外階層。各例外は検証レコードと同じく details を持つ
"""

from typing import Dict, Optional


class ToolkitError(Exception):
    """ツールキットの基底例外"""
    
    def __init__(self, message: str, details: Optional[Dict] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}
    
    def __str__(self):
        return self.message


class AlphabetError(ToolkitError):
    """アルファベット外の記号、アルファベット不一致、空白記号の誤用"""


class AutomatonError(ToolkitError):
    """遷移の欠落、未知の状態、単項でない入力など"""


class LinalgError(ToolkitError):
    """非正方行列や不正なパラメータ"""


class MeasurementError(ToolkitError):
    """射影測定族が不完全・非直交、または状態が単位ノルムでない"""


class ConstructionError(ToolkitError):
    """構成パラメータが不正"""


class ModPSearchError(ConstructionError):
    """mod-p 乗数探索が予算内で証明書を得られなかった"""
    
    def __init__(self, message: str, best_certificate: float, best_multipliers, details=None):
        super().__init__(message, details)
        self.best_certificate = best_certificate
        self.best_multipliers = tuple(best_multipliers)


class NonReversibleError(ConstructionError):
    """古典遷移が記号ごとに単射でない 1QFAC"""
    
    def __init__(self, message: str, state_a: str, state_b: str, symbol: str):
        super().__init__(message, {'states': (state_a, state_b), 'symbol': symbol})
        self.state_a = state_a
        self.state_b = state_b
        self.symbol = symbol


class MachineDocumentError(ToolkitError):
    """機械ファイルの解析エラー（location は body.unitaries.0 のようなパス）"""
    
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}", {'location': location})
        self.location = location


class CycleFactorError(ToolkitError):
    """単項サイクル長の比が整数にならない（内部整合性の破綻）"""
