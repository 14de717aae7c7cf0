"""
設定管理モジュール
ツールキットの既定値（許容誤差、乱数シード、探索予算など）を JSON で管理
"""

import json
import os

from logging_config import get_logger

logger = get_logger(__name__)

DEFAULTS = {
    'tolerance': 1e-9,
    'default_seed': 7,
    'modp_draw_budget': 200,
    'modp_draws_per_size': 20,
    'report_max_len': 10,
    'experiment_max_len': 10,
    'log_level': 'INFO',
    'log_to_file': False,
    'output_folder': 'output',
}


class AppConfig:
    """アプリケーション設定クラス"""
    
    def __init__(self, config_file: str = "app_config.json"):
        self.config_file = config_file
        self.tolerance = DEFAULTS['tolerance']
        self.default_seed = DEFAULTS['default_seed']
        
        # mod-p MO-1QFA の乗数探索: 総試行回数とブロック数ごとの試行回数
        self.modp_draw_budget = DEFAULTS['modp_draw_budget']
        self.modp_draws_per_size = DEFAULTS['modp_draws_per_size']
        
        self.report_max_len = DEFAULTS['report_max_len']
        self.experiment_max_len = DEFAULTS['experiment_max_len']
        self.log_level = DEFAULTS['log_level']
        self.log_to_file = DEFAULTS['log_to_file']
        self.output_folder = DEFAULTS['output_folder']
        
        # 初期化時にファイルから読み込み
        self.load()
    
    def load(self) -> bool:
        """設定ファイルを読み込む"""
        if not os.path.exists(self.config_file):
            # ファイルが存在しない場合はデフォルト値を使用
            return True
        
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                data = json.load(f)
            
            self.tolerance = float(data.get('tolerance', DEFAULTS['tolerance']))
            self.default_seed = int(data.get('default_seed', DEFAULTS['default_seed']))
            self.modp_draw_budget = int(data.get('modp_draw_budget', DEFAULTS['modp_draw_budget']))
            self.modp_draws_per_size = int(data.get('modp_draws_per_size',
                                                    DEFAULTS['modp_draws_per_size']))
            self.report_max_len = int(data.get('report_max_len', DEFAULTS['report_max_len']))
            self.experiment_max_len = int(data.get('experiment_max_len',
                                                   DEFAULTS['experiment_max_len']))
            self.log_level = str(data.get('log_level', DEFAULTS['log_level'])).upper()
            self.log_to_file = bool(data.get('log_to_file', DEFAULTS['log_to_file']))
            self.output_folder = data.get('output_folder', DEFAULTS['output_folder'])
            return True
        
        except (OSError, ValueError, TypeError) as e:
            logger.error(f"設定ファイル読み込みエラー: {self.config_file}: {e}")
            return False
    
    def save(self) -> bool:
        """設定ファイルに保存"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
            return True
        
        except OSError as e:
            logger.error(f"設定ファイル保存エラー: {self.config_file}: {e}")
            return False
    
    def to_dict(self) -> dict:
        """現在の設定を辞書に変換"""
        return {
            'tolerance': self.tolerance,
            'default_seed': self.default_seed,
            'modp_draw_budget': self.modp_draw_budget,
            'modp_draws_per_size': self.modp_draws_per_size,
            'report_max_len': self.report_max_len,
            'experiment_max_len': self.experiment_max_len,
            'log_level': self.log_level,
            'log_to_file': self.log_to_file,
            'output_folder': self.output_folder,
        }
