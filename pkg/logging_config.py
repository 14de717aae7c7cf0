"""
ロギング設定モジュール
ツールキット全体のログ管理を行う
"""

import logging
import logging.handlers
from pathlib import Path
from datetime import datetime

ROOT_LOGGER_NAME = "qfac_toolkit"


def setup_logging(log_level=logging.INFO, log_to_file=True, log_to_console=True,
                  log_dir="logs"):
    """
    ロギング設定を初期化
    
    Args:
        log_level: ログレベル（logging.DEBUG, INFO, WARNING, ERROR, CRITICAL）
        log_to_file: ファイルへのログ出力を有効にするか
        log_to_console: コンソールへのログ出力を有効にするか
        log_dir: ログファイルの出力先ディレクトリ
    
    Returns:
        設定されたロガー
    """
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(log_level)
    
    # 既存のハンドラをクリア（重複を防ぐ）
    logger.handlers.clear()
    
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    
    if log_to_file:
        log_path = Path(log_dir)
        log_path.mkdir(exist_ok=True)
        log_filename = log_path / f"qfac_{datetime.now().strftime('%Y%m%d')}.log"
        
        file_handler = logging.handlers.RotatingFileHandler(
            log_filename,
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    
    if log_to_console:
        # 標準出力は結果表示に使うため stderr へ
        console_handler = logging.StreamHandler()
        console_handler.setLevel(log_level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)
    
    logger.debug("ロギングシステム初期化完了: レベル=%s", logging.getLevelName(log_level))
    return logger


def get_logger(name):
    """
    指定された名前のロガーを取得
    
    Args:
        name: ロガー名（通常は __name__ を使用）
    
    Returns:
        ロガーインスタンス
    """
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


# グローバルロガー（CLI 起動時に一度だけ初期化）
_app_logger = None


def init_app_logging(log_level=logging.INFO, log_to_file=False, log_to_console=True):
    """
    アプリケーション全体のロギングを初期化
    
    Args:
        log_level: ログレベル
        log_to_file: ファイル出力を有効にするか
        log_to_console: コンソール出力を有効にするか
    
    Returns:
        アプリケーションロガー
    """
    global _app_logger
    if _app_logger is None:
        _app_logger = setup_logging(log_level, log_to_file=log_to_file,
                                    log_to_console=log_to_console)
    return _app_logger


def get_app_logger():
    """
    アプリケーションロガーを取得
    
    Returns:
        アプリケーションロガー（未初期化の場合はファイル出力なしで自動初期化）
    """
    global _app_logger
    if _app_logger is None:
        _app_logger = setup_logging(log_to_file=False)
    return _app_logger


def reset_app_logging():
    """グローバルロガーを破棄する（テストや CLI の再実行用）"""
    global _app_logger
    if _app_logger is not None:
        _app_logger.handlers.clear()
    _app_logger = None
