import os
from typing import Dict, Any
from dotenv import load_dotenv

load_dotenv()

class Settings:
    """
    全域設定類別
    """

    # 列舉上限
    PRESHEAF_CAP = int(os.environ.get('QUANTIKIT_CAP', 4096))
    DIAGONAL_CAP = int(os.environ.get('QUANTIKIT_DIAGONAL_CAP', 64))
    PROBE_OBJECT_CAP = int(os.environ.get('QUANTIKIT_PROBE_OBJECT_CAP', 4))
    PROBE_LATTICE_CAP = int(os.environ.get('QUANTIKIT_PROBE_LATTICE_CAP', 8))
    FUNCTOR_SOURCE_CAP = int(os.environ.get('QUANTIKIT_FUNCTOR_SOURCE_CAP', 6))
    FUNCTOR_TARGET_CAP = int(os.environ.get('QUANTIKIT_FUNCTOR_TARGET_CAP', 8))

    # oracle 平行度（1 = 不開執行緒池）
    ORACLE_WORKERS = int(os.environ.get('QUANTIKIT_ORACLE_WORKERS', 1))

    # 報告輸出
    REPORT_INDENT = 2
    BUNDLE_FORMAT_VERSION = 1

    # 日誌設定
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    @classmethod
    def get_all(cls) -> Dict[str, Any]:
        """
        取得所有設定值

        返回:
            包含所有設定的字典
        """
        return {key: value for key, value in cls.__dict__.items()
                if not key.startswith('__') and not callable(value)
                and not isinstance(value, classmethod)}
