# quantikit/services/report.py
import logging
import os
import sys
import traceback
from pathlib import Path
from typing import Any, Optional, TextIO

from quantikit.core.errors import QuantikitError
from quantikit.serialization.report import emit_report
from quantikit.services.oracle import Certificate

logger = logging.getLogger(__name__)


class ReportService:
    """把結果以標準 JSON 寫到 stdout（或 --output 檔案），摘要訊息只進日誌"""

    def __init__(self, stream: Optional[TextIO] = None, output: Optional[str] = None):
        self.stream = stream or sys.stdout
        self.output = output

    def _write(self, text: str) -> bool:
        """
        寫出報告

        返回:
            bool: 成功寫出為 True
        """
        if self.output:
            try:
                Path(self.output).write_text(text, encoding='utf-8')
                return True
            except OSError as e:
                logger.error(f"寫入報告失敗 {self.output}: {e.strerror}")
                return False
        self.stream.write(text)
        self.stream.flush()
        return True

    def _format_success_message(self, task_name: str, result: Any, duration: float) -> str:
        if isinstance(result, Certificate):
            verdict = '已驗證' if result.certified else '找到反例'
            outcome = f"{verdict}，檢查 {result.checked} 項"
        else:
            outcome = type(result).__name__
        return f"✅ [{task_name}] 完成: {outcome} ⏱️ {duration:.2f}s"

    def _format_error_message(self, task_name: str, error: Exception, duration: float) -> str:
        """格式化失敗訊息，附上最後一個堆疊框架的位置"""
        tb_info = traceback.extract_tb(error.__traceback__)
        location = ''
        if tb_info:
            last_trace = tb_info[-1]
            location = f" ({os.path.basename(last_trace.filename)}:{last_trace.name}:{last_trace.lineno})"
        return (f"🚨 [{task_name}] 失敗 {type(error).__name__}: {error}{location} "
                f"⏱️ {duration:.2f}s")

    def notify_success(self, task_name: str, result: Any, duration: float) -> int:
        """
        輸出結果報告

        返回:
            int: 結束碼；反例憑證為 1
        """
        logger.info(self._format_success_message(task_name, result, duration))
        if not self._write(emit_report(result)):
            return 2
        if isinstance(result, Certificate) and not result.certified:
            return 1
        return 0

    def notify_failure(self, task_name: str, error: QuantikitError, duration: float) -> int:
        """輸出機器可讀的錯誤物件並回傳對應的結束碼"""
        logger.warning(self._format_error_message(task_name, error, duration))
        self._write(emit_report(error))
        return error.exit_code
