# quantikit/core/errors.py
from typing import Any, Dict, Optional


class QuantikitError(Exception):
    """所有 quantikit 錯誤的基底類別，附帶可序列化的見證資料 (witness)"""

    exit_code = 1

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.witness = witness or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': self.message,
            'witness': self.witness,
        }


class ValidationFailure(QuantikitError):
    """公理或結構條件不成立（CLI 回傳 1）"""


class UsageError(QuantikitError):
    """輸入格式或引用錯誤（CLI 回傳 2）"""

    exit_code = 2


# lattice
class CycleError(ValidationFailure):
    pass


class NotALattice(ValidationFailure):
    pass


class UnknownElement(ValidationFailure):
    pass


# quantaloid
class TypeMismatch(ValidationFailure):
    pass


class NotAssociative(ValidationFailure):
    pass


class NotUnital(ValidationFailure):
    pass


class NotSupPreserving(ValidationFailure):
    pass


class BadParameter(UsageError):
    pass


class SizeCap(ValidationFailure):
    pass


# qcat
class ReflexivityViolation(ValidationFailure):
    pass


class TransitivityViolation(ValidationFailure):
    pass


class ExtentMismatch(ValidationFailure):
    pass


class NotMonotone(ValidationFailure):
    pass


# qdist
class BimoduleViolation(ValidationFailure):
    pass


# qchu
class ChuViolation(ValidationFailure):
    pass


class FormulationMismatch(ValidationFailure):
    """兩種等價的 Chu 條件給出不同結果，代表實作錯誤"""


class WitnessedIllDefinedness(ValidationFailure):
    pass


class NotACone(ValidationFailure):
    pass


class NotDistinct(UsageError):
    pass


# serialization
class BundleSyntaxError(UsageError):
    pass


class UnresolvedReference(UsageError):
    pass


class BundleValidationError(ValidationFailure):
    """包裝各模組的驗證錯誤並附上欄位路徑"""

    def __init__(self, path: str, cause: QuantikitError):
        super().__init__(f"{path}: {cause.message}", {'path': path, 'cause': cause.to_dict()})
        self.path = path
        self.cause = cause
