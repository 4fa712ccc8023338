# cycleweights/errors.py
from typing import List, Optional

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


class CycleWeightsError(Exception):
    """Базовая ошибка пакета: код выхода + описание"""

    exit_code: int = EXIT_VALIDATION

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class DomainError(CycleWeightsError, ValueError):
    """Аргумент вне области определения"""


class CapacityError(CycleWeightsError):
    """Превышен лимит перебора, ряда или таблицы"""


class CacheError(CycleWeightsError):
    """Повреждённый или несовместимый кэш HTable"""


class NumericError(CycleWeightsError, ArithmeticError):
    """Численный метод не сошёлся"""

    exit_code = EXIT_NUMERIC

    def __init__(self, detail: str, trace: Optional[List[float]] = None):
        super().__init__(detail)
        self.trace = list(trace or [])
