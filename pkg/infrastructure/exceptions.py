"""
Кастомные исключения
"""
from typing import Optional


class GlobalOptException(Exception):
    """Базовое исключение для библиотеки глобальной оптимизации"""
    pass


class InvalidInputError(GlobalOptException, ValueError):
    """Некорректные входные данные (размерность, NaN, пустая последовательность)"""
    pass


class DomainError(GlobalOptException, ValueError):
    """Точка вне области определения"""
    pass


class UnsupportedQueryError(GlobalOptException):
    """Оракул не поддерживает запрошенный вид запроса"""
    pass


class GridBudgetError(GlobalOptException):
    """Решётка превышает допустимое число точек"""

    def __init__(self, required: int, budget: int, message: Optional[str] = None):
        self.required = required
        self.budget = budget
        super().__init__(
            message or f"Решётка требует {required} запросов к оракулу, бюджет {budget}"
        )


class BenchmarkLookupError(GlobalOptException, LookupError):
    """Неизвестная тестовая функция или недопустимая размерность"""
    pass


class SaturationError(GlobalOptException):
    """Запросы покрывают область слишком плотно для построения свидетеля"""
    pass


class QueryBudgetExceeded(GlobalOptException):
    """Решатель превысил бюджет запросов"""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"Превышен бюджет запросов: {budget}")


class TraceParseError(GlobalOptException):
    """Ошибка разбора CSV-трассы"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"строка {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ReportIOError(GlobalOptException):
    """Ошибка записи/чтения файла отчёта"""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")
