"""
Иерархия исключений pvlab.
Каждому классу соответствует код выхода CLI (см. main.py).
"""


class PVLabError(Exception):
    """Базовое исключение лаборатории."""

    exit_code = 2


class ConfigError(PVLabError, ValueError):
    """Некорректная конфигурация (параметры, файл конфигурации, сетка λ)."""

    exit_code = 1

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(PVLabError, ValueError):
    """Неверный вызов операции (индекс вне диапазона, точка вне области и т.п.)."""


class DataError(PVLabError):
    """Некорректные входные данные (дубликаты точек, отрицательная интенсивность)."""


class GeometryError(DataError):
    """Нарушение комбинаторики диаграммы, которое нельзя исправить возмущением."""


class PrecisionError(PVLabError):
    """Квадратура или Монте-Карло не достигли заявленной точности."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class DegenerateStatisticError(PVLabError):
    """Статистика вырождена (нулевая дисперсия)."""


class FitError(PVLabError):
    """Подгонка степенного закона невозможна (например, неположительные средние)."""


class TaintedResultsError(PVLabError):
    """Доля реплик с касанием ∂Q превысила порог."""

    exit_code = 3
