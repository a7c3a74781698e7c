"""
Доменные сущности (Domain Entities)
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from infrastructure.exceptions import DomainError, GridBudgetError, InvalidInputError


class QueryKind(str, Enum):
    """Виды запросов к оракулу"""
    VALUE = "value"
    GRADIENT = "gradient"


class GridMode(str, Enum):
    """Режим построения решётки"""
    FULL = "full"
    SAMPLED = "sampled"


class TerminalReason(str, Enum):
    """Причина остановки алгоритма"""
    MAX_ITERS = "max_iters"
    GRAD_TOLERANCE = "grad_tolerance"
    STALLED = "stalled"


class CertificateKind(str, Enum):
    """Виды вычислимых предикатов"""
    LIPSCHITZ = "lipschitz"
    BASIN = "basin"


@dataclass(frozen=True)
class Point:
    """Точка в R^d"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidInputError("Размерность точки должна быть больше нуля")
        if not all(math.isfinite(c) for c in coords):
            raise InvalidInputError(f"Координаты точки должны быть конечными: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.float64)

    @classmethod
    def of(cls, values: Union["Point", Sequence[float], np.ndarray, float]) -> "Point":
        """Привести массив, число или точку к Point"""
        if isinstance(values, Point):
            return values
        return cls(tuple(np.atleast_1d(np.asarray(values, dtype=np.float64)).ravel().tolist()))

    def distance(self, other: "Point") -> float:
        if other.dim != self.dim:
            raise InvalidInputError(f"Несовпадение размерностей: {self.dim} и {other.dim}")
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]


@dataclass(frozen=True)
class BoxDomain:
    """Куб [lo, hi]^dim"""
    lo: float
    hi: float
    dim: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise InvalidInputError(f"Требуется lo < hi, получено [{self.lo}, {self.hi}]")
        if self.dim < 1:
            raise InvalidInputError(f"Размерность области должна быть положительной: {self.dim}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, p: Union[Point, np.ndarray]) -> bool:
        arr = p.as_array() if isinstance(p, Point) else np.asarray(p, dtype=np.float64)
        if arr.shape[-1] != self.dim:
            return False
        return bool(np.all((arr >= self.lo) & (arr <= self.hi)))

    def require(self, p: Union[Point, np.ndarray]) -> None:
        """Проверить принадлежность точки(ек) области, иначе DomainError"""
        arr = p.as_array() if isinstance(p, Point) else np.asarray(p, dtype=np.float64)
        if arr.shape[-1] != self.dim:
            raise InvalidInputError(f"Ожидалась размерность {self.dim}, получено {arr.shape[-1]}")
        if not np.all((arr >= self.lo) & (arr <= self.hi)):
            raise DomainError(f"Точка вне области [{self.lo}, {self.hi}]^{self.dim}")

    def clip(self, arr: np.ndarray) -> np.ndarray:
        return np.clip(arr, self.lo, self.hi)

    def lower_corner(self) -> Point:
        return Point((self.lo,) * self.dim)

    def center(self) -> Point:
        return Point((0.5 * (self.lo + self.hi),) * self.dim)

    def to_dict(self) -> Dict[str, Any]:
        return {"lo": self.lo, "hi": self.hi, "dim": self.dim}


@dataclass(frozen=True)
class FixedDecimal:
    """Десятичное разложение точности k: r_0.r_1...r_k (r_0 = floor)"""
    integer_part: int
    digits: Tuple[int, ...]
    precision_k: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if self.precision_k < 0 or len(self.digits) != self.precision_k:
            raise InvalidInputError(
                f"Число цифр ({len(self.digits)}) не совпадает с точностью {self.precision_k}"
            )
        if any(d < 0 or d > 9 for d in self.digits):
            raise InvalidInputError(f"Цифры должны быть в диапазоне 0-9: {self.digits}")

    def __str__(self) -> str:
        if not self.digits:
            return str(self.integer_part)
        return f"{self.integer_part}." + "".join(str(d) for d in self.digits)


@dataclass(frozen=True)
class Interval:
    """Замкнутый интервал [lower, upper]"""
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise InvalidInputError(f"lower > upper: {self.lower} > {self.upper}")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, other: "Interval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper


Response = Union[Fraction, Tuple[Fraction, ...]]


@dataclass(frozen=True)
class QueryRecord:
    """Запись журнала запросов к оракулу"""
    seq: int
    point: Tuple[FixedDecimal, ...]
    precision_k: int
    kind: QueryKind
    response: Response


@dataclass(frozen=True)
class RunParams:
    """Параметры алгоритма из таблицы параметров: шаг t и нижняя граница бассейна m"""
    step_size: float
    basin_bound: float

    def validate(self, domain: BoxDomain) -> "RunParams":
        if self.step_size <= 0 or self.basin_bound <= 0:
            raise InvalidInputError("Шаг и граница бассейна должны быть положительными")
        if self.basin_bound > domain.width:
            raise InvalidInputError(
                f"m={self.basin_bound} больше ширины области {domain.width}"
            )
        return self


@dataclass(frozen=True)
class Benchmark:
    """Тестовая функция с аналитическим градиентом и известным минимумом"""
    name: str
    dim: int
    domain: BoxDomain
    minimizer: Point
    min_value: float
    value_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    grad_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    gradient_lipschitz: Optional[float] = None


@dataclass(frozen=True)
class AlgoConfig:
    """Конфигурация алгоритма спуска с решёткой"""
    basin_bound: float
    step_size: float
    max_iters: int
    grid_mode: GridMode = GridMode.FULL
    n_samples: int = 0
    grad_tolerance: float = 0.0
    query_precision_k: int = 12
    grid_budget: int = 1_000_000
    stall_window: int = 0
    stall_tolerance: float = 0.0
    seed: int = 0

    def validate(self, domain: BoxDomain) -> "AlgoConfig":
        """Проверить инварианты конфигурации для заданной области"""
        if self.basin_bound <= 0 or self.step_size <= 0:
            raise InvalidInputError("m и t должны быть положительными")
        if self.max_iters < 0:
            raise InvalidInputError("max_iters не может быть отрицательным")
        if self.grad_tolerance < 0 or self.stall_tolerance < 0:
            raise InvalidInputError("Допуски не могут быть отрицательными")
        if self.query_precision_k < 1:
            raise InvalidInputError("Точность запросов должна быть >= 1")
        if self.grid_mode == GridMode.FULL:
            per_axis = math.floor(domain.width / self.basin_bound + 1e-9) + 1
            required = per_axis ** domain.dim
            if required > self.grid_budget:
                raise GridBudgetError(required, self.grid_budget)
        return self


@dataclass(frozen=True)
class IterationRecord:
    """Одна итерация алгоритма: z_k (минимум решётки) и x_k (после шага спуска)"""
    k: int
    z: Point
    x: Point
    f_z: float
    f_x: float
    grad_norm: float
    queries_cum: int


@dataclass(frozen=True)
class RunTrace:
    """Трасса запуска алгоритма"""
    records: Tuple[IterationRecord, ...]
    total_queries: int
    terminal_reason: TerminalReason
    start_value: float

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    @property
    def best(self) -> IterationRecord:
        """Итерация с наименьшим f(x_k): выдаваемое ε-приближение"""
        return min(self.records, key=lambda r: r.f_x)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class CheckReport:
    """Результат проверки инварианта (без исключений)"""
    passed: bool
    checked: int
    first_violation: Optional[int] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class Certificate:
    """Вычислимый предикат Q(ζ, x, y) с параметром ζ"""
    kind: CertificateKind
    parameter: float

    def __post_init__(self):
        if not self.parameter > 0:
            raise InvalidInputError(f"Параметр сертификата должен быть > 0: {self.parameter}")


@dataclass(frozen=True)
class Refutation:
    """Опровержение: функция-свидетель, совпадающая со всеми ответами оракула"""
    queried_points: Tuple[Point, ...]
    witness_point: Point
    radius: float
    depth: float
    epsilon: float
    domain: BoxDomain
    # w <= 0 на всей области
    sign_convention: str = "nonpositive"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "queries": len(self.queried_points),
            "witness_point": list(self.witness_point.coords),
            "radius": self.radius,
            "depth": self.depth,
            "epsilon": self.epsilon,
            "domain": self.domain.to_dict(),
            "sign_convention": self.sign_convention,
        }


@dataclass(frozen=True)
class RefutationVerdict:
    """Вердикт опровержения решателя"""
    refutation: Refutation
    claimed_point: Point
    claimed_value: Fraction
    witness_minimum: float
    consistent: bool
    gap: float
    query_count: int

    @property
    def refuted(self) -> bool:
        return self.consistent and self.gap >= 2 * self.refutation.epsilon

    def to_dict(self) -> Dict[str, Any]:
        data = self.refutation.to_dict()
        data.update({
            "claimed_point": list(self.claimed_point.coords),
            "claimed_value": str(self.claimed_value),
            "witness_minimum": self.witness_minimum,
            "consistent": self.consistent,
            "gap": self.gap,
            "query_count": self.query_count,
            "verdict": "refuted" if self.refuted else "not refuted",
        })
        return data


@dataclass(frozen=True)
class RunSummary:
    """Итог одного запуска эксперимента (строка сводной таблицы)"""
    benchmark: str
    dim: int
    grid_mode: GridMode
    step_size: float
    basin_bound: float
    seed: int
    status: str = "ok"
    iterations: int = 0
    queries: int = 0
    start_f: float = math.nan
    final_f: float = math.nan
    gap: float = math.nan
    terminal_reason: Optional[TerminalReason] = None
    final_point: Optional[Point] = None
    trace_path: Optional[str] = None
    error: str = ""
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"
