"""
Фабрика тестовых функций (Factory Pattern): реестр, области, минимумы и параметры запуска
"""
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog

from domain.entities import Benchmark, BoxDomain, Point, RunParams
from infrastructure.benchmarks import functions as fn
from infrastructure.exceptions import BenchmarkLookupError, InvalidInputError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class BenchmarkSpec:
    """Описание функции в реестре"""
    name: str
    value_fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    minimizer_coord: float
    min_dim: int
    fixed_dim: Optional[int]
    params: RunParams
    # Для Sphere и Rosenbrock область R^n заменена стандартным кубом
    clipped_domain: bool = False
    minimizer_2d: Optional[Tuple[float, float]] = None

    def dim_constraint(self) -> str:
        if self.fixed_dim is not None:
            return f"d={self.fixed_dim}"
        return f"d>={self.min_dim}"


_REGISTRY: Dict[str, BenchmarkSpec] = {
    "rastrigin": BenchmarkSpec(
        "rastrigin", fn.rastrigin, fn.rastrigin_grad, -5.12, 5.12, 0.0, 1, None,
        RunParams(step_size=0.0001, basin_bound=0.5),
    ),
    "ackley": BenchmarkSpec(
        "ackley", fn.ackley, fn.ackley_grad, -5.0, 5.0, 0.0, 2, 2,
        RunParams(step_size=0.0001, basin_bound=0.1),
    ),
    "sphere": BenchmarkSpec(
        "sphere", fn.sphere, fn.sphere_grad, -5.12, 5.12, 0.0, 1, None,
        RunParams(step_size=0.001, basin_bound=0.3), clipped_domain=True,
    ),
    "rosenbrock": BenchmarkSpec(
        "rosenbrock", fn.rosenbrock, fn.rosenbrock_grad, -2.048, 2.048, 1.0, 2, None,
        RunParams(step_size=0.001, basin_bound=0.5), clipped_domain=True,
    ),
    "beale": BenchmarkSpec(
        "beale", fn.beale, fn.beale_grad, -4.5, 4.5, 0.0, 2, 2,
        RunParams(step_size=0.0005, basin_bound=0.3), minimizer_2d=(3.0, 0.5),
    ),
    "booth": BenchmarkSpec(
        "booth", fn.booth, fn.booth_grad, -10.0, 10.0, 0.0, 2, 2,
        RunParams(step_size=0.005, basin_bound=0.3), minimizer_2d=(1.0, 3.0),
    ),
}

_GRADIENT_LIPSCHITZ: Dict[str, Callable[[int], float]] = {
    "sphere": lambda dim: 2.0,
    "booth": lambda dim: float(np.max(np.linalg.eigvalsh(fn.BOOTH_HESSIAN))),
}


class BenchmarkFactory:
    """Фабрика для получения тестовых функций по имени"""

    @staticmethod
    def names() -> List[str]:
        return list(_REGISTRY)

    @staticmethod
    def spec(name: str) -> BenchmarkSpec:
        try:
            return _REGISTRY[name.lower()]
        except KeyError:
            raise BenchmarkLookupError(
                f"Неизвестная функция: {name}. Доступны: {', '.join(_REGISTRY)}"
            ) from None

    @staticmethod
    def create(name: str, dim: int) -> Benchmark:
        """
        Создать тестовую функцию

        Args:
            name: Имя функции (rastrigin, ackley, sphere, rosenbrock, beale, booth)
            dim: Размерность

        Returns:
            Экземпляр Benchmark
        """
        spec = BenchmarkFactory.spec(name)
        if dim < spec.min_dim or (spec.fixed_dim is not None and dim != spec.fixed_dim):
            raise BenchmarkLookupError(
                f"Недопустимая размерность {dim} для {spec.name} ({spec.dim_constraint()})"
            )
        if spec.minimizer_2d is not None:
            minimizer = Point(spec.minimizer_2d)
        else:
            minimizer = Point((spec.minimizer_coord,) * dim)
        lipschitz = _GRADIENT_LIPSCHITZ.get(spec.name)
        return Benchmark(
            name=spec.name,
            dim=dim,
            domain=BoxDomain(spec.lo, spec.hi, dim),
            minimizer=minimizer,
            min_value=0.0,
            value_fn=spec.value_fn,
            grad_fn=spec.grad_fn,
            gradient_lipschitz=lipschitz(dim) if lipschitz else None,
        )

    @staticmethod
    def lookup(name: str, dim: int) -> Tuple[Benchmark, RunParams]:
        """Функция и её параметры запуска (шаг t, граница бассейна m)"""
        benchmark = BenchmarkFactory.create(name, dim)
        params = BenchmarkFactory.spec(name).params.validate(benchmark.domain)
        logger.debug("Тестовая функция получена", benchmark=benchmark.name, dim=dim)
        return benchmark, params

    @staticmethod
    def describe() -> List[Dict[str, Union[str, float]]]:
        """Строки для вывода реестра: имя, ограничения размерности, область, параметры"""
        rows = []
        for spec in _REGISTRY.values():
            rows.append({
                "name": spec.name,
                "dim": spec.dim_constraint(),
                "domain": f"[{spec.lo}, {spec.hi}]^d" + (" (clipped)" if spec.clipped_domain else ""),
                "step_size": spec.params.step_size,
                "basin_bound": spec.params.basin_bound,
            })
        return rows


def _as_batch(b: Benchmark, x) -> Tuple[np.ndarray, bool]:
    if isinstance(x, Point):
        arr = x.as_array()
    else:
        arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != b.dim:
        raise InvalidInputError(
            f"{b.name}: ожидалась размерность {b.dim}, получено {arr.shape[1]}"
        )
    return arr, single


def evaluate(b: Benchmark, x) -> Union[float, np.ndarray]:
    """Значение замкнутой формы в точке (или массиве точек)"""
    arr, single = _as_batch(b, x)
    out = b.value_fn(arr)
    return float(out[0]) if single else out


def gradient(b: Benchmark, x) -> np.ndarray:
    """Аналитический градиент в точке (или массиве точек)"""
    arr, single = _as_batch(b, x)
    out = b.grad_fn(arr)
    return out[0] if single else out


def value_lipschitz_bound(b: Benchmark) -> float:
    """
    sup ||grad f|| на области для выпуклых квадратичных функций (Sphere, Booth):
    максимум нормы аффинного градиента достигается в вершине куба.
    """
    if b.name not in _GRADIENT_LIPSCHITZ:
        raise BenchmarkLookupError(f"Оценка Липшица для {b.name} неизвестна")
    if b.dim > 16:
        raise InvalidInputError("Перебор вершин куба допустим только при d <= 16")
    corners = np.array(list(itertools.product((b.domain.lo, b.domain.hi), repeat=b.dim)))
    return float(np.max(np.linalg.norm(b.grad_fn(corners), axis=1)))
