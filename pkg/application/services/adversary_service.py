"""
Противник: оракул тождественного нуля и построение функции-свидетеля.

Любой решатель с конечным бюджетом видит только нули. По журналу его
запросов строится непрерывная функция w <= 0, равная нулю во всех
запрошенных точках, с глобальным минимумом -c <= -2ε. Решатель не может
отличить w от нуля, поэтому его ответ не является ε-оптимальным для w.
"""
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.spatial import cKDTree

from application.services.solvers import ISolver
from domain.entities import BoxDomain, Point, QueryKind, Refutation, RefutationVerdict
from domain.objectives import ZeroObjective
from infrastructure.exceptions import InvalidInputError, SaturationError
from infrastructure.oracle.session import OracleSession

logger = structlog.get_logger(__name__)

# c = 2ε + DEPTH_MARGIN * ε
DEPTH_MARGIN = 0.2
SATURATION_RATIO = 1e-9


def zero_oracle(
    domain: BoxDomain,
    max_queries: Optional[int] = None,
    precision_k: int = 12,
) -> OracleSession:
    """Сессия, отвечающая 0 на любой запрос значения или градиента"""
    return OracleSession(
        ZeroObjective(domain.dim),
        domain,
        default_precision_k=precision_k,
        max_queries=max_queries,
    )


def _candidate_pool(
    domain: BoxDomain, lattice_max: int, random_pool: int, seed: int
) -> np.ndarray:
    """Решётка с нечётным числом узлов по оси (центр области - узел) и случайные точки"""
    n = max(int(lattice_max ** (1.0 / domain.dim)), 1)
    while n ** domain.dim > lattice_max and n > 1:
        n -= 1
    if n % 2 == 0:
        n -= 1
    if n == 1:
        axis = np.array([domain.center()[0]])
    else:
        axis = domain.lo + domain.width * (np.arange(n) / (n - 1))
    mesh = np.meshgrid(*([axis] * domain.dim), indexing="ij")
    lattice = np.stack([g.ravel() for g in mesh], axis=1)
    rng = np.random.default_rng(seed)
    extra = rng.uniform(domain.lo, domain.hi, size=(random_pool, domain.dim))
    return np.vstack([lattice, extra])


def construct_witness(
    queried: Union[Sequence[Point], np.ndarray],
    domain: BoxDomain,
    eps: float,
    lattice_max: int = 100_000,
    random_pool: int = 10_000,
    seed: int = 0,
) -> Refutation:
    """
    Свидетель: точка пула, максимально удалённая от запрошенных точек.

    Args:
        queried: Запрошенные точки (возможно, пустой набор)
        domain: Область
        eps: Точность ε
        lattice_max: Наибольший размер решётки кандидатов
        random_pool: Число случайных кандидатов
        seed: Зерно случайных кандидатов

    Returns:
        Refutation с радиусом ρ = maximin / 2 и глубиной c = 2ε + ε/5
    """
    if not eps > 0:
        raise InvalidInputError(f"ε должно быть положительным: {eps}")
    if isinstance(queried, np.ndarray):
        arr = queried.reshape(-1, domain.dim) if queried.size else np.empty((0, domain.dim))
    else:
        arr = np.array([Point.of(p).coords for p in queried], dtype=np.float64).reshape(-1, domain.dim)
    pool = _candidate_pool(domain, lattice_max, random_pool, seed)

    if arr.shape[0] == 0:
        center = domain.center().as_array()
        idx = int(np.argmin(np.linalg.norm(pool - center, axis=1)))
        radius = domain.width / 4
    else:
        distances, _ = cKDTree(arr).query(pool)
        idx = int(np.argmax(distances))
        maximin = float(distances[idx])
        if maximin < SATURATION_RATIO * domain.width:
            raise SaturationError(
                f"Наибольшее расстояние до запросов {maximin:.3g} меньше разрешения: "
                f"для опровержения нужен незапрошенный промежуток"
            )
        radius = maximin / 2

    refutation = Refutation(
        queried_points=tuple(Point.of(p) for p in arr),
        witness_point=Point.of(pool[idx]),
        radius=radius,
        depth=(2 + DEPTH_MARGIN) * eps,
        epsilon=eps,
        domain=domain,
    )
    logger.debug("Свидетель построен", queries=arr.shape[0], radius=radius)
    return refutation


def _witness_values(r: Refutation, points: np.ndarray) -> np.ndarray:
    dist = np.linalg.norm(points - r.witness_point.as_array(), axis=1)
    return np.where(dist >= r.radius, 0.0, -r.depth * (1 - dist / r.radius))


def _witness_gradient(r: Refutation, point: np.ndarray) -> Tuple[float, ...]:
    diff = point - r.witness_point.as_array()
    dist = float(np.linalg.norm(diff))
    if dist >= r.radius or dist == 0:
        return (0.0,) * point.shape[0]
    return tuple(float(g) for g in (r.depth / r.radius) * diff / dist)


def witness_eval(r: Refutation, x: Point) -> float:
    """w(x) = -c * max(0, 1 - ||x - witness|| / ρ)"""
    x = Point.of(x)
    r.domain.require(x)
    return float(_witness_values(r, x.as_array()[None, :])[0])


def witness_gradient(r: Refutation, x: Point) -> Tuple[float, ...]:
    """Градиент w (ноль вне носителя и в вершине конуса)"""
    x = Point.of(x)
    r.domain.require(x)
    return _witness_gradient(r, x.as_array())


def witness_samples(r: Refutation, n: int, seed: int = 0) -> np.ndarray:
    """
    Выборка значений свидетеля для построения графика: половина точек
    равномерно по области, половина в носителе. Столбцы x_1..x_d, w.
    """
    rng = np.random.default_rng(seed)
    dim = r.domain.dim
    uniform = rng.uniform(r.domain.lo, r.domain.hi, size=(n - n // 2, dim))
    near = r.witness_point.as_array() + rng.uniform(-r.radius, r.radius, size=(n // 2, dim))
    points = r.domain.clip(np.vstack([uniform, near]))
    return np.column_stack([points, _witness_values(r, points)])


def _agrees(r: Refutation, session: OracleSession) -> bool:
    """Свидетель совпадает с каждым ответом журнала (точное сравнение)"""
    points = session.queried_points()
    values = _witness_values(r, points)
    for record, point, w in zip(session.export_log(), points, values):
        if record.kind == QueryKind.VALUE:
            if Fraction(float(w)) != record.response:
                return False
        elif tuple(Fraction(g) for g in _witness_gradient(r, point)) != record.response:
            return False
    return True


def refute(
    solver: ISolver,
    domain: BoxDomain,
    budget: int,
    eps: float,
    lattice_max: int = 100_000,
    random_pool: int = 10_000,
    seed: int = 0,
) -> RefutationVerdict:
    """
    Запустить решатель против оракула нуля и опровергнуть его ответ.

    Args:
        solver: Решатель-чёрный ящик
        domain: Область
        budget: Бюджет запросов (превышение - QueryBudgetExceeded)
        eps: Точность ε

    Returns:
        RefutationVerdict: refuted истинно, если свидетель согласован с журналом
        и заявленное значение выше минимума свидетеля не менее чем на 2ε
    """
    if budget < 1:
        raise InvalidInputError(f"Бюджет должен быть положительным: {budget}")
    session = zero_oracle(domain, max_queries=budget)
    claimed = Point.of(solver.solve(session, domain, budget))
    domain.require(claimed)

    queried = session.queried_points()
    refutation = construct_witness(
        np.vstack([queried, claimed.as_array()[None, :]]),
        domain,
        eps,
        lattice_max=lattice_max,
        random_pool=random_pool,
        seed=seed,
    )

    # заявленное значение - ответ оракула нуля, запрошенный вне бюджета решателя
    claimed_value = zero_oracle(domain).query_value(claimed)
    witness_minimum = witness_eval(refutation, refutation.witness_point)
    consistent = _agrees(refutation, session) and Fraction(
        witness_eval(refutation, claimed)
    ) == claimed_value

    verdict = RefutationVerdict(
        refutation=refutation,
        claimed_point=claimed,
        claimed_value=claimed_value,
        witness_minimum=witness_minimum,
        consistent=consistent,
        gap=float(claimed_value) - witness_minimum,
        query_count=session.query_count,
    )
    logger.info(
        "Опровержение решателя",
        solver=solver.name,
        queries=verdict.query_count,
        radius=refutation.radius,
        refuted=verdict.refuted,
    )
    return verdict
