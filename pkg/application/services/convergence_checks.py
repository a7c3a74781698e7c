"""
Исполняемые проверки трассы: неравенство спуска, оценка скорости O(1/k),
монотонность фазы решётки и замкнутость области.

Проверки никогда не бросают исключений, результат - CheckReport.
"""
from typing import Optional

import numpy as np

from domain.entities import BoxDomain, CheckReport, Point, RunTrace

DEFAULT_TOLERANCE = 1e-9


def _fail(checked: int, k: int, detail: str) -> CheckReport:
    return CheckReport(passed=False, checked=checked, first_violation=k, detail=detail)


def descent_check(
    trace: RunTrace, t: float, lipschitz: float, tolerance: float = DEFAULT_TOLERANCE
) -> CheckReport:
    """
    f(x_k) <= f(z_k) - (t/2) * ||grad f(z_k)||^2 на каждом шаге спуска.

    Неравенство гарантировано только при t <= 1/L, при нарушении
    предусловия отчёт сообщает об этом без проверки записей.
    """
    if not lipschitz > 0 or t * lipschitz > 1 + tolerance:
        return CheckReport(
            passed=False, checked=0, detail=f"предусловие t <= 1/L нарушено: t={t}, L={lipschitz}"
        )
    for i, r in enumerate(trace.records):
        bound = r.f_z - 0.5 * t * r.grad_norm ** 2
        if r.f_x > bound + tolerance:
            return _fail(i + 1, r.k, f"k={r.k}: f(x)={r.f_x:.12g} > {bound:.12g}")
    return CheckReport(passed=True, checked=len(trace.records))


def rate_bound_check(
    trace: RunTrace,
    t: float,
    start_index: int,
    minimizer: Point,
    min_value: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CheckReport:
    """
    f(x_k) - f* <= ||x_M - x*||^2 / (2t(k - M)) для всех записанных k > M.

    Args:
        trace: Трасса запуска
        t: Шаг спуска
        start_index: Индекс M, начиная с которого итерации лежат в области выпуклости
        minimizer: Глобальный минимум x*
        min_value: f(x*)
    """
    if not 0 <= start_index < len(trace.records):
        return CheckReport(passed=False, checked=0, detail=f"M={start_index} вне трассы")
    x_m = trace.records[start_index].x
    radius_sq = float(np.sum((x_m.as_array() - minimizer.as_array()) ** 2))
    checked = 0
    for r in trace.records:
        if r.k <= start_index:
            continue
        checked += 1
        bound = radius_sq / (2 * t * (r.k - start_index))
        if r.f_x - min_value > bound + tolerance:
            return _fail(checked, r.k, f"k={r.k}: f-f*={r.f_x - min_value:.12g} > {bound:.12g}")
    return CheckReport(passed=True, checked=checked)


def monotone_check(trace: RunTrace, tolerance: float = 0.0) -> CheckReport:
    """f(z_k) <= f(x_{k-1}): решётка проходит через предыдущую итерацию"""
    records = trace.records
    for prev, cur in zip(records, records[1:]):
        if cur.f_z > prev.f_x + tolerance:
            return _fail(cur.k, cur.k, f"k={cur.k}: f(z)={cur.f_z:.12g} > f(x_prev)={prev.f_x:.12g}")
    return CheckReport(passed=True, checked=max(len(records) - 1, 0))


def domain_closure_check(trace: RunTrace, domain: BoxDomain) -> CheckReport:
    """Все точки трассы (z_k и x_k) лежат в области"""
    for i, r in enumerate(trace.records):
        bad: Optional[str] = None
        if not domain.contains(r.z):
            bad = "z"
        elif not domain.contains(r.x):
            bad = "x"
        if bad:
            return _fail(i + 1, r.k, f"k={r.k}: {bad} вне области")
    return CheckReport(passed=True, checked=len(trace.records))
