"""
Конечная точность: десятичное разложение r_0.r_1...r_k, скобки и их векторизованный вариант
"""
import math
from decimal import Decimal
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from domain.entities import FixedDecimal, Interval, Point
from infrastructure.exceptions import InvalidInputError

Real = Union[int, float, Fraction, Decimal]

# Константа Деккера для разбиения float64 на две половины по 26 бит
_SPLITTER = 134217729.0
_INT64_LIMIT = 2.0 ** 62


def _as_fraction(x: Real) -> Fraction:
    if isinstance(x, float) and not math.isfinite(x):
        raise InvalidInputError(f"Ожидалось конечное число, получено {x}")
    if isinstance(x, Decimal) and not x.is_finite():
        raise InvalidInputError(f"Ожидалось конечное число, получено {x}")
    if isinstance(x, (np.floating, np.integer)):
        return _as_fraction(x.item())
    return Fraction(x)


def from_numerator(numerator: int, k: int) -> FixedDecimal:
    """Построить разложение по целому N = floor(x * 10^k)"""
    scale = 10 ** k
    integer_part, rest = divmod(int(numerator), scale)
    digits = tuple(int(c) for c in str(rest).zfill(k)) if k else ()
    return FixedDecimal(integer_part=integer_part, digits=digits, precision_k=k)


def numerator(fd: FixedDecimal) -> int:
    """N такое, что value(fd) = N / 10^k"""
    rest = int("".join(str(d) for d in fd.digits)) if fd.digits else 0
    return fd.integer_part * 10 ** fd.precision_k + rest


def fixed_expand(x: Real, k: int) -> FixedDecimal:
    """
    Разложение точности k: r_0 - наибольшее целое <= x, далее r_i - наибольшая цифра,
    при которой частичная сумма не превосходит x.

    Args:
        x: Конечное вещественное (float, int, Fraction, Decimal)
        k: Число десятичных знаков (k >= 0)

    Returns:
        FixedDecimal с value(result) <= x < value(result) + 10^-k
    """
    if k < 0:
        raise InvalidInputError(f"Точность должна быть неотрицательной: {k}")
    q = _as_fraction(x)
    return from_numerator(math.floor(q * 10 ** k), k)


def value(fd: FixedDecimal) -> Fraction:
    """Точное рациональное значение r_0 + sum r_i / 10^i"""
    return Fraction(numerator(fd), 10 ** fd.precision_k)


def bracket(fd: FixedDecimal) -> Interval:
    """Скобка всех вещественных с тем же префиксом: дополнение нулями и девятками"""
    lower = value(fd)
    return Interval(lower=lower, upper=lower + Fraction(1, 10 ** fd.precision_k))


def canonical(fd: FixedDecimal) -> str:
    return str(fd)


def parse_fixed(text: str) -> FixedDecimal:
    """Обратное к canonical: "r0.d1d2...dk" (r0 может быть отрицательным)"""
    text = text.strip()
    head, _, tail = text.partition(".")
    try:
        integer_part = int(head)
    except ValueError as e:
        raise InvalidInputError(f"Некорректная запись разложения: {text!r}") from e
    if tail and not tail.isdigit():
        raise InvalidInputError(f"Некорректные цифры разложения: {text!r}")
    return FixedDecimal(integer_part, tuple(int(c) for c in tail), len(tail))


def expand_point(p: Point, k: int) -> Tuple[FixedDecimal, ...]:
    """Покоординатное разложение точки"""
    return tuple(fixed_expand(c, k) for c in p.coords)


def precision_point(p: Point, delta: float) -> Tuple[Tuple[FixedDecimal, ...], int]:
    """
    Точка конечной точности на расстоянии < delta от p.
    Выбирается наименьшее k с sqrt(d) * 10^-k < delta.
    """
    if not delta > 0:
        raise InvalidInputError(f"delta должно быть положительным: {delta}")
    k = 0
    while math.sqrt(p.dim) * 10.0 ** (-k) >= delta:
        k += 1
    return expand_point(p, k), k


def _split(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_product(a: np.ndarray, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Точное произведение a*b = p + err (алгоритм Деккера)"""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(np.full_like(a, b))
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def floor_scaled(values: np.ndarray, k: int) -> np.ndarray:
    """
    Векторизованный точный floor(v * 10^k) для массива float64.

    Возвращает int64, либо object-массив с целыми Python, если |v * 10^k| >= 2^62.
    Поправка Деккера считается только там, где v * 10^k округлилось до целого.
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("Значения должны быть конечными")
    if not 0 <= k <= 22:
        raise InvalidInputError(f"Точность вне диапазона 0..22: {k}")
    scale = 10.0 ** k
    p = v * scale
    fl = np.floor(p)
    big = np.abs(fl) >= _INT64_LIMIT
    has_big = bool(big.any())
    out = (np.where(big, 0.0, fl) if has_big else fl).astype(np.int64)

    on_integer = fl == p
    if has_big:
        on_integer &= ~big
    if on_integer.any():
        # точный остаток v * 10^k - p решает, нужен ли сдвиг вниз
        _, err = _two_product(v[on_integer], scale)
        out[on_integer] += np.floor(err).astype(np.int64)
    if not has_big:
        return out

    out = out.astype(object)
    for idx in zip(*np.nonzero(big)):
        out[idx] = math.floor(Fraction(float(v[idx])) * 10 ** k)
    return out


def scaled_to_float(numerators: np.ndarray, k: int) -> np.ndarray:
    """N / 10^k как float64 (корректное округление для |N| < 2^53)"""
    if numerators.dtype == object:
        return np.array(
            [float(Fraction(int(n), 10 ** k)) for n in numerators.ravel()], dtype=np.float64
        ).reshape(numerators.shape)
    return numerators.astype(np.float64) / 10.0 ** k
