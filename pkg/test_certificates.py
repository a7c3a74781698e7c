"""
Тесты сертификатов Липшица и бассейна, поиска по решётке Липшица
"""
import math

import numpy as np
import pytest

from application.services.certificate_service import (
    basin_certificate_check,
    lattice_spacing,
    lipschitz_grid_minimize,
    lipschitz_holds,
    lipschitz_sample_check,
    predicted_lattice_size,
)
from domain.entities import BoxDomain, Certificate, CertificateKind, Point
from domain.objectives import BenchmarkObjective, CallableObjective
from infrastructure.benchmarks.factory import BenchmarkFactory, value_lipschitz_bound
from infrastructure.exceptions import GridBudgetError, InvalidInputError
from infrastructure.oracle.session import OracleSession


def test_lipschitz_predicate():
    assert lipschitz_holds(1, Point((0.0,)), Point((1.0,)), 0, 0.5)
    assert not lipschitz_holds(1, Point((0.0,)), Point((1.0,)), 0, 2)


def test_lipschitz_predicate_is_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x, y = Point(tuple(rng.uniform(-1, 1, 2))), Point(tuple(rng.uniform(-1, 1, 2)))
        fx, fy = rng.normal(size=2)
        assert lipschitz_holds(1.5, x, y, fx, fy) == lipschitz_holds(1.5, y, x, fy, fx)


def test_lipschitz_predicate_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        lipschitz_holds(1, Point((0.0,)), Point((0.0, 1.0)), 0, 0)


def test_sphere_lipschitz_sampled():
    b = BenchmarkFactory.create("sphere", 2)
    assert lipschitz_sample_check(b, value_lipschitz_bound(b), 10_000)
    assert not lipschitz_sample_check(b, 0.1, 1000)


def test_certificate_parameter_must_be_positive():
    assert Certificate(CertificateKind.BASIN, 0.5).parameter == 0.5
    with pytest.raises(InvalidInputError):
        Certificate(CertificateKind.LIPSCHITZ, 0.0)


def _abs_session(center, lo=0.0, hi=1.0):
    f = CallableObjective(1, lambda p: np.abs(p[:, 0] - center))
    return OracleSession(f, BoxDomain(lo, hi, 1))


def test_lattice_spacing_and_size():
    dom = BoxDomain(0, 1, 1)
    assert lattice_spacing(1, 1.0, 0.1) == pytest.approx(0.2)
    assert predicted_lattice_size(dom, 1.0, 0.1) == 6


def test_abs_function_grid_minimum():
    session = _abs_session(0.3)
    dom = BoxDomain(0, 1, 1)
    _, value = lipschitz_grid_minimize(session, dom, 1.0, 0.1)
    assert value <= 0.1
    assert session.query_count == predicted_lattice_size(dom, 1.0, 0.1)


def test_constant_function():
    f = CallableObjective(2, lambda p: np.full(p.shape[0], 3.5))
    session = OracleSession(f, BoxDomain(-1, 1, 2))
    point, value = lipschitz_grid_minimize(session, BoxDomain(-1, 1, 2), 5.0, 0.5)
    assert value == 3.5
    assert BoxDomain(-1, 1, 2).contains(point)


def _brute_force_min(fn, dom, delta):
    per_axis = int(math.ceil(dom.width / (delta / 10))) + 1
    axis = np.linspace(dom.lo, dom.hi, per_axis)
    mesh = np.meshgrid(*([axis] * dom.dim), indexing="ij")
    return float(np.min(fn(np.stack([g.ravel() for g in mesh], axis=1))))


@pytest.mark.parametrize(
    "fn,dom,L,eps",
    [
        (lambda p: np.abs(p[:, 0] - 0.3), BoxDomain(0, 1, 1), 1.0, 0.1),
        (lambda p: np.sin(5 * p[:, 0]) + 0.5 * p[:, 0], BoxDomain(-2, 2, 1), 5.5, 0.05),
        (lambda p: np.linalg.norm(p - np.array([0.37, -0.61]), axis=1), BoxDomain(-1, 1, 2), 1.0, 0.05),
    ],
)
def test_grid_minimum_within_eps_of_finer_brute_force(fn, dom, L, eps):
    session = OracleSession(CallableObjective(dom.dim, fn), dom)
    _, value = lipschitz_grid_minimize(session, dom, L, eps)
    reference = _brute_force_min(fn, dom, lattice_spacing(dom.dim, L, eps))
    assert value <= reference + eps
    assert session.query_count == predicted_lattice_size(dom, L, eps)


def test_grid_budget_reports_required_count():
    b = BenchmarkFactory.create("booth", 2)
    session = OracleSession(BenchmarkObjective(b), b.domain)
    L = value_lipschitz_bound(b)
    with pytest.raises(GridBudgetError) as e:
        lipschitz_grid_minimize(session, b.domain, L, 1.0, budget=1000)
    assert e.value.required == predicted_lattice_size(b.domain, L, 1.0)
    assert session.query_count == 0


@pytest.mark.slow
def test_booth_certified_search():
    b = BenchmarkFactory.create("booth", 2)
    session = OracleSession(BenchmarkObjective(b), b.domain, retain_log=False)
    L = value_lipschitz_bound(b)
    expected = predicted_lattice_size(b.domain, L, 1.0)
    _, value = lipschitz_grid_minimize(session, b.domain, L, 1.0, budget=expected)
    assert value <= 1.0
    assert session.query_count == expected


def test_basin_check_sphere():
    b = BenchmarkFactory.create("sphere", 2)
    report = basin_certificate_check(b, 0.3, 10_000)
    assert report
    assert report.checked == 10_000


def test_basin_check_rastrigin_table_value():
    b = BenchmarkFactory.create("rastrigin", 2)
    assert basin_certificate_check(b, 0.5, 10_000)


def test_basin_check_rastrigin_oversized_cube_fails():
    b = BenchmarkFactory.create("rastrigin", 2)
    report = basin_certificate_check(b, 2.0, 10_000)
    assert not report
    assert report.first_violation is not None


def test_basin_check_rastrigin_1d_stationary_points_inside_cube():
    b = BenchmarkFactory.create("rastrigin", 1)
    # сторона 1.0 покрывает стационарные точки около ±0.4975
    assert not basin_certificate_check(b, 1.0, 5000)


def test_basin_check_finds_stationary_points_near_cube_boundary():
    b = BenchmarkFactory.create("rastrigin", 2)
    # точки около минимума имеют наименьший |grad f|, но стационарные точки у края куба
    report = basin_certificate_check(b, 1.0, 2000, seed=7)
    assert not report
    assert "стационарная точка" in report.detail


def test_basin_check_rejects_oversized_cube():
    b = BenchmarkFactory.create("booth", 2)
    with pytest.raises(InvalidInputError):
        basin_certificate_check(b, 25.0, 100)
