"""
Тесты обвязки экспериментов: конфигурация, трассы, сводная таблица,
графики, контейнер зависимостей и командная строка
"""
import csv
import re
import time

import pytest

import cli
from application.services import experiment_service
from application.services.experiment_service import (
    ExperimentConfig,
    ExperimentService,
    StartMode,
    load_config_file,
)
from config.settings import Settings
from domain.entities import GridMode, Point
from infrastructure.di.container import DIContainer, get_container
from infrastructure.exceptions import InvalidInputError, ReportIOError, TraceParseError
from infrastructure.reporting.plotter import LINE_GID, render_plot
from infrastructure.reporting.summary import SUMMARY_HEADER
from infrastructure.reporting.trace_csv import fmt, read_trace, trace_header


@pytest.fixture
def settings(tmp_path):
    return Settings(output_dir=str(tmp_path / "results"), workers=1)


@pytest.fixture
def service(settings):
    return ExperimentService(settings)


@pytest.fixture
def container(settings):
    DIContainer.reset()
    instance = DIContainer(settings)
    yield instance
    DIContainer.reset()


def _write_trace_file(path, f_values, dim=2):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(trace_header(dim))
        for k, v in enumerate(f_values):
            writer.writerow([k, fmt(v), fmt(v), fmt(0.5), 10 * (k + 1)] + [fmt(0.1)] * dim)
    return path


# --- конфигурация ---

def test_config_normalises_function_name():
    cfg = ExperimentConfig.build(function=" Booth ")
    assert cfg.function == "booth"
    assert cfg.dim == 2
    assert cfg.start == StartMode.CORNER


@pytest.mark.parametrize(
    "values",
    [
        {"function": "himmelblau"},
        {"function": "booth", "dim": 0},
        {"function": "booth", "step_size": -1.0},
        {"function": "booth", "unknown_key": 1},
        {"function": "booth", "start": "point"},
        {"function": "booth", "start": "point", "start_point": "1.0"},
    ],
)
def test_config_rejects_invalid_values(values):
    with pytest.raises(InvalidInputError):
        ExperimentConfig.build(**values)


def test_config_parses_start_point():
    cfg = ExperimentConfig.build(function="booth", start="point", start_point="1.5, -2")
    assert cfg.start_point == [1.5, -2.0]


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# пример\nfunction = booth\n\nmax-iters = 10\ngrid_mode = full\n", encoding="utf-8")
    values = load_config_file(path)
    assert values == {"function": "booth", "max_iters": "10", "grid_mode": "full"}
    cfg = ExperimentConfig.build(**values)
    assert cfg.max_iters == 10
    assert cfg.grid_mode == GridMode.FULL


def test_load_config_file_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("function booth\n", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_config_file(path)
    with pytest.raises(ReportIOError):
        load_config_file(tmp_path / "missing.cfg")


def test_resolve_uses_parameter_table_and_settings(service):
    benchmark, algo, anchor = service.resolve(ExperimentConfig.build(function="beale"))
    assert (algo.step_size, algo.basin_bound) == (0.0005, 0.3)
    assert algo.grid_mode == GridMode.FULL
    assert algo.max_iters == 30_000
    assert anchor == benchmark.domain.lower_corner()


def test_resolve_high_dimension_defaults_to_sampled(service):
    _, algo, _ = service.resolve(ExperimentConfig.build(function="sphere", dim=20))
    assert algo.grid_mode == GridMode.SAMPLED
    assert algo.n_samples == 256
    assert algo.max_iters == 50_000


def test_resolve_start_modes(service):
    _, _, anchor = service.resolve(
        ExperimentConfig.build(function="booth", start="point", start_point=[1.0, 2.0])
    )
    assert anchor == Point((1.0, 2.0))
    _, _, a1 = service.resolve(ExperimentConfig.build(function="booth", start="random", seed=5))
    _, _, a2 = service.resolve(ExperimentConfig.build(function="booth", start="random", seed=5))
    assert a1 == a2


# --- трасса ---

def test_trace_round_trip_through_run(service, tmp_path):
    cfg = ExperimentConfig.build(function="sphere", max_iters=5, out_dir=str(tmp_path))
    summary = service.run_experiment(cfg)
    rows = read_trace(summary.trace_path)
    assert len(rows) == summary.iterations == 6
    assert [r.k for r in rows] == list(range(6))
    assert rows[-1].queries_cum == summary.queries
    assert rows[-1].f_x == pytest.approx(summary.final_f, rel=1e-11)


def test_read_trace_reports_line_numbers(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [3.0, 2.0])
    with open(path, "a") as f:
        f.write("2,abc,1,1,30,0.1,0.1\n")
    with pytest.raises(TraceParseError) as e:
        read_trace(path)
    assert e.value.line == 4


def test_read_trace_rejects_bad_header(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("iter,f_x\n0,1\n", encoding="utf-8")
    with pytest.raises(TraceParseError) as e:
        read_trace(path)
    assert e.value.line == 1


def test_read_trace_rejects_ragged_row(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [1.0])
    with open(path, "a") as f:
        f.write("1,1,1,1,20,0.1\n")
    with pytest.raises(TraceParseError) as e:
        read_trace(path)
    assert e.value.line == 3


def test_read_trace_missing_file(tmp_path):
    with pytest.raises(ReportIOError):
        read_trace(tmp_path / "absent.csv")


# --- графики ---

def test_plot_contains_every_iteration(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [1.0 / (k + 1) for k in range(100)])
    svg_path = render_plot(path)
    assert svg_path == tmp_path / "t.svg"
    svg = svg_path.read_text(encoding="utf-8")
    group = svg.split(f'id="{LINE_GID}"', 1)[1]
    d = re.search(r'd="([^"]+)"', group).group(1)
    assert d.count("M") == 1
    assert d.count("L") == 99


def test_plot_with_nonpositive_values(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [1.0, 0.5, 0.0, -0.25])
    out = render_plot(path, tmp_path / "plots" / "linear.svg", title="linear")
    assert out.exists()


def test_plot_of_empty_trace(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [])
    with pytest.raises(TraceParseError):
        render_plot(path)
    assert not (tmp_path / "t.svg").exists()


def test_plot_is_deterministic(tmp_path):
    path = _write_trace_file(tmp_path / "t.csv", [5.0, 3.0, 1.0])
    first = render_plot(path, tmp_path / "a.svg").read_bytes()
    second = render_plot(path, tmp_path / "b.svg").read_bytes()
    assert first == second


# --- запуски ---

def test_zero_iterations_gives_single_row(service, tmp_path):
    cfg = ExperimentConfig.build(function="booth", max_iters=0, out_dir=str(tmp_path))
    summary = service.run_experiment(cfg)
    assert summary.iterations == 1
    assert len(read_trace(summary.trace_path)) == 1


def test_summary_gap_matches_trace(service, tmp_path):
    cfg = ExperimentConfig.build(function="sphere", max_iters=20, out_dir=str(tmp_path))
    summary = service.run_experiment(cfg)
    last = read_trace(summary.trace_path)[-1]
    assert summary.gap == summary.final_f - 0.0
    assert summary.gap == pytest.approx(last.f_x, rel=1e-11)
    assert summary.final_point.coords == pytest.approx(last.x, rel=1e-11)


def test_runs_are_byte_identical(service, tmp_path):
    paths = []
    for name in ("a", "b"):
        cfg = ExperimentConfig.build(
            function="rastrigin", max_iters=30, start="random", seed=3,
            out_dir=str(tmp_path / name), query_log=True, plot=True,
        )
        paths.append(service.run_experiment(cfg).trace_path)
    a, b = (open(p, "rb").read() for p in paths)
    assert a == b
    assert (tmp_path / "a" / "rastrigin_d2_full_s3_queries.csv").exists()
    svg_a = (tmp_path / "a" / "rastrigin_d2_full_s3.svg").read_bytes()
    assert svg_a == (tmp_path / "b" / "rastrigin_d2_full_s3.svg").read_bytes()


def test_run_safely_turns_errors_into_rows(service, tmp_path):
    cfg = ExperimentConfig.build(function="booth", grid_budget=10, max_iters=1, out_dir=str(tmp_path))
    row = service.run_safely(cfg)
    assert row.status == "error"
    assert "GridBudgetError" in row.error
    assert not (tmp_path / "booth_d2_full_s0.csv").exists()


def test_reproduce_all_with_failing_runs(service, tmp_path):
    rows = service.reproduce_all(out_dir=tmp_path, workers=1, grid_budget=1, max_iters=1)
    assert len(rows) == 9
    assert all(r.status == "error" for r in rows)
    with open(tmp_path / "summary.csv", newline="") as f:
        table = list(csv.reader(f))
    assert table[0] == SUMMARY_HEADER
    assert [r[0] for r in table[1:]] == [
        "rastrigin", "ackley", "sphere", "rosenbrock", "beale", "booth",
        "rastrigin", "sphere", "rosenbrock",
    ]
    assert {r[1] for r in table[7:]} == {"20"}


def test_unexpected_failure_does_not_stop_the_sweep(service, tmp_path, monkeypatch):
    real_minimize = experiment_service.minimize

    def flaky_minimize(session, domain, config, anchor=None):
        if session.dim == 2 and domain.hi == 4.5:
            raise RuntimeError("сбой вычисления")
        return real_minimize(session, domain, config, anchor)

    monkeypatch.setattr(experiment_service, "minimize", flaky_minimize)
    rows = service.reproduce_all(out_dir=tmp_path, workers=1, max_iters=2)
    assert len(rows) == 9
    failed = [r for r in rows if not r.ok]
    assert [r.benchmark for r in failed] == ["beale"]
    assert failed[0].error == "RuntimeError: сбой вычисления"
    assert sum(r.ok for r in rows) == 8


def test_reproduce_all_short_runs(service, tmp_path):
    rows = service.reproduce_all(out_dir=tmp_path, workers=1, max_iters=2)
    assert all(r.ok for r in rows)
    assert [r.grid_mode for r in rows[6:]] == [GridMode.SAMPLED] * 3
    assert (tmp_path / "summary.csv").exists()


# --- контейнер и командная строка ---

def test_container_singleton(container):
    assert get_container() is container
    with pytest.raises(RuntimeError):
        DIContainer()
    assert container.get_experiment_service() is container.get_experiment_service()
    DIContainer.reset()
    assert get_container() is not container


def test_container_oracle_uses_configured_precision(container):
    from infrastructure.benchmarks.factory import BenchmarkFactory

    session = container.oracle_for(BenchmarkFactory.create("sphere", 1))
    assert session.query_value(0.5) == 0.25


def test_cli_list_benchmarks(container, capsys):
    assert cli.main(["list-benchmarks"]) == 0
    out = capsys.readouterr().out
    assert "rastrigin" in out and "booth" in out


def test_cli_reports_errors_with_exit_code(container, capsys):
    assert cli.main(["run", "--function", "himmelblau"]) == 1
    assert "ошибка" in capsys.readouterr().err


def test_cli_run_writes_trace(container, tmp_path):
    code = cli.main(["run", "--function", "sphere", "--iters", "3", "--out", str(tmp_path)])
    assert code == 0
    assert len(read_trace(tmp_path / "sphere_d2_full_s0.csv")) == 4


def test_cli_run_from_config_file(container, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"function = booth\nmax_iters = 2\nout_dir = {tmp_path}\n", encoding="utf-8")
    assert cli.main(["run", "--config", str(cfg), "--iters", "1"]) == 0
    assert len(read_trace(tmp_path / "booth_d2_full_s0.csv")) == 2


def test_cli_refute_and_dump(container, tmp_path):
    dump = tmp_path / "witness.csv"
    code = cli.main([
        "refute", "--solver", "grid", "--budget", "1000", "--dim", "2",
        "--eps", "0.1", "--dump", str(dump), "--dump-samples", "50",
    ])
    assert code == 0
    assert len(dump.read_text(encoding="utf-8").splitlines()) == 51


def test_cli_certify_basin(container, capsys):
    assert cli.main(["certify", "--kind", "basin", "--function", "sphere", "--samples", "1000"]) == 0
    assert "PASS" in capsys.readouterr().out
    assert cli.main(["certify", "--kind", "basin", "--function", "rastrigin", "--basin", "2.0"]) == 1


def test_cli_plot(container, tmp_path, capsys):
    path = _write_trace_file(tmp_path / "t.csv", [2.0, 1.0])
    assert cli.main(["plot", str(path), "--out", str(tmp_path / "p.svg")]) == 0
    assert (tmp_path / "p.svg").exists()


# --- приёмочные прогоны ---

@pytest.mark.slow
@pytest.mark.parametrize(
    "function,tolerance",
    [
        ("sphere", 1e-3),
        ("booth", 1e-3),
        ("beale", 1e-3),
        ("rosenbrock", 1e-3),
        ("rastrigin", 1e-3),
        ("ackley", 1e-2),
    ],
)
def test_two_dimensional_convergence(service, tmp_path, function, tolerance):
    summary = service.run_experiment(ExperimentConfig.build(function=function, out_dir=str(tmp_path)))
    assert summary.ok
    assert summary.gap <= tolerance
    assert summary.wall_time <= 30.0


@pytest.mark.slow
def test_twenty_dimensional_runs(service, tmp_path):
    started = time.perf_counter()
    sphere = service.run_experiment(
        ExperimentConfig.build(function="sphere", dim=20, step_size=0.001, out_dir=str(tmp_path))
    )
    assert sphere.grid_mode == GridMode.SAMPLED
    assert sphere.gap <= 1e-3
    for function in ("rastrigin", "rosenbrock"):
        summary = service.run_experiment(
            ExperimentConfig.build(function=function, dim=20, out_dir=str(tmp_path))
        )
        assert summary.final_f <= 0.01 * summary.start_f
    assert time.perf_counter() - started <= 300.0
