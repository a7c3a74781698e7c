"""
Командная строка: запуск алгоритма, полный прогон, опровержение решателей,
проверка сертификатов, список функций и графики.
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

import structlog

from application.services.adversary_service import refute, witness_samples
from application.services.certificate_service import (
    basin_certificate_check,
    lipschitz_grid_minimize,
    lipschitz_sample_check,
    predicted_lattice_size,
)
from application.services.experiment_service import (
    ExperimentConfig,
    StartMode,
    load_config_file,
)
from application.services.solvers import SolverFactory
from config.logging_config import configure_logging
from domain.entities import BoxDomain, GridMode, RunSummary
from infrastructure.benchmarks.factory import BenchmarkFactory, value_lipschitz_bound
from infrastructure.di.container import get_container
from infrastructure.exceptions import GlobalOptException
from infrastructure.reporting.plotter import render_plot
from infrastructure.reporting.witness_csv import write_witness_samples

logger = structlog.get_logger("cli")


def _print_summary(s: RunSummary) -> None:
    if not s.ok:
        print(f"{s.benchmark} d={s.dim}: ОШИБКА {s.error}")
        return
    point = ", ".join(f"{c:.6g}" for c in s.final_point.coords[:6])
    if s.dim > 6:
        point += ", ..."
    print(
        f"{s.benchmark} d={s.dim} [{s.grid_mode.value}] "
        f"f_start={s.start_f:.6g} f_final={s.final_f:.6g} gap={s.gap:.3g} "
        f"iters={s.iterations} queries={s.queries} reason={s.terminal_reason.value} "
        f"time={s.wall_time:.2f}s x=({point})"
    )
    if s.trace_path:
        print(f"  трасса: {s.trace_path}")


def cmd_run(args: argparse.Namespace) -> int:
    values: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    flags = {
        "function": args.function,
        "dim": args.dim,
        "step_size": args.step,
        "basin_bound": args.basin,
        "max_iters": args.iters,
        "grid_mode": args.grid_mode,
        "n_samples": args.samples,
        "grad_tolerance": args.grad_tol,
        "precision_k": args.precision_k,
        "seed": args.seed,
        "out_dir": args.out,
        "start": args.start,
        "start_point": args.start_point,
        "plot": True if args.plot else None,
        "query_log": True if args.query_log else None,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    cfg = ExperimentConfig.build(**values)
    summary = get_container().get_experiment_service().run_experiment(cfg)
    _print_summary(summary)
    return 0


def cmd_reproduce_all(args: argparse.Namespace) -> int:
    overrides = {
        "max_iters": args.iters,
        "grid_budget": args.grid_budget,
        "seed": args.seed,
        "plot": True if args.plot else None,
    }
    rows = get_container().get_experiment_service().reproduce_all(
        out_dir=args.out,
        workers=args.workers,
        **{k: v for k, v in overrides.items() if v is not None},
    )
    for row in rows:
        _print_summary(row)
    return 0 if all(r.ok for r in rows) else 1


def cmd_refute(args: argparse.Namespace) -> int:
    container = get_container()
    settings = container.settings
    domain = BoxDomain(args.lo, args.hi, args.dim)
    verdict = refute(
        container.get_solver(args.solver, seed=args.seed),
        domain,
        budget=args.budget,
        eps=args.eps,
        lattice_max=settings.witness_lattice_max,
        random_pool=settings.witness_random_pool,
        seed=args.seed or 0,
    )
    r = verdict.refutation
    print(f"решатель: {args.solver}, запросов: {verdict.query_count}")
    print(f"заявленная точка: {verdict.claimed_point.coords}, значение {verdict.claimed_value}")
    print(f"свидетель: {r.witness_point.coords}, ρ={r.radius:.6g}, c={r.depth:.6g}")
    print(f"согласован с журналом: {verdict.consistent}, разрыв: {verdict.gap:.6g}")
    print(f"вердикт: {'опровергнут' if verdict.refuted else 'не опровергнут'}")
    if args.dump:
        write_witness_samples(witness_samples(r, args.dump_samples, seed=args.seed or 0), args.dump)
    return 0 if verdict.refuted else 1


def cmd_certify(args: argparse.Namespace) -> int:
    container = get_container()
    benchmark, params = BenchmarkFactory.lookup(args.function, args.dim)
    if args.kind == "basin":
        m = args.basin or params.basin_bound
        report = basin_certificate_check(
            benchmark, m, args.samples,
            seed=args.seed or 0,
            grad_floor=container.settings.basin_grad_floor,
        )
        print(f"бассейн {benchmark.name} m={m}: {'PASS' if report else 'FAIL'} "
              f"(точек: {report.checked}) {report.detail}")
        return 0 if report else 1

    L = args.lipschitz or value_lipschitz_bound(benchmark)
    report = lipschitz_sample_check(benchmark, L, args.samples, seed=args.seed or 0)
    print(f"Липшиц {benchmark.name} L={L:.6g}: {'PASS' if report else 'FAIL'} "
          f"(пар: {report.checked}) {report.detail}")
    if args.eps:
        session = container.oracle_for(benchmark, retain_log=False)
        point, fval = lipschitz_grid_minimize(
            session, benchmark.domain, L, args.eps, budget=container.settings.grid_budget
        )
        expected = predicted_lattice_size(benchmark.domain, L, args.eps)
        print(f"минимум по решётке: f={fval:.6g} в {point.coords}, "
              f"запросов {session.query_count} (прогноз {expected})")
    return 0 if report else 1


def cmd_list_benchmarks(args: argparse.Namespace) -> int:
    for row in BenchmarkFactory.describe():
        print(
            f"{row['name']:<12} {row['dim']:<6} {row['domain']:<28} "
            f"t={row['step_size']:<8g} m={row['basin_bound']:g}"
        )
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    path = render_plot(args.trace, args.out)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="globopt", description=__doc__)
    parser.add_argument("--log-level", default=None, help="Уровень логирования")
    parser.add_argument("--log-format", choices=["console", "json"], default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Запустить алгоритм на тестовой функции")
    run.add_argument("--config", help="Файл `key = value`, флаги имеют приоритет")
    run.add_argument("--function", help="Имя функции (см. list-benchmarks)")
    run.add_argument("--dim", type=int)
    run.add_argument("--step", type=float, help="Шаг спуска t")
    run.add_argument("--basin", type=float, help="Граница бассейна m")
    run.add_argument("--iters", type=int, help="Число итераций")
    run.add_argument("--grid-mode", choices=[m.value for m in GridMode])
    run.add_argument("--samples", type=int, help="Случайные узлы в режиме sampled")
    run.add_argument("--grad-tol", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--precision-k", type=int)
    run.add_argument("--start", choices=[m.value for m in StartMode])
    run.add_argument("--start-point", help="Координаты через запятую")
    run.add_argument("--out", help="Каталог результатов")
    run.add_argument("--plot", action="store_true")
    run.add_argument("--query-log", action="store_true")
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser("reproduce-all", help="Полный прогон таблицы параметров")
    sweep.add_argument("--out")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--iters", type=int)
    sweep.add_argument("--grid-budget", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--plot", action="store_true")
    sweep.set_defaults(handler=cmd_reproduce_all)

    ref = sub.add_parser("refute", help="Опровергнуть решатель оракулом нуля")
    ref.add_argument("--solver", choices=SolverFactory.names(), default="grid")
    ref.add_argument("--budget", type=int, default=1000)
    ref.add_argument("--dim", type=int, default=1)
    ref.add_argument("--eps", type=float, default=0.1)
    ref.add_argument("--lo", type=float, default=0.0)
    ref.add_argument("--hi", type=float, default=1.0)
    ref.add_argument("--seed", type=int)
    ref.add_argument("--dump", help="CSV с выборкой свидетеля")
    ref.add_argument("--dump-samples", type=int, default=2000)
    ref.set_defaults(handler=cmd_refute)

    cert = sub.add_parser("certify", help="Проверить сертификат Липшица или бассейна")
    cert.add_argument("--kind", choices=["basin", "lipschitz"], default="basin")
    cert.add_argument("--function", required=True)
    cert.add_argument("--dim", type=int, default=2)
    cert.add_argument("--basin", type=float, help="Сторона куба m")
    cert.add_argument("--lipschitz", type=float, help="Константа L")
    cert.add_argument("--eps", type=float, help="Запустить поиск по решётке с точностью ε")
    cert.add_argument("--samples", type=int, default=10_000)
    cert.add_argument("--seed", type=int)
    cert.set_defaults(handler=cmd_certify)

    lst = sub.add_parser("list-benchmarks", help="Список тестовых функций")
    lst.set_defaults(handler=cmd_list_benchmarks)

    plot = sub.add_parser("plot", help="SVG-график по трассе")
    plot.add_argument("trace")
    plot.add_argument("--out")
    plot.set_defaults(handler=cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    try:
        return args.handler(args)
    except GlobalOptException as e:
        logger.error("Команда завершилась ошибкой", command=args.command, error=str(e))
        print(f"ошибка: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
