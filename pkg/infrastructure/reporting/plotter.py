"""
Статический график сходимости f(x_k) по итерациям в SVG
"""
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import structlog  # noqa: E402

from infrastructure.exceptions import ReportIOError, TraceParseError  # noqa: E402
from infrastructure.reporting.trace_csv import read_trace  # noqa: E402

logger = structlog.get_logger(__name__)

# каждая итерация - отдельная вершина ломаной
plt.rcParams["path.simplify"] = False
plt.rcParams["svg.hashsalt"] = "globopt"
plt.rcParams["figure.figsize"] = 8, 4.5

LINE_GID = "convergence"


def render_plot(
    trace_path: Union[str, Path],
    out_path: Optional[Union[str, Path]] = None,
    title: Optional[str] = None,
) -> Path:
    """
    Построить график f(x_k) от k.

    Ось значений логарифмическая, если все значения положительны.

    Args:
        trace_path: CSV-трасса
        out_path: Путь SVG (по умолчанию рядом с трассой)
        title: Заголовок

    Returns:
        Путь к SVG
    """
    trace_path = Path(trace_path)
    rows = read_trace(trace_path)
    if not rows:
        raise TraceParseError("трасса не содержит итераций", 2)
    out_path = Path(out_path) if out_path else trace_path.with_suffix(".svg")

    ks = [r.k for r in rows]
    values = [r.f_x for r in rows]
    log_scale = all(v > 0 for v in values)

    fig, ax = plt.subplots()
    try:
        (line,) = ax.plot(ks, values, color="tab:blue", linewidth=1.2)
        line.set_gid(LINE_GID)
        ax.set_xlabel("k")
        ax.set_ylabel("f(x_k)")
        ax.set_yscale("log" if log_scale else "linear")
        ax.set_title(title or trace_path.stem)
        ax.grid(True, which="major", linestyle="--", alpha=0.5)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="svg", bbox_inches="tight", metadata={"Date": None})
    except OSError as e:
        raise ReportIOError(str(out_path), str(e)) from e
    finally:
        plt.close(fig)

    logger.info("График сохранён", path=str(out_path), points=len(rows), log_scale=log_scale)
    return out_path
