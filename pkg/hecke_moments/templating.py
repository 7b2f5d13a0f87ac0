import importlib.resources
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

PLOT_TEMPLATE = "ratio_plot.gp.j2"


def get_templates() -> Environment:
    """
    Returns a Jinja2 Environment configured with the package's templates directory.

    The templates render plain-text programs, so autoescaping is off.
    """
    templates_dir = importlib.resources.files("hecke_moments.templates")
    return Environment(
        loader=FileSystemLoader(str(templates_dir)),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
        autoescape=False,
    )


def render_ratio_plot(csv_name: str, title: str = "S_4 / (C_4 X log^10 X)") -> str:
    """A gnuplot program that reads only `csv_name` and plots ratio4 against log X."""
    return get_templates().get_template(PLOT_TEMPLATE).render(csv_name=csv_name, title=title)


def write_ratio_plot(csv_path: Path, path: Path) -> Path:
    path.write_text(render_ratio_plot(csv_path.name), encoding="utf-8")
    return path
