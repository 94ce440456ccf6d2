"""Human-readable run summaries rendered with jinja2."""

from pathlib import Path

from jinja2 import Environment, PackageLoader, StrictUndefined

from dde_compound.models.reports import RunRecord
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)

SUMMARY_TEMPLATE = "run_summary.md.j2"


def _environment() -> Environment:
    return Environment(
        loader=PackageLoader("dde_compound", "templates"),
        undefined=StrictUndefined,
        trim_blocks=False,
        lstrip_blocks=False,
        autoescape=False,  # noqa: S701 markdown output
        keep_trailing_newline=True,
    )


def render_summary(record: RunRecord) -> str:
    """Render ``summary.md`` for a run record."""
    template = _environment().get_template(SUMMARY_TEMPLATE)
    return template.render(record=record.model_dump(mode="json"))


def write_summary(record: RunRecord, path: Path) -> Path:
    """Render and write the summary next to ``run_record.json``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_summary(record), encoding="utf-8")
    logger.debug("Wrote summary %s", path)
    return path
