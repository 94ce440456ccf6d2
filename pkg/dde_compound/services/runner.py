"""Batch runner behind the CLI: configuration loading, subcommand dispatch and run records."""

import json
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from dde_compound import __version__
from dde_compound.models.experiment import ExperimentConfig, Subcommand
from dde_compound.models.grid import Segment
from dde_compound.models.reports import RunRecord
from dde_compound.services import compound, dde_core, floquet, tensor_spectra, u0pos
from dde_compound.services.persistence import (
    multiplier_frame,
    ratio_field_frame,
    read_matrix_csv,
    spectrum_frame,
    write_csv,
    write_json,
)
from dde_compound.services.reporting import write_summary
from dde_compound.utils.errors import InvalidArgumentError
from dde_compound.utils.logging import RUN_LOG, get_logger, run_log

logger = get_logger(__name__)

RUN_RECORD = "run_record.json"
SUMMARY = "summary.md"


@dataclass
class RunOutputs:
    """Files and certificate outcomes produced by one subcommand."""

    files: list[Path] = field(default_factory=list)
    reports: dict[str, dict[str, bool]] = field(default_factory=dict)

    def add_report(self, name: str, *, passed: bool, exploratory: bool = False) -> None:
        """Record a certificate outcome."""
        self.reports[name] = {"passed": bool(passed), "exploratory": bool(exploratory)}


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)


def load_config(path: Path | None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read a JSON experiment configuration and apply command-line overrides.

    Args:
    ----
        path: JSON file, or None to build the configuration from ``overrides`` alone
        overrides: Field values that take precedence over the file

    Returns:
    -------
        Validated configuration

    Raises:
    ------
        InvalidArgumentError: unreadable file, malformed JSON, or a field failing validation

    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            msg = f"config file {path} does not exist"
            raise InvalidArgumentError(msg) from e
        except json.JSONDecodeError as e:
            msg = f"config file {path} is not valid JSON: {e}"
            raise InvalidArgumentError(msg) from e
        if not isinstance(data, dict):
            msg = f"config file {path} must hold a JSON object"
            raise InvalidArgumentError(msg)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "subcommand" and data.get("subcommand") not in {None, value}:
            logger.warning("Command line subcommand '%s' overrides '%s' from the config file", value, data["subcommand"])
        data[key] = value

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        msg = f"invalid configuration: {_format_validation_error(e)}"
        raise InvalidArgumentError(msg) from e


def _payload(config: ExperimentConfig, **sections: Any) -> dict[str, Any]:
    return {"config": config.echo(), "version": __version__, **sections}


def _run_simulate(config: ExperimentConfig, out: Path) -> RunOutputs:
    system = config.system()
    initial = Segment.constant(config.grid(), config.initial)
    trajectory = dde_core.solve_untransformed(system, config.tau, config.tau + config.horizon, initial)
    outputs = RunOutputs()
    outputs.files.append(write_csv(trajectory.to_frame(), out / "trajectory.csv"))
    return outputs


def _run_spectrum(config: ExperimentConfig, out: Path) -> RunOutputs:
    matrix = read_matrix_csv(config.matrix)
    spectrum = tensor_spectra.eigenvalues(matrix)
    outputs = RunOutputs()
    outputs.files.append(write_csv(spectrum_frame(spectrum), out / "eigenvalues.csv"))
    sections: dict[str, Any] = {"spectrum": spectrum.to_dict()}
    if 2 <= config.m <= matrix.shape[0]:
        check = tensor_spectra.compound_spectrum_check(matrix, config.m)
        sections["compound_check"] = check.to_dict()
        outputs.add_report(check.name, passed=check.passed)
    outputs.files.append(write_json(_payload(config, **sections), out / "spectrum.json"))
    return outputs


def _run_positivity(config: ExperimentConfig, out: Path) -> RunOutputs:
    _, b = dde_core.transform(config.system())
    cert = compound.positivity_certificate(
        b, config.tau, config.eta, config.m, config.trials, config.seed, threads=config.threads
    )
    outputs = RunOutputs()
    outputs.add_report(cert.name, passed=cert.passed)
    outputs.files.append(write_json(_payload(config, report=cert.to_dict()), out / "positivity.json"))
    return outputs


def _run_detcheck(config: ExperimentConfig, out: Path) -> RunOutputs:
    system = config.system()
    window = (config.tau, config.tau + config.horizon)
    if system.is_constant():
        cert = compound.leading_det_check(
            (system.alpha.mean(), system.beta.mean()), config.m, window, grid=config.grid()
        )
    else:
        cert = compound.leading_det_check(system, config.m, window)
    outputs = RunOutputs()
    outputs.add_report(cert.name, passed=cert.passed)
    outputs.files.append(write_json(_payload(config, report=cert.to_dict()), out / "detcheck.json"))
    return outputs


def _run_floquet(config: ExperimentConfig, out: Path) -> RunOutputs:
    system = config.system()
    lap_report, cert = floquet.lap_dominance_report(system, config.m, config.k_max)
    gronwall = floquet.gronwall_check(system, config.tau)
    outputs = RunOutputs()
    outputs.add_report(cert.name, passed=cert.passed)
    outputs.add_report(gronwall.name, passed=gronwall.passed)
    outputs.files.append(write_csv(multiplier_frame(lap_report), out / "multipliers.csv"))
    payload = _payload(
        config,
        multipliers=lap_report.to_dict(),
        report=cert.to_dict(),
        gronwall=gronwall.to_dict(),
        multiplier_shift=floquet.multiplier_shift(system),
    )
    outputs.files.append(write_json(payload, out / "floquet.json"))
    if config.homotopy_steps > 0:
        homotopy = floquet.homotopy_scan(
            system, config.m, config.homotopy_steps, config.k_max, threads=config.threads
        )
        outputs.add_report("homotopy", passed=homotopy.passed)
        outputs.files.append(write_json(_payload(config, homotopy=homotopy.to_dict()), out / "homotopy.json"))
    return outputs


def _run_u0check(config: ExperimentConfig, out: Path) -> RunOutputs:
    grid = config.grid()
    phi = u0pos.make_probe(config.probe, config.m, grid, seed=config.probe_seed())
    report = u0pos.u0_ratio(phi, config.m, config.k, config.probe)
    outputs = RunOutputs()
    outputs.add_report("u0_ratio", passed=report.passed and report.within_ceiling, exploratory=report.exploratory)
    sections: dict[str, Any] = {"report": report.to_dict()}
    if config.m == 3:
        sections["cv_decomposition"] = u0pos.decompose_CV(phi).to_dict()
    outputs.files.append(write_json(_payload(config, **sections), out / "ratio.json"))
    field_data = np.asarray(report.ratios, dtype=float).reshape(-1, config.m + 1)
    outputs.files.append(write_csv(ratio_field_frame(field_data[:, :-1], field_data[:, -1]), out / "ratio_field.csv"))
    return outputs


HANDLERS: dict[Subcommand, Callable[[ExperimentConfig, Path], RunOutputs]] = {
    Subcommand.SIMULATE: _run_simulate,
    Subcommand.SPECTRUM: _run_spectrum,
    Subcommand.POSITIVITY: _run_positivity,
    Subcommand.DETCHECK: _run_detcheck,
    Subcommand.FLOQUET: _run_floquet,
    Subcommand.U0CHECK: _run_u0check,
}


def _timestamp() -> str:
    return datetime.now(UTC).isoformat(timespec="seconds")


def run(config: ExperimentConfig) -> RunRecord:
    """Execute one subcommand and write its outputs, ``run_record.json``, ``summary.md`` and ``run.log``.

    The run passes when every non-exploratory certificate passes.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = RunRecord(subcommand=str(config.subcommand), version=__version__, config=config.echo(), started_at=_timestamp())
    with run_log(out):
        logger.info("Running %s into %s", config.subcommand, out)
        outputs = HANDLERS[config.subcommand](config, out)
        binding = [flags["passed"] for flags in outputs.reports.values() if not flags["exploratory"]]
        record.reports = outputs.reports
        record.passed = all(binding)
        record.finished_at = _timestamp()
        record.files = [path.name for path in outputs.files] + [SUMMARY, RUN_LOG, RUN_RECORD]
        write_summary(record, out / SUMMARY)
        write_json(record.to_dict(), out / RUN_RECORD)
        logger.info("Finished %s: passed=%s", config.subcommand, record.passed)
    return record
