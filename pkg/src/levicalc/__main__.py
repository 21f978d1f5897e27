"""CLI entry point for levicalc."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import NoReturn

import numpy as np
import typer
from pydantic import BaseModel, ValidationError

from levicalc.config import MonteCarloSettings, RunConfig, Tolerance
from levicalc.errors import LevicalcError, NotInDomainError

app = typer.Typer(
    name="levicalc",
    help="levicalc - random integral mappings on infinitely divisible laws",
    add_completion=False,
)

_DEFAULTS = MonteCarloSettings()


def _fail(message: str, code: int) -> NoReturn:
    typer.echo(f"❌ {message}", err=True)
    raise typer.Exit(code)


@contextmanager
def _handled() -> Iterator[None]:
    """Map library errors to exit codes."""
    try:
        yield
    except NotInDomainError as e:
        failed = ", ".join(e.report.failed()) if e.report is not None else ""
        _fail(f"{e}" + (f" [failed: {failed}]" if failed and failed not in str(e) else ""), 3)
    except LevicalcError as e:
        _fail(str(e), e.exit_code)
    except ValidationError as e:
        _fail(f"invalid input: {e}", 2)
    except (KeyError, ValueError) as e:
        _fail(str(e).strip("'\""), 2)


def _emit(report: BaseModel, out: Path | None) -> None:
    if out is None:
        typer.echo(report.model_dump_json(indent=2))
        return
    from levicalc.reporting.export import write_json

    write_json(report, out)
    typer.echo(f"📄 Wrote {out}", err=True)


def _tolerance(tol: float | None) -> Tolerance:
    return Tolerance() if tol is None else Tolerance(epsabs=tol, epsrel=tol)


def _params(pairs: list[str]) -> dict[str, float]:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            _fail(f"--param expects KEY=VALUE, got '{pair}'", 2)
        try:
            params[key.strip()] = float(value)
        except ValueError:
            _fail(f"--param {key} needs a number, got '{value}'", 2)
    return params


# --- command bodies, shared by the subcommands and `run --config` ---------------------


def _exponent_report(law: str, y: np.ndarray, tol: Tolerance) -> BaseModel:
    from levicalc.experiments.fixtures import resolve_law
    from levicalc.measures.triple import levy_exponent
    from levicalc.reporting.schema import ExponentPoint, ExponentTable

    values = np.atleast_1d(levy_exponent(resolve_law(law), y, tol))
    points = [
        ExponentPoint(y=float(y[i]), re=float(values[i].real), im=float(values[i].imag))
        for i in range(y.size)
    ]
    return ExponentTable(law=law, points=points)


def _domain_report(law: str, map_ref: str, tol: Tolerance) -> tuple[BaseModel, int]:
    from levicalc.experiments.fixtures import resolve_law, resolve_map
    from levicalc.transform.domain import domain_check

    report = domain_check(resolve_map(map_ref), resolve_law(law), tol)
    return report, 0 if report.admitted else 3


def _transform_report(law: str, map_ref: str, tol: Tolerance) -> tuple[BaseModel, int]:
    from levicalc.experiments.fixtures import resolve_law, resolve_map
    from levicalc.reporting.schema import TransformOutput
    from levicalc.transform.domain import domain_check
    from levicalc.transform.triple import transform_triple

    m, t = resolve_map(map_ref), resolve_law(law)
    report = domain_check(m, t, tol)
    if not report.admitted:
        return report, 3
    image = transform_triple(m, t, tol)
    output = TransformOutput(
        map=m.label(),
        law=image.model_dump(mode="json"),
        domain=report.model_dump(mode="json"),
    )
    return output, 0


def _compose_report(
    maps: list[str],
    tol: Tolerance,
    samples: int = 0,
    seed: int | None = None,
    window: float | None = None,
):
    from levicalc.compose.pushforward import default_w_grid, image_density_mc, image_tail_table, pushforward
    from levicalc.experiments.fixtures import resolve_map
    from levicalc.reporting.schema import CompositionReport, TailPoint

    ms = [resolve_map(ref) for ref in maps]
    if samples:
        if seed is None:
            _fail("--seed is required when sampling", 2)
        result = image_density_mc(ms, samples, seed, window=window, tol=tol)
    else:
        result = pushforward(ms, tol)
    rows = image_tail_table(result, default_w_grid(result))
    report = CompositionReport(
        maps=[m.label() for m in ms],
        closed_form=result.closed_form,
        params=result.params,
        finite=result.finite,
        sign=result.sign,
        image=None if result.image.is_opaque else result.image.model_dump(mode="json"),
        tail=[TailPoint(w=w, tail_mass=v) for w, v in rows],
        seed=result.seed,
        n_samples=samples or None,
        ks_statistic=result.ks_statistic,
        ks_pvalue=result.ks_pvalue,
    )
    return report, result, rows


def _fixed_point_report(
    map_ref: str,
    p: float | None,
    sigma: float,
    y: np.ndarray,
    tol: Tolerance,
    compose_with: str | None = None,
) -> BaseModel:
    from levicalc.analysis.stable import (
        StableLaw,
        class_preservation_scan,
        multiplicativity_check,
        verify_fixed_point,
    )
    from levicalc.experiments.fixtures import resolve_map

    m = resolve_map(map_ref)
    if compose_with is not None:
        return multiplicativity_check(m, resolve_map(compose_with), tol=tol)
    if p is None:
        return class_preservation_scan(m, tol=tol)
    return verify_fixed_point(m, StableLaw(index=p, sigma=sigma), y, tol)


def _factorize_report(
    law: str, map_ref: str, prime_map: str, y: np.ndarray, tol: Tolerance, triple_route: bool = False
) -> BaseModel:
    from levicalc.analysis.factorization import check_factorization
    from levicalc.experiments.fixtures import resolve_law, resolve_map

    return check_factorization(
        resolve_map(map_ref), resolve_map(prime_map), resolve_law(law), y, tol, triple_route=triple_route
    )


def _classify_report(law: str, tag: str, params: dict[str, float], tol: Tolerance, build: bool = False) -> BaseModel:
    from levicalc.analysis.classes import build_member, class_membership
    from levicalc.experiments.fixtures import resolve_law

    t = resolve_law(law)
    if build:
        return build_member(tag, t, params, tol)
    return class_membership(tag, t, params, tol)


def _simulate_report(
    law: str,
    map_ref: str,
    seed: int,
    settings: MonteCarloSettings,
    y: np.ndarray,
    tol: Tolerance,
    samples_csv: Path | None = None,
) -> BaseModel:
    from levicalc.experiments.fixtures import resolve_law, resolve_map
    from levicalc.montecarlo.paths import PathConfig, needs_window, pathwise_integral
    from levicalc.montecarlo.validation import validate_map
    from levicalc.reporting.export import write_samples_csv

    m, t = resolve_map(map_ref), resolve_law(law)
    cfg = PathConfig.from_settings(settings, seed)
    report = validate_map(m, t, cfg, y, tol, settings.k_sigma)
    if samples_csv is not None:
        if needs_window(m):
            cfg = cfg.model_copy(update={"window": report.window})
        sample = pathwise_integral(m, t, cfg, tol)
        write_samples_csv(sample.values, samples_csv)
        typer.echo(f"📄 Wrote {samples_csv}", err=True)
    return report


def _require(value: object, flag: str, command: str) -> None:
    if value is None:
        _fail(f"{command} needs {flag}", 2)


def _dispatch(cfg: RunConfig) -> tuple[BaseModel, int]:
    """Run a non-experiment config through the matching command body."""
    from levicalc.numerics.grids import parse_y_grid

    y = parse_y_grid(cfg.y_grid)
    tol = cfg.tolerance
    first_map = cfg.maps[0] if cfg.maps else None
    law = cfg.law
    p = cfg.params
    if cfg.command in ("exponent", "transform", "domain", "simulate", "factorize", "classify-law"):
        _require(law, "a law", cfg.command)
    if cfg.command in ("transform", "domain", "simulate", "factorize", "fixed-point"):
        _require(first_map, "a map", cfg.command)
    match cfg.command:
        case "exponent":
            return _exponent_report(law, y, tol), 0
        case "transform":
            return _transform_report(law, first_map, tol)
        case "domain":
            return _domain_report(law, first_map, tol)
        case "compose":
            report, _result, _rows = _compose_report(cfg.maps, tol, int(p.get("samples", 0)), cfg.seed, p.get("window"))
            return report, 0
        case "simulate":
            _require(cfg.seed, "a seed", "simulate")
            return _simulate_report(law, first_map, cfg.seed, cfg.monte_carlo, y, tol), 0
        case "fixed-point":
            return _fixed_point_report(first_map, p.get("p"), float(p.get("sigma", 1.0)), y, tol, p.get("compose_with")), 0
        case "factorize":
            _require(cfg.prime_map, "a prime_map", "factorize")
            return _factorize_report(law, first_map, cfg.prime_map, y, tol, bool(p.get("triple_route", False))), 0
        case "classify-law":
            _require(p.get("class"), "params.class", "classify-law")
            params = {k: float(v) for k, v in p.get("class_params", {}).items()}
            return _classify_report(law, p["class"], params, tol, bool(p.get("build", False))), 0
    _fail(f"command '{cfg.command}' cannot be dispatched", 2)


# --- subcommands ---------------------------------------------------------------------


LAW_HELP = "Law: fixture name or JSON file"
MAP_HELP = "Integral map: fixture name or JSON file"


@app.command()
def exponent(
    law: str = typer.Option(..., "--law", "-l", help=LAW_HELP),
    y_grid: str = typer.Option("default", "--y-grid", help="default, a list, lin:A:B:N or log:A:B:N"),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Evaluate the Lévy-Khintchine exponent of a law on a y-grid."""
    from levicalc.numerics.grids import parse_y_grid

    with _handled():
        _emit(_exponent_report(law, parse_y_grid(y_grid), _tolerance(tol)), out)


@app.command()
def transform(
    law: str = typer.Option(..., "--law", "-l", help=LAW_HELP),
    map_ref: str = typer.Option(..., "--map", "-m", help=MAP_HELP),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tail_csv: Path = typer.Option(None, "--tail-csv", help="Also write image tails (w, upper, lower)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Apply an integral map to a law.

    Laws outside the domain produce the domain report and exit code 3.
    """
    with _handled():
        report, code = _transform_report(law, map_ref, _tolerance(tol))
        _emit(report, out)
        if code:
            _fail(f"law is outside the domain of the map [failed: {', '.join(report.failed())}]", code)
        if tail_csv is not None:
            from levicalc.experiments.fixtures import resolve_law, resolve_map
            from levicalc.transform.triple import tail_table, transform_triple, write_tail_csv

            image = transform_triple(resolve_map(map_ref), resolve_law(law), _tolerance(tol))
            write_tail_csv(tail_table(image.levy, np.geomspace(1e-2, 1e2, 41), _tolerance(tol)), tail_csv)
            typer.echo(f"📄 Wrote {tail_csv}", err=True)


@app.command()
def domain(
    law: str = typer.Option(..., "--law", "-l", help=LAW_HELP),
    map_ref: str = typer.Option(..., "--map", "-m", help=MAP_HELP),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Decide whether a law lies in the domain of a map."""
    with _handled():
        report, code = _domain_report(law, map_ref, _tolerance(tol))
        _emit(report, out)
        if code:
            _fail(f"law is outside the domain [failed: {', '.join(report.failed())}]", code)


@app.command()
def compose(
    maps: list[str] = typer.Option(..., "--map", "-m", help="Maps, outermost first (repeatable)"),
    out: Path = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
    format: str = typer.Option("json", "--format", "-f", help="json report or csv tail table"),
    samples: int = typer.Option(0, "--samples", help="Monte Carlo samples of the image measure"),
    seed: int = typer.Option(None, "--seed", help="Seed (required with --samples)"),
    window: float = typer.Option(None, "--window", help="Lower cut for sampling infinite images"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Compose integral maps into a single map.

    Known compositions report their catalog id; others a tabulated tail.
    """
    with _handled():
        report, _result, rows = _compose_report(maps, _tolerance(tol), samples, seed, window)
        if format.lower() == "csv":
            if out is None:
                _fail("--format csv needs --out", 2)
            from levicalc.reporting.export import write_csv

            write_csv(rows, out, ("w", "tail_mass"))
            typer.echo(f"📄 Wrote {out}", err=True)
        elif format.lower() == "json":
            _emit(report, out)
        else:
            _fail(f"unknown format '{format}' (json or csv)", 2)
        label = report.closed_form or "tabulated"
        typer.echo(f"🔗 Composition: {label}", err=True)


@app.command()
def catalog(
    export: Path = typer.Option(None, "--export", help="Write the registry as JSON"),
) -> None:
    """List the closed-form composition catalog."""
    import json

    from levicalc.compose.catalog import catalog as entries
    from levicalc.compose.catalog import export_catalog

    for entry in entries():
        kind = "evaluator" if entry.is_evaluator else "composition"
        typer.echo(f"   {entry.name} ({kind}): {entry.description}")
    if export is not None:
        export.parent.mkdir(parents=True, exist_ok=True)
        export.write_text(json.dumps(export_catalog(), indent=2), encoding="utf-8")
        typer.echo(f"📄 Wrote {export}")


@app.command()
def simulate(
    law: str = typer.Option(..., "--law", "-l", help=LAW_HELP),
    map_ref: str = typer.Option(..., "--map", "-m", help=MAP_HELP),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    n_paths: int = typer.Option(_DEFAULTS.n_paths, "--n-paths", help="Simulated paths"),
    resolution: int = typer.Option(_DEFAULTS.resolution, "--resolution", help="Time grid points"),
    epsilon: float = typer.Option(_DEFAULTS.epsilon, "--epsilon", help="Small-jump truncation level"),
    k_sigma: float = typer.Option(_DEFAULTS.k_sigma, "--k-sigma", help="Standard errors in the budget"),
    y_grid: str = typer.Option("default", "--y-grid", help="default, a list, lin:A:B:N or log:A:B:N"),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    samples_csv: Path = typer.Option(None, "--samples-csv", help="Also write raw samples"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Simulate the random integral and compare its empirical characteristic function."""
    from levicalc.numerics.grids import parse_y_grid

    with _handled():
        settings = MonteCarloSettings(
            n_paths=n_paths, resolution=resolution, epsilon=epsilon, k_sigma=k_sigma
        )
        report = _simulate_report(
            law, map_ref, seed, settings, parse_y_grid(y_grid), _tolerance(tol), samples_csv
        )
        _emit(report, out)
        status_icon = "✅" if report.passed else "⚠️ "
        typer.echo(f"{status_icon} sup error {report.sup_error:.4f} (budget {report.sup_budget:.4f})", err=True)


@app.command("fixed-point")
def fixed_point(
    map_ref: str = typer.Option(..., "--map", "-m", help=MAP_HELP),
    p: float = typer.Option(None, "--p", help="Stable index in (0, 2]; omit to scan"),
    sigma: float = typer.Option(1.0, "--sigma", help="Scale of the stable law"),
    compose_with: str = typer.Option(None, "--compose-with", help="Check c₁·c₂ against the composed map"),
    y_grid: str = typer.Option("default", "--y-grid", help="default, a list, lin:A:B:N or log:A:B:N"),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Fixed-point constant of a map on symmetric stable laws."""
    from levicalc.numerics.grids import parse_y_grid

    with _handled():
        report = _fixed_point_report(map_ref, p, sigma, parse_y_grid(y_grid), _tolerance(tol), compose_with)
        _emit(report, out)


@app.command()
def factorize(
    law: str = typer.Option(..., "--law", "-l", help=LAW_HELP),
    map_ref: str = typer.Option(..., "--map", "-m", help="Outer map I"),
    prime_map: str = typer.Option(..., "--prime-map", help="Map I′ with λ = I′(ν)"),
    triple_route: bool = typer.Option(False, "--triple-route", help="Also build the law from triples"),
    y_grid: str = typer.Option("default", "--y-grid", help="default, a list, lin:A:B:N or log:A:B:N"),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Check the factorization I(ν) = I(λ) * λ with λ = I′(ν)."""
    from levicalc.numerics.grids import parse_y_grid

    with _handled():
        report = _factorize_report(law, map_ref, prime_map, parse_y_grid(y_grid), _tolerance(tol), triple_route)
        _emit(report, out)
        if not report.holds:
            typer.echo(f"⚠️  Factorization verdict: {report.verdict}", err=True)


@app.command("classify-law")
def classify_law(
    law: str = typer.Option(None, "--law", "-l", help=LAW_HELP),
    tag: str = typer.Option(None, "--class", "-c", help="Class id (omit to list classes)"),
    param: list[str] = typer.Option([], "--param", help="Class parameter KEY=VALUE (repeatable)"),
    build: bool = typer.Option(False, "--build", help="Apply the class's defining map to the law"),
    out: Path = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    tol: float = typer.Option(None, "--tol", help="Quadrature tolerance"),
) -> None:
    """Test membership of a law in a named class, or build a member."""
    if tag is None:
        from levicalc.analysis.classes import CLASS_TAGS

        for entry in CLASS_TAGS.values():
            typer.echo(f"   {entry.id}: {entry.description}")
        return
    if law is None:
        _fail("--law is required with --class", 2)
    with _handled():
        report = _classify_report(law, tag, _params(param), _tolerance(tol), build)
        _emit(report, out)


@app.command()
def run(
    experiment: str = typer.Option(None, "--experiment", "-e", help="Built-in acceptance experiment"),
    config: Path = typer.Option(None, "--config", help="Path to YAML run config"),
    out: Path = typer.Option(None, "--out", "-o", help="Output directory for reports"),
    format: list[str] = typer.Option([], "--format", "-f", help="Additional output formats: junit"),
    seed: int = typer.Option(None, "--seed", help="Override the config seed"),
    tol: float = typer.Option(None, "--tol", help="Override the quadrature tolerance"),
) -> None:
    """Run a built-in experiment or a checked-in config file.

    Use --experiment NAME for the built-in acceptance experiments or --config
    for any run config.
    """
    from levicalc.config import load_run_config
    from levicalc.experiments import get_experiment_path, get_experiment_version
    from levicalc.experiments.runner import run_experiment

    if (experiment is None) == (config is None):
        _fail("use exactly one of --experiment or --config", 2)

    with _handled():
        if experiment is not None:
            typer.echo(f"📦 Experiment {experiment} (version {get_experiment_version()})")
            config = get_experiment_path(experiment)
        elif not config.exists():
            _fail(f"Config file not found: {config}", 2)
        cfg = load_run_config(config)
        update = {}
        if seed is not None:
            update["seed"] = seed
        if tol is not None:
            update["tolerance"] = _tolerance(tol)
        cfg = cfg.model_copy(update=update)

        out_dir = out if out is not None else (Path(cfg.out) if cfg.out else None)
        report_path = out_dir / "report.json" if out_dir is not None else None

        if cfg.command != "experiment":
            report, code = _dispatch(cfg)
            _emit(report, report_path)
            if code:
                _fail(f"{cfg.command} exited with code {code}", code)
            return

        typer.echo("⚡ Running checks...")
        result = run_experiment(cfg)
        _emit(result, report_path)

    for fmt in format:
        fmt_lower = fmt.lower()
        if fmt_lower == "junit":
            from levicalc.reporting.export import export_junit

            if out_dir is None:
                _fail("--format junit needs --out", 2)
            junit_path = out_dir / "junit.xml"
            export_junit([result], junit_path)
            typer.echo(f"📄 Wrote {junit_path}")
        else:
            typer.echo(f"⚠️  Unknown format: {fmt}", err=True)

    # Summary
    status_icon = "✅" if result.passed else "❌"
    failed = [c for c in result.checks if not c.passed]
    typer.echo(f"\n{status_icon} {result.experiment}: {'PASS' if result.passed else 'FAIL'}")
    typer.echo(f"   Checks: {len(result.checks) - len(failed)}/{len(result.checks)} passed")
    if failed:
        typer.echo("\n⚠️  Failures:")
        for check in failed:
            typer.echo(f"   - {check.name}: {check.value} (threshold {check.threshold})")
        raise typer.Exit(1)


@app.command()
def version() -> None:
    """Show version information."""
    from levicalc import __version__

    typer.echo(f"levicalc v{__version__}")


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="-v info, -vv debug"),
) -> None:
    """levicalc - random integral mappings on infinitely divisible laws."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    from levicalc.config import resolve_settings

    with _handled():
        resolve_settings()
    if ctx.invoked_subcommand is None:
        from levicalc import __version__

        typer.echo(f"levicalc v{__version__} - random integral mappings on infinitely divisible laws")
        typer.echo("Use --help for available commands.")


if __name__ == "__main__":
    app()
