"""Command-line client for the eigenvalue service.

Each subcommand builds a typed request, executes it either in process
or against a running server (--server URL), and emits a deterministic
report: JSON with sorted keys or CSV with documented columns.  Rerunning
a command with the same configuration produces byte-identical output.

Exit codes: 0 success, 1 configuration error, 2 numeric failure,
3 theorem-assertion failure.
"""

import csv
import io
import json
import sys
from pathlib import Path

import click
import httpx
from pydantic import ValidationError

from .exceptions import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    MeshError,
    OverflowRangeError,
    TheoremCheckFailure,
)
from .schemas import (
    BoundRequest,
    CircleRequest,
    ContourSpec,
    FemRequest,
    SweepRequest,
    VerifyRequest,
)
from . import service

_FLOATS_HELP = "Numbers use repr formatting, so values round-trip exactly."

_CSV_DOC = {
    "circle": "R,omega,k_star,lambda1,residual,k_lower,k_upper,"
    "bracket_strict,defect_value,defect_derivative",
    "sweep": "R,omega,k_star,lambda1,residual",
    "bound": "omega,length,k_star,horizon,circle_quotient,domain_quotient,"
    "vacuous,ordered,lambda1_circle,domain_bound,margin,certified,tolerance",
    "fem": "h,R_out,lambda1,n_dofs,residual,error,order",
    "verify-theorem": "type,R,length,aspect,mode,eps,lambda1_fem,"
    "domain_bound,lambda1_circle,margin,fem_below_bound,"
    "bound_below_circle,passed",
}


def _load_config(path):
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("cannot read config file %s: %s" % (path, exc))
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError("config file %s is not valid JSON: %s" % (path, exc))
    if not isinstance(cfg, dict):
        raise ConfigError("config file %s must hold a JSON object" % path)
    return cfg


def _merge_config(ctx, config_path, values, aliases=()):
    """Overlay a declarative config file on top of flag values.

    The file wins on conflict; every override of an explicitly given
    flag is announced on stderr so reruns stay auditable.
    """
    if not config_path:
        return values
    cfg = _load_config(config_path)
    command = ctx.command.name
    merged = dict(values)
    known = set(values) | set(aliases)
    for key, value in cfg.items():
        if key == "command":
            if value != command:
                raise ConfigError(
                    "config is for command %r, not %r" % (value, command)
                )
            continue
        if key not in known:
            raise ConfigError(
                "config key %r is not accepted by %r" % (key, command)
            )
        if key in values:
            source = ctx.get_parameter_source(key)
            explicit = (
                source is not None
                and source.name == "COMMANDLINE"
                and merged[key] != value
            )
            if explicit:
                click.echo(
                    "warning: config overrides %s=%r with %r"
                    % (key, merged[key], value),
                    err=True,
                )
        merged[key] = value
    return merged


_FAMILY_FIELDS = {
    "circle": ("R",),
    "ellipse": ("length", "aspect"),
    "perturbed": ("length", "mode", "eps"),
}


def _contour_from_values(values):
    """Build a ContourSpec from flat flag values or a nested dict."""
    if values.get("contour") is not None:
        spec = values["contour"]
        if isinstance(spec, str):
            try:
                spec = json.loads(spec)
            except json.JSONDecodeError as exc:
                raise ConfigError("contour is not valid JSON: %s" % exc)
        if not isinstance(spec, dict):
            raise ConfigError("contour must be a JSON object")
        return ContourSpec(**spec)
    kind = values.get("type") or "circle"
    fields = {"type": kind}
    # flags irrelevant to the family keep their defaults; only the
    # family's own fields reach the request model
    for name in _FAMILY_FIELDS.get(kind, ()):
        if values.get(name) is not None:
            fields[name] = values[name]
    return ContourSpec(**fields)


def _post(server, path, request):
    url = server.rstrip("/") + path
    response = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
    response.raise_for_status()
    return response.json()


def _execute(server, path, handler, request):
    if server:
        return _post(server, path, request)
    return handler(request).model_dump(by_alias=True, mode="json")


def _render_json(report):
    return json.dumps(report, sort_keys=True, indent=2)


def _csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buffer.getvalue().rstrip("\n")


def _render_csv(report):
    command = report["command"]
    header = _CSV_DOC[command].split(",")
    if command == "circle":
        rows = [[report[k] for k in header]]
    elif command == "sweep":
        rows = [[row[k] for k in header] for row in report["rows"]]
    elif command == "bound":
        cert = report["certificate"]
        flat = {
            "omega": report["omega"],
            "length": cert["length"],
            "k_star": cert["k_star"],
            "horizon": cert["horizon"],
            "circle_quotient": report["circle_quotient"],
            "domain_quotient": report["domain_quotient"],
            "vacuous": report["vacuous"],
            "ordered": report["ordered"],
            "lambda1_circle": cert["lambda1_circle"],
            "domain_bound": cert["domain_bound"],
            "margin": cert["margin"],
            "certified": cert["certified"],
            "tolerance": cert["tolerance"],
        }
        rows = [[flat[k] for k in header]]
    elif command == "fem":
        rows = [[row[k] for k in header] for row in report["rows"]]
    else:
        rows = []
        for row in report["rows"]:
            contour = row["contour"]
            rows.append(
                [contour.get(k) for k in ("type", "R", "length", "aspect", "mode", "eps")]
                + [
                    row[k]
                    for k in (
                        "lambda1_fem",
                        "domain_bound",
                        "lambda1_circle",
                        "margin",
                        "fem_below_bound",
                        "bound_below_circle",
                        "passed",
                    )
                ]
            )
    return _csv_text(header, rows)


def _emit(report, fmt, output):
    text = _render_json(report) if fmt == "json" else _render_csv(report)
    if output:
        Path(output).write_text(text + "\n")
    else:
        click.echo(text)


def _common_options(func):
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["json", "csv"]),
        default="json",
        show_default=True,
        help="Report format; CSV columns are listed in this command's help.",
    )(func)
    func = click.option(
        "--output", type=click.Path(dir_okay=False), default=None,
        help="Write the report to this file instead of stdout.",
    )(func)
    func = click.option(
        "--config", "config_path", type=click.Path(exists=False), default=None,
        help="JSON config file; its keys win over flags (with a warning).",
    )(func)
    func = click.option(
        "--server", default=None, metavar="URL",
        help="Send the request to a running service instead of solving in process.",
    )(func)
    return func


def _contour_options(func):
    func = click.option(
        "--type", "type", type=click.Choice(["circle", "ellipse", "perturbed"]),
        default="circle", show_default=True, help="Contour family.",
    )(func)
    func = click.option("--R", "R", type=float, default=1.0, show_default=True,
                        help="Circle radius (circle contours).")(func)
    func = click.option("--length", type=float, default=None,
                        help="Perimeter (ellipse and perturbed contours).")(func)
    func = click.option("--aspect", type=float, default=None,
                        help="Axis ratio a/b >= 1 (ellipse contours).")(func)
    func = click.option("--mode", type=int, default=None,
                        help="Angular mode m >= 2 (perturbed contours).")(func)
    func = click.option("--eps", type=float, default=None,
                        help="Perturbation amplitude (perturbed contours).")(func)
    return func


@click.group()
def main():
    """Lowest eigenvalue of the 2D Schrodinger operator with an
    attractive delta-prime interaction on a closed contour."""


@main.command(
    help="Solve the circle secular equation k^2 R I1(kR) K1(kR) = omega.\n\n"
    "CSV columns: " + _CSV_DOC["circle"] + ". " + _FLOATS_HELP
)
@click.option("--R", "R", type=float, default=1.0, show_default=True,
              help="Circle radius.")
@click.option("--omega", type=float, default=1.0, show_default=True,
              help="Interaction strength.")
@click.option("--tol", type=float, default=1e-12, show_default=True,
              help="Root-finding tolerance on k*.")
@_common_options
@click.pass_context
def circle(ctx, R, omega, tol, fmt, output, config_path, server):
    values = _merge_config(ctx, config_path,
                           {"R": R, "omega": omega, "tol": tol})
    request = CircleRequest(**values)
    report = _execute(server, "/circle", service.run_circle, request)
    _emit(report, fmt, output)


@main.command(
    help="Solve the circle problem along an ascending list of radii.\n\n"
    "CSV columns: " + _CSV_DOC["sweep"] + ". One row per radius, input "
    "order preserved. " + _FLOATS_HELP
)
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option("--radii", default=None, metavar="R1,R2,...",
              help="Explicit ascending radii; overrides the range flags.")
@click.option("--r-min", type=float, default=0.1, show_default=True)
@click.option("--r-max", type=float, default=10.0, show_default=True)
@click.option("--count", type=int, default=25, show_default=True)
@click.option("--spacing", type=click.Choice(["linear", "log"]), default="log",
              show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@_common_options
@click.pass_context
def sweep(ctx, omega, radii, r_min, r_max, count, spacing, tol, fmt, output,
          config_path, server):
    values = _merge_config(
        ctx, config_path,
        {"omega": omega, "radii": radii, "r_min": r_min, "r_max": r_max,
         "count": count, "spacing": spacing, "tol": tol},
    )
    if values["radii"] is not None:
        raw = values["radii"]
        if isinstance(raw, str):
            try:
                radii_list = [float(part) for part in raw.split(",") if part.strip()]
            except ValueError as exc:
                raise ConfigError("bad radii list: %s" % exc)
        else:
            radii_list = [float(v) for v in raw]
    else:
        lo, hi, n = values["r_min"], values["r_max"], values["count"]
        if not (0.0 < lo < hi) or n < 2:
            raise ConfigError("need 0 < r-min < r-max and count >= 2")
        if values["spacing"] == "linear":
            step = (hi - lo) / (n - 1)
            radii_list = [lo + step * i for i in range(n)]
        else:
            import math

            ratio = (hi / lo) ** (1.0 / (n - 1))
            radii_list = [lo * ratio**i for i in range(n)]
    request = SweepRequest(omega=values["omega"], radii=radii_list,
                           tol=values["tol"])
    report = _execute(server, "/sweep", service.run_sweep, request)
    _emit(report, fmt, output)


@main.command(
    help="Parallel-coordinate upper bound and certificate for one contour.\n\n"
    "CSV columns: " + _CSV_DOC["bound"] + ". " + _FLOATS_HELP
)
@_contour_options
@click.option("--contour", default=None, metavar="JSON",
              help="Contour as JSON; overrides the family flags.")
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option("--T", "T", type=float, default=None,
              help="Outer horizon for the profile (default: automatic).")
@click.option("--n", type=int, default=1024, show_default=True,
              help="Distance-profile grid size.")
@_common_options
@click.pass_context
def bound(ctx, type, R, length, aspect, mode, eps, contour, omega, T, n, fmt,
          output, config_path, server):
    values = _merge_config(
        ctx, config_path,
        {"type": type, "R": R, "length": length, "aspect": aspect,
         "mode": mode, "eps": eps, "contour": contour, "omega": omega,
         "T": T, "n": n},
    )
    spec = _contour_from_values(values)
    request = BoundRequest(contour=spec, omega=values["omega"], T=values["T"],
                           n=values["n"])
    report = _execute(server, "/bound", service.run_bound, request)
    _emit(report, fmt, output)


@main.command(
    help="Finite-element eigenvalue over a mesh-size refinement.\n\n"
    "CSV columns: " + _CSV_DOC["fem"] + ". One row per (h, R_out) pair; "
    "error and order are filled only when the exact value is known "
    "(circle contours). " + _FLOATS_HELP
)
@_contour_options
@click.option("--contour", default=None, metavar="JSON",
              help="Contour as JSON; overrides the family flags.")
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option("--h", "h", type=float, multiple=True, default=(0.04,),
              show_default=True, help="Mesh size; repeat for a refinement study.")
@click.option("--R-out", "R_out", type=float, multiple=True, default=(6.0,),
              show_default=True, help="Truncation radius; repeatable.")
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Eigenvalue residual tolerance.")
@_common_options
@click.pass_context
def fem(ctx, type, R, length, aspect, mode, eps, contour, omega, h, R_out, tol,
        fmt, output, config_path, server):
    values = _merge_config(
        ctx, config_path,
        {"type": type, "R": R, "length": length, "aspect": aspect,
         "mode": mode, "eps": eps, "contour": contour, "omega": omega,
         "h": list(h), "R_out": list(R_out), "tol": tol},
    )
    spec = _contour_from_values(values)
    request = FemRequest(contour=spec, omega=values["omega"], h=values["h"],
                         R_out=values["R_out"], tol=values["tol"])
    report = _execute(server, "/fem", service.run_fem, request)
    _emit(report, fmt, output)


@main.command(
    "verify-theorem",
    help="Check lambda1(contour) <= bound <= lambda1(circle) + tol for a "
    "contour family; exits 3 if any check fails.\n\n"
    "CSV columns: " + _CSV_DOC["verify-theorem"] + ". One row per contour. "
    + _FLOATS_HELP
)
@click.option("--contour", "contours", multiple=True, metavar="JSON",
              help="Contour as JSON; repeatable. Default: the built-in "
              "family (circle, ellipses, perturbed circles, perimeter 2 pi).")
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option("--h", type=float, default=0.02, show_default=True,
              help="Finite-element mesh size.")
@click.option("--R-out", "R_out", type=float, default=5.0, show_default=True)
@click.option("--tol", type=float, default=1e-4, show_default=True,
              help="Allowance on bound <= lambda1(circle) + tol.")
@click.option("--fem-slack", type=float, default=5e-3, show_default=True,
              help="Discretization allowance on the finite-element value.")
@_common_options
@click.pass_context
def verify_theorem(ctx, contours, omega, h, R_out, tol, fem_slack, fmt, output,
                   config_path, server):
    values = _merge_config(
        ctx, config_path,
        {"contours": list(contours), "omega": omega, "h": h, "R_out": R_out,
         "tol": tol, "fem_slack": fem_slack},
    )
    spec_list = None
    if values["contours"]:
        spec_list = []
        for item in values["contours"]:
            if isinstance(item, str):
                try:
                    item = json.loads(item)
                except json.JSONDecodeError as exc:
                    raise ConfigError("contour is not valid JSON: %s" % exc)
            spec_list.append(ContourSpec(**item))
    request = VerifyRequest(contours=spec_list, omega=values["omega"],
                            h=values["h"], R_out=values["R_out"],
                            tol=values["tol"], fem_slack=values["fem_slack"])
    report = _execute(server, "/verify-theorem", service.run_verify, request)
    _emit(report, fmt, output)
    if not report["passed"]:
        failed = [
            row["contour"]["type"] for row in report["rows"] if not row["passed"]
        ]
        raise TheoremCheckFailure(
            "eigenvalue ordering violated for: %s" % ", ".join(failed)
        )


@main.command(help="Run the HTTP service.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    import uvicorn

    uvicorn.run(service.app, host=host, port=port)


def entrypoint(argv=None):
    """Console entry point translating failures into exit codes."""
    try:
        main(args=argv, prog_name="deltaprime", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except (ConfigError, ValidationError) as exc:
        click.echo("config error: %s" % exc, err=True)
        sys.exit(1)
    except TheoremCheckFailure as exc:
        click.echo("theorem check failed: %s" % exc, err=True)
        sys.exit(3)
    except (DomainError, GeometryError, MeshError, ConvergenceError,
            OverflowRangeError, ArithmeticError) as exc:
        click.echo("numeric failure: %s" % exc, err=True)
        sys.exit(2)
    except httpx.HTTPError as exc:
        click.echo("server error: %s" % exc, err=True)
        sys.exit(2)
    sys.exit(0)
