"""Command-line front end: catalog listing, verification runs, flows,
eigenvalue checks and report conversion.

Exit codes: 0 all verdicts pass, 1 at least one violation (the report is
still written), 2 usage or configuration errors.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from conelift import catalog, engine, flow, verify


def _default_backend():
    return os.environ.get("CONELIFT_BACKEND", engine.JET)


def _parse_radii(text):
    try:
        radii = tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise click.UsageError(f"bad radii list {text!r}")
    if not radii or any(r <= 0 for r in radii):
        raise click.UsageError("radii must be positive reals")
    return radii


def _parse_overrides(pairs):
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"tolerance override {pair!r} is not IDENT=VALUE")
        ident, val = pair.split("=", 1)
        try:
            out[ident] = float(val)
        except ValueError:
            raise click.UsageError(f"bad tolerance value in {pair!r}")
    return out


def _build_entry(name):
    try:
        return catalog.build(name)
    except KeyError as exc:
        raise click.UsageError(str(exc))
    except FileNotFoundError as exc:
        raise click.UsageError(f"fixture file missing for {name!r}: {exc}")


@click.group()
def main():
    """Numerical verification of cone-lift identities and biharmonic flows."""


@main.command("catalog")
@click.option("--json", "as_json", is_flag=True, help="machine-readable listing")
def catalog_cmd(as_json):
    """List catalog entries with declared flags."""
    items = []
    for name in catalog.entry_names():
        try:
            entry = catalog.build(name)
        except FileNotFoundError:
            items.append({"name": name, "available": False})
            continue
        items.append({"name": name, "available": True, "m": entry.m,
                      "contact_sphere": entry.in_contact_sphere,
                      "expected": entry.expected, "notes": entry.notes})
    if as_json:
        click.echo(json.dumps(items, indent=2, sort_keys=True))
        return
    for item in items:
        if not item["available"]:
            click.echo(f"{item['name']:32s} (fixture missing)")
            continue
        flags = ", ".join(f"{k}={v}" for k, v in sorted(item["expected"].items()))
        click.echo(f"{item['name']:32s} m={item['m']} {flags}")
        click.echo(f"{'':32s}   {item['notes']}")


def _run_config(radii, samples, backend, seed, tolerance):
    try:
        return verify.RunConfig(radii=_parse_radii(radii), samples=samples,
                                seed=seed, backend=backend,
                                tolerance_overrides=_parse_overrides(tolerance))
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _emit(reports, fmt, output):
    if fmt == "json":
        if len(reports) == 1:
            text = reports[0].to_json()
        else:
            doc = {"schema": verify.SCHEMA_VERSION,
                   "reports": [r.as_dict() for r in reports]}
            text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = verify.reports_to_csv(reports)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("verify")
@click.option("--entry", "entries", multiple=True, required=True,
              help="catalog entry name, or 'all'")
@click.option("--radii", default="0.5,1,2,5", show_default=True)
@click.option("--samples", default=10, show_default=True, type=int)
@click.option("--backend", default=_default_backend,
              type=click.Choice([engine.JET, engine.CENTRAL]))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--tolerance", multiple=True,
              help="per-identity override IDENT=VALUE (repeatable)")
@click.option("--format", "fmt", default="json",
              type=click.Choice(["json", "csv"]), show_default=True)
@click.option("--output", default=None, help="write the report here")
def verify_cmd(entries, radii, samples, backend, seed, tolerance, fmt, output):
    """Run the full identity/classification suite on catalog entries."""
    rcfg = _run_config(radii, samples, backend, seed, tolerance)
    if "all" in entries:
        names = catalog.entry_names()
    else:
        names = list(entries)
    reports = []
    for name in names:
        entry = _build_entry(name)
        rep = verify.full_report(entry, rcfg)
        reports.append(rep)
        click.echo(f"{name}: {'pass' if rep.passed else 'FAIL'} "
                   f"({rep.wall_time:.1f}s)", err=True)
        for row in rep.rows:
            if row.verdict in ("fail", "error"):
                click.echo(f"  {row.verdict}: {row.identity} "
                           f"residual={row.residual_max:.3e} {row.note}",
                           err=True)
    _emit(reports, fmt, output)
    sys.exit(0 if all(r.passed for r in reports) else 1)


@main.command("takahashi")
@click.option("--entry", required=True)
@click.option("--samples", default=10, show_default=True, type=int)
@click.option("--backend", default=_default_backend,
              type=click.Choice([engine.JET, engine.CENTRAL]))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--format", "fmt", default="json",
              type=click.Choice(["json", "csv"]), show_default=True)
@click.option("--output", default=None)
def takahashi_cmd(entry, samples, backend, seed, fmt, output):
    """Run only the coordinate-Laplacian eigenvalue check."""
    rcfg = _run_config("0.5,1,2,5", samples, backend, seed, ())
    ent = _build_entry(entry)
    rows = verify.takahashi_check(ent, rcfg)
    rep = verify.VerificationReport(entry=ent.name, backend=backend, seed=seed,
                                    radii=rcfg.radii, samples=samples,
                                    rows=rows)
    _emit([rep], fmt, output)
    sys.exit(0 if rep.passed else 1)


@main.command("flow")
@click.option("--config", "config_path", required=True,
              help="JSON file with the flow run configuration")
@click.option("--output", default=None, help="fixture path (overrides config)")
def flow_cmd(config_path, output):
    """Run the discrete gradient flow and serialize the resulting curve."""
    try:
        with open(config_path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read flow config: {exc}")
    out_path = output or raw.pop("output", None)
    if out_path is None:
        raise click.UsageError("flow needs an --output path or 'output' key")
    start_kind = raw.pop("start", "perturbed-helix")
    K = int(raw.pop("K", 128))
    try:
        fcfg = flow.FlowConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(f"bad flow config: {exc}")
    if start_kind == "perturbed-helix":
        start = catalog.fixture_start_curve(K)
    elif start_kind == "great-circle":
        t = np.arange(K) * 2.0 * np.pi / K
        pts = np.zeros((K, 4))
        pts[:, 0] = np.cos(t)
        pts[:, 2] = np.sin(t)
        start = flow.DiscreteCurve(pts)
    else:
        raise click.UsageError(f"unknown start curve {start_kind!r}")
    final, log = flow.flow(start, fcfg)
    e, e2, pen = flow.discrete_functionals(final)
    flow.save_curve(out_path, final, cfg=fcfg,
                    provenance=f"cli flow from {start_kind}, seed {fcfg.seed}")
    summary = {"iterations": len(log), "energy": e, "bienergy": e2,
               "contact_penalty": pen,
               "final_grad_norm": log[-1]["grad_norm"],
               "monotone": all(a["objective"] >= b["objective"]
                               for a, b in zip(log, log[1:])),
               "output": out_path}
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    sys.exit(0)


@main.command("report")
@click.option("--input", "input_path", required=True,
              help="JSON report produced by 'verify'")
@click.option("--format", "fmt", default="csv",
              type=click.Choice(["csv"]), show_default=True)
@click.option("--output", default=None)
def report_cmd(input_path, fmt, output):
    """Convert a JSON report document into the flat table form."""
    try:
        with open(input_path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read report: {exc}")
    docs = doc.get("reports", [doc]) if isinstance(doc, dict) else doc
    reports = []
    for d in docs:
        rows = [verify.Row(entry=r["entry"], identity=r["identity"],
                           residual_max=r["residual_max"],
                           residual_mean=r["residual_mean"],
                           tolerance=r["tolerance"], verdict=r["verdict"],
                           note=r.get("note", ""),
                           points=r.get("grid", {}).get("points", 0),
                           radii=tuple(r.get("grid", {}).get("radii", ())))
                for r in d["rows"]]
        reports.append(verify.VerificationReport(
            entry=d["entry"], backend=d["backend"], seed=d["seed"],
            radii=tuple(d["radii"]), samples=d["samples"], rows=rows))
    _emit(reports, fmt, output)
    sys.exit(0)


if __name__ == "__main__":
    main()
