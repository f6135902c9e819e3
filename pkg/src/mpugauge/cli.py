"""Command-line entry point: run the analysis pipeline on a builtin or
JSON-described model and write machine-readable reports.

Exit codes: 0 success, 2 verification failure, 3 input error, 4 resource
guard tripped.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import defects, gauging, models, symmetry
from .errors import MpuGaugeError, TooLarge

SCHEMA = "mpu-gauge/1"

EXIT_VERIFY = 2
EXIT_INPUT = 3
EXIT_GUARD = 4

ALL_ANALYSES = ("rep", "fusion", "defects", "bi", "gauging", "projectors")


def _c(z):
    """JSON-friendly complex scalar."""
    z = complex(z)
    return [z.real, z.imag]


def _round(x, nd=12):
    return float(np.round(float(x), nd))


def _phase_table(table):
    return {",".join(map(str, k)): _c(v)
            for k, v in sorted(table.values.items())}


def _dense_block_state(mps, n):
    out = 0
    for b in mps.blocks:
        cur = b
        for _ in range(n - 1):
            cur = np.einsum("pab,qbc->pqac",
                            cur.reshape(-1, b.shape[1], b.shape[2]), b)
            s = cur.shape
            cur = cur.reshape(s[0] * s[1], s[2], s[3])
        out = np.einsum("paa->p", cur) + out
    return out


def run_pipeline(model, tol=1e-9, sites=None, analyses=ALL_ANALYSES):
    """Full analysis: representation canonicalization, fusion data and
    anomaly, action tensors and L-symbols, defect system, block
    independence, both gaugings, and projector diagnostics.

    Returns (report dict, artifacts dict).  Artifacts hold the live
    objects (rep, defect system, laws) for further use.
    """
    report = {"schema": SCHEMA, "model": model.name, "tolerance": tol,
              "stages": {}}
    art = {}
    rep = symmetry.build_rep(model, tol=tol)
    art["rep"] = rep
    group = rep.group
    nb = len(rep.mps.blocks)
    report["stages"]["rep"] = {
        "group_order": group.order,
        "physical_dim": rep.d,
        "blocks": nb,
        "bond_dims": [rep.mps.blocks[x].shape[1] for x in range(nb)],
        "blocking": rep.blocking,
        "sigma": {str(g): _round(s.real) for g, s in rep.sigma.items()},
    }
    if "fusion" in analyses:
        omega = symmetry.compute_omega(rep, tol=tol)
        zeta = symmetry.compute_zeta(rep, tol=tol)
        art["omega"] = omega
        nontrivial = any(abs(v - 1.0) > 1e-6 for v in omega.values.values())
        report["stages"]["fusion"] = {
            "omega": _phase_table(omega),
            "anomalous": nontrivial,
            "zeta": _phase_table(zeta),
        }
    if "defects" in analyses or "bi" in analyses or "gauging" in analyses:
        ad = defects.fix_gauge(defects.action_tensors(rep, tol=tol),
                               tol=tol)
        ds = defects.build_defect_system(ad, tol=tol)
        art["ds"] = ds
        report["stages"]["defects"] = {
            "L": _phase_table(ad.L),
            "xi": {f"{g},{x}": s for (g, x), s in sorted(ad.xi.items())},
            "gauge_certificate": ad.certificate,
            "checks": {k: _round(v) for k, v in ds.checks.items()},
        }
    if "bi" in analyses:
        verdict = defects.block_independence(ad, tol=tol)
        art["bi"] = verdict
        report["stages"]["bi"] = {
            k: (v if not isinstance(v, complex) else _c(v))
            for k, v in verdict.items()
            if k not in ("psi", "extension")
        }
    if "gauging" in analyses:
        gm = gauging.promote(ds)
        law = gauging.gauss_laws(ds)
        art["gauged"] = gm
        art["law"] = law
        n = sites or _default_sites(gm)
        stage = {"sites": n,
                 "representation_residual":
                     _round(law.representation_residual()),
                 "unitarity_residual": _round(law.unitarity_residual())}
        try:
            stage["invariance_residual"] = _round(
                gauging.check_local_invariance(gm, law, n))
            neutral = gauging.project_to_neutral(gm, n)
            orig = _dense_block_state(rep.mps, n)
            stage["neutral_projection_residual"] = _round(
                np.linalg.norm(neutral - orig))
        except TooLarge as exc:
            stage["invariance_residual"] = f"skipped: {exc}"
        if art.get("bi", {}).get("bi") is False:
            try:
                lam_t, mlaw = gauging.state_level_gauging(ds, tol=tol)
                art["modified_law"] = mlaw
                art["lambda_tilde"] = lam_t
                stage["modified_invariance_residual"] = _round(
                    gauging.check_local_invariance(gm, mlaw, n))
            except MpuGaugeError as exc:
                stage["modified_law_error"] = (
                    f"{type(exc).__name__}: {exc}")
        report["stages"]["gauging"] = stage
    if "projectors" in analyses and "law" in art:
        rpt = gauging.projector_report(art["law"])
        report["stages"]["projectors"] = rpt.to_json_dict()
        if "modified_law" in art:
            report["stages"]["projectors_modified"] = (
                gauging.projector_report(art["modified_law"])
                .to_json_dict())
    if model.expected:
        report["expected"] = _expected_json(model.expected)
    return report, art


def _default_sites(gm):
    n = 4
    while (gm.n_gauge * gm.d) ** n > gauging.DENSE_GUARD and n > 2:
        n -= 1
    return n


def _expected_json(expected):
    out = {}
    for k, v in expected.items():
        if isinstance(v, np.ndarray):
            continue
        if isinstance(v, dict):
            out[k] = {str(kk): (_c(vv) if isinstance(vv, complex) else vv)
                      for kk, vv in v.items()}
        else:
            out[k] = v
    return out


def verify_report(report, tol=1e-9):
    """Threshold checks over a pipeline report; returns a list of failure
    strings (empty = pass)."""
    fails = []
    stages = report["stages"]

    def check(cond, what):
        if not cond:
            fails.append(what)

    if "defects" in stages:
        for name, resid in stages["defects"]["checks"].items():
            check(resid < 1e-8, f"defect check '{name}' residual {resid}")
    if "gauging" in stages:
        g = stages["gauging"]
        check(g["representation_residual"] < 1e-9,
              f"Gauss law composition residual "
              f"{g['representation_residual']}")
        check(g["unitarity_residual"] < 1e-9,
              f"Gauss law unitarity residual {g['unitarity_residual']}")
        inv = g.get("invariance_residual")
        mod = g.get("modified_invariance_residual")
        if isinstance(inv, float):
            bi = stages.get("bi", {}).get("bi")
            if bi is False:
                check(inv > 1e-2, "standard law unexpectedly invariant on "
                                  "a block-dependent model")
                if mod is not None:
                    check(mod < 1e-8,
                          f"modified law invariance residual {mod}")
            elif bi is True:
                check(inv < 1e-8, f"invariance residual {inv}")
    if "projectors" in stages:
        p = stages["projectors"]
        check(p["hermiticity"] < 1e-9,
              f"projector hermiticity {p['hermiticity']}")
        check(p["idempotency"] < 1e-9,
              f"projector idempotency {p['idempotency']}")
        anomalous = stages.get("fusion", {}).get("anomalous")
        if anomalous:
            check(p["commutator"] > 0.05,
                  "anomalous model without witnessed projector "
                  "noncommutation")
        elif anomalous is False:
            check(p["commuting"], f"projector commutator {p['commutator']}")
    return fails


@click.group()
def main():
    """Analyze and gauge MPU-symmetric matrix product states."""


_shared = [
    click.option("--model", "source", required=True,
                 help="builtin model name or path to a model JSON file"),
    click.option("--tol", default=1e-9, show_default=True,
                 help="numerical tolerance for all pipeline stages"),
    click.option("--sites", default=None, type=int,
                 help="chain length for dense checks (default: largest "
                      "within the memory guard)"),
    click.option("--seed", default=0, show_default=True),
    click.option("--out", default=None, type=click.Path(),
                 help="write the JSON report here instead of stdout"),
]


def shared_options(f):
    for opt in reversed(_shared):
        f = opt(f)
    return f


def _load(source, seed):
    try:
        return models.load_model(source, seed=seed)
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _guard_errors(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except TooLarge as exc:
        click.echo(f"resource guard: {exc}", err=True)
        sys.exit(EXIT_GUARD)
    except MpuGaugeError as exc:
        click.echo(f"pipeline failure in {type(exc).__name__}: {exc}",
                   err=True)
        sys.exit(EXIT_VERIFY)


@main.command()
@shared_options
@click.option("--analyses", default=",".join(ALL_ANALYSES),
              show_default=True, help="comma-separated stage list")
def analyze(source, tol, sites, seed, out, analyses):
    """Run the full pipeline and emit a JSON report."""
    if tol <= 0:
        click.echo("input error: tolerance must be positive", err=True)
        sys.exit(EXIT_INPUT)
    model = _load(source, seed)
    wanted = tuple(a.strip() for a in analyses.split(",") if a.strip())
    bad = [a for a in wanted if a not in ALL_ANALYSES]
    if bad:
        click.echo(f"input error: unknown analyses {bad}", err=True)
        sys.exit(EXIT_INPUT)
    report, _ = _guard_errors(run_pipeline, model, tol=tol, sites=sites,
                              analyses=wanted)
    _emit(report, out)


@main.command()
@shared_options
def verify(source, tol, sites, seed, out):
    """Run the invariant suite; exit 0 iff every check passes."""
    model = _load(source, seed)
    report, _ = _guard_errors(run_pipeline, model, tol=tol, sites=sites)
    fails = verify_report(report, tol=tol)
    payload = {"schema": SCHEMA, "model": model.name,
               "passed": not fails, "failures": fails}
    _emit(payload, out)
    if fails:
        sys.exit(EXIT_VERIFY)


@main.command()
@shared_options
def gauge(source, tol, sites, seed, out):
    """Write the gauged tensor, Gauss-law matrices, and (when built) the
    modified fusion operators as JSON."""
    model = _load(source, seed)
    report, art = _guard_errors(run_pipeline, model, tol=tol, sites=sites)
    gm = art["gauged"]
    law = art["law"]
    payload = {
        "schema": SCHEMA,
        "model": model.name,
        "gauged_tensor": {
            "legs": ["gauge", "physical", "left", "right"],
            "shape": list(gm.tensor.shape),
            "offsets": [int(o) for o in gm.offsets],
            "data": [[z.real, z.imag] for z in gm.tensor.ravel()],
        },
        "gauss_law": {
            "variant": law.variant,
            "window": ["gauge_L", "matter_1", "matter_2", "gauge_R"],
            "blocks": _law_json(law),
        },
        "bi": report["stages"].get("bi"),
    }
    if "lambda_tilde" in art:
        payload["lambda_tilde"] = {
            f"{g},{h}": [[z.real, z.imag] for z in lam.ravel()]
            for (g, h), lam in sorted(art["lambda_tilde"].items())
        }
    _emit(payload, out)


def _law_json(law):
    out = {}
    for g in law.group.elements():
        entries = []
        for (a, b), (an, bn, lam) in sorted(law.blocks[g].items()):
            entries.append({
                "gauge_in": [a, b], "gauge_out": [an, bn],
                "matter": [[z.real, z.imag] for z in lam.ravel()],
            })
        out[str(g)] = entries
    return out


if __name__ == "__main__":
    main()
