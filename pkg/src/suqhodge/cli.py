"""Command-line front end: spectra, verification suites and the commutator experiment.

Exit codes: 0 on success, 1 when a cross-check or verification fails, 2 on usage
errors (click's convention).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field

import click

from . import __version__
from . import calculus as cal
from . import corep, suites
from . import spectral as sp

__all__ = ["RunConfig", "main", "spectrum_rows"]

CSV_COLUMNS = ("M", "k2", "grade", "block_dim", "eig_index", "eigenvalue", "method", "residual")
COMMUTATOR_MAX_M = 15  # products need W^{M+1}; beyond this the exact fits get slow


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    tol: float = 1e-9
    max_M: int = 9
    seed: int = 42
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out = asdict(self)
        out.update(out.pop("extra"))
        return out


def _closed_form(q: float, M: int, k2: int, grade: int) -> list[float]:
    if grade in (1, 2):
        return sp.eigen_closed_form(q, M, k2)
    return [corep.nu(q, M, k2)] if corep.in_range(M, k2) else []


def spectrum_rows(cfg: RunConfig, grades: list[int], oracle: bool) -> tuple[list[dict], float]:
    """Table rows for every block ``(M, k)`` with ``M <= max_M``; also the worst residual."""
    calc = cal.get_calculus(cfg.q)
    rows: list[dict] = []
    worst = 0.0
    for M in range(1, cfg.max_M + 1):
        for k2 in sp.block_ks(M):
            dims = sp.block_dims(M, k2)
            for grade in grades:
                closed = _closed_form(cfg.q, M, k2, grade)
                if not closed:
                    continue
                residual = None
                brute: list[float] = []
                if oracle:
                    brute = sp.laplacian_block_bruteforce(calc, M, k2, grade=grade)
                    residual = sp.match_spectra(brute, closed, 1e-14)
                    worst = max(worst, residual)
                for method, vals in (("closed-form", closed), ("brute-force", brute)):
                    for i, v in enumerate(sorted(vals)):
                        rows.append(
                            {
                                "M": M,
                                "k2": k2,
                                "grade": grade,
                                "block_dim": dims[grade],
                                "eig_index": i,
                                "eigenvalue": float(v),
                                "method": method,
                                "residual": residual,
                            }
                        )
    return rows, worst


def _render_rows(rows: list[dict], fmt: str, cfg: RunConfig, extra: dict | None = None) -> str:
    if fmt == "json":
        payload = {"config": cfg.echo(), "rows": rows}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    cols = list(rows[0].keys()) if rows else list(CSV_COLUMNS)
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _fmt(v: object) -> object:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


_common = [
    click.option("--q", "q", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), default=0.5, show_default=True),
    click.option("--tol", type=click.FloatRange(0.0, min_open=True), default=1e-9, show_default=True),
    click.option("--seed", type=int, default=42, show_default=True),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
    click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write to PATH instead of stdout."),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Hodge Laplacian spectra of the 3D calculus on quantum SU(2)."""


@main.command()
@common_options
@click.option("--max-M", "max_M", type=click.IntRange(min=1), default=9, show_default=True)
@click.option("--grade", type=click.IntRange(0, 3), default=None, help="Only this form degree (default: all).")
@click.option("--oracle", is_flag=True, help="Also emit brute-force eigenvalues and cross-check residuals.")
def spectrum(q: float, tol: float, seed: int, fmt: str, out: str | None, max_M: int, grade: int | None, oracle: bool) -> None:
    """Laplacian eigenvalues per block (M, k) and degree."""
    grades = [grade] if grade is not None else [0, 1, 2, 3]
    cfg = RunConfig(q, tol, max_M, seed, fmt, {"grade": grade, "oracle": oracle})
    rows, worst = spectrum_rows(cfg, grades, oracle)
    _emit(_render_rows(rows, fmt, cfg), out)
    if oracle and worst > tol:
        bad = next(r for r in rows if r["residual"] is not None and r["residual"] > tol)
        click.echo(f"cross-check failed: block M={bad['M']} k2={bad['k2']} grade={bad['grade']} residual {worst:.3g} > tol {tol:g}", err=True)
        sys.exit(1)


@main.command()
@common_options
@click.option("--max-M", "max_M", type=click.IntRange(min=1), default=9, show_default=True)
@click.option("--suite", type=click.Choice(sorted(suites.SUITES) + ["all"]), default="all", show_default=True)
def verify(q: float, tol: float, seed: int, fmt: str, out: str | None, max_M: int, suite: str) -> None:
    """Run a named verification suite; exit 1 if any check fails."""
    cfg = RunConfig(q, tol, max_M, seed, fmt, {"suite": suite})
    results = suites.run_suite(suite, q, max_M, seed, tol)
    rows = [{"check": r.name, "status": "pass" if r.passed else "FAIL", "residual": r.residual, "threshold": r.threshold, "detail": r.detail} for r in results]
    _emit(_render_rows(rows, fmt, cfg), out)
    failed = [r for r in results if not r.passed]
    for r in failed:
        click.echo(f"FAIL {r.name}: residual {r.residual:.3g} ({r.detail})", err=True)
    if failed:
        sys.exit(1)


@main.command()
@common_options
@click.option("--max-M", "max_M", type=click.IntRange(min=1), default=9, show_default=True)
@click.option("--a", "a", type=click.Choice(["alpha", "gamma"]), required=True, help="Multiplication operator L_a.")
@click.option("--beta", type=click.FloatRange(min=0.0), default=0.5, show_default=True)
@click.option("--delta", type=click.FloatRange(min=0.0), default=0.5, show_default=True)
def commutator(q: float, tol: float, seed: int, fmt: str, out: str | None, max_M: int, a: str, beta: float, delta: float) -> None:
    """Per-truncation suprema of ||R^beta [L_a, d] R^delta|| on the blocks G(M, k)."""
    if max_M > COMMUTATOR_MAX_M:
        raise click.UsageError(f"--max-M {max_M} exceeds the product range: needs W^{max_M + 1}, limit is M <= {COMMUTATOR_MAX_M}")
    cfg = RunConfig(q, tol, max_M, seed, fmt, {"a": a, "beta": beta, "delta": delta})
    calc = cal.Calculus(q, "twisted", 1e-13, max(max_M + 1, 2))
    rep = sp.commutator_norm(calc, a, beta, delta, max_M)
    rows = [{"M": M, "sup_norm": s} for M, s in enumerate(rep.suprema, start=1)]
    growth = rep.plateau()
    summary = {
        "flagged_outside_proven_regime": rep.flagged,
        "tail_growth_relative": growth,
        "plateau": (not rep.flagged) and growth < 1e-3,
        "C": rep.constant,
        "C_m1_requirement": rep.m1_requirement,
        "C_adjusted": rep.adjusted_constant,
        "resolvent_bound_violations": [list(v) for v in rep.resolvent_violations],
    }
    if fmt == "json":
        _emit(_render_rows(rows, fmt, cfg, {"summary": summary}), out)
    else:
        _emit(_render_rows(rows, fmt, cfg), out)
        for key, value in summary.items():
            click.echo(f"# {key}: {value}", err=True)
    if rep.flagged:
        click.echo(f"note: beta + delta = {beta + delta:g} lies outside the proven regime beta + delta = 1", err=True)
    if rep.resolvent_violations:
        sys.exit(1)


if __name__ == "__main__":  # pragma: no cover
    main()
