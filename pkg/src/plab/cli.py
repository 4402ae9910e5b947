"""``plab`` command line front end.

Exit codes: 0 every check passed, 1 a check failed (or a verifier rejected
the input as geometrically invalid), 2 malformed input or configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, data_path
from . import algebra as alg
from . import dirac, fields, frobenius, groupoid, spray
from .transversal import transversal_from_json
from .errors import InputError, PlabError
from .report import _jsonable, threshold_report

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    algebra: str | None = None
    transversal: str | None = None
    rep: str | None = None
    frobenius: str | None = None
    morphism: str | None = None
    dirac: str | None = None
    samples: int = 100
    tol: float | None = None
    fd_step: float | None = None
    seed: int = 42
    out: str | None = None
    format: str = "json"

    def echo(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("out", "format")}
        return dict(sorted(d.items()))


@dataclass
class Report:
    config: RunConfig
    checks: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks) and not self.errors

    def body(self) -> dict:
        return {
            "tool": "plab",
            "version": __version__,
            "config": _jsonable(self.config.echo()),
            "checks": [c.to_dict() for c in self.checks],
            "errors": list(self.errors),
            "pass": self.passed,
        }

    def to_dict(self) -> dict:
        body = self.body()
        body["digest"] = digest(body)
        body["wall_time"] = round(self.wall_time, 6)
        return body

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines += [f"[ERROR] {e}" for e in self.errors]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} (digest {digest(self.body())[:16]})")
        return "\n".join(lines) + "\n"


def digest(body: dict) -> str:
    """SHA-256 of the canonical JSON of a report body (no wall time)."""
    canon = json.dumps({k: v for k, v in body.items() if k not in ("wall_time", "digest")}, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


# input loading ---------------------------------------------------------------


def _read_json(path):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def resolve_algebra(source) -> alg.LieAlgebra:
    """A JSON file path, or the name of a catalogued algebra."""
    if source is None:
        raise InputError("--algebra is required for this command")
    if not Path(source).is_file() and source in alg.CATALOG:
        return alg.CATALOG[source]()
    return alg.algebra_from_json(_read_json(source))


def _need(value, flag):
    if value is None:
        raise InputError(f"{flag} is required for this command")
    return value


def _tol(cfg, default):
    return default if cfg.tol is None else cfg.tol


# commands ------------------------------------------------------------------------


def cmd_jacobi(cfg: RunConfig) -> list:
    L = resolve_algebra(cfg.algebra)
    alg.check_antisymmetry(L)
    mx, _ = alg.jacobiator(L)
    tol = _tol(cfg, 0.0 if L.is_integral() else 1e-12)
    checks = [threshold_report("jacobiator", float(mx), tol)]
    field_ = fields.lie_poisson_field(L)
    sch = fields.schouten_poly(field_, field_)
    checks.append(threshold_report("schouten_self_bracket", 0.0 if sch.is_zero() else 1.0, 0.0, notes=["exact polynomial arithmetic"]))
    return checks


def cmd_normal_form(cfg: RunConfig) -> list:
    L = resolve_algebra(cfg.algebra)
    T = transversal_from_json(L, _read_json(_need(cfg.transversal, "--transversal")))
    tol = _tol(cfg, 1e-6)
    nf = spray.verify_normal_form(T, cfg.samples, tol, cfg.seed, fd_step=cfg.fd_step)
    rng = np.random.default_rng(cfg.seed)
    pts = spray.sample_ball(rng, T.n, spray.default_radius(T.base), min(cfg.samples, 20))
    closed = spray.check_closed(spray.omega_V_on_conormal(T, fd_step=cfg.fd_step), pts, tol, "omega_V_closed", cfg.seed)
    fibre = threshold_report("omega_V_fibre_block", spray.fibre_block_check(T), 1e-9)
    return [nf, closed, fibre]


def cmd_dual_pair(cfg: RunConfig) -> list:
    L = resolve_algebra(cfg.algebra)
    tol = _tol(cfg, 1e-6)
    return [
        spray.verify_dual_pair(L, cfg.samples, tol, cfg.seed, fd_step=cfg.fd_step),
        spray.verify_omega_g_closed(L, min(cfg.samples, 20), tol, cfg.seed, fd_step=cfg.fd_step),
    ]


def cmd_poisson_map(cfg: RunConfig) -> list:
    Lg = resolve_algebra(cfg.algebra)
    data = _read_json(_need(cfg.morphism, "--morphism"))
    try:
        Lh = resolve_algebra(data["target"]) if isinstance(data["target"], str) else alg.algebra_from_json(data["target"])
        f = np.array(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed morphism JSON: {exc}") from exc
    if f.shape != (Lh.n, Lg.n):
        raise InputError(f"morphism matrix must have shape ({Lh.n}, {Lg.n})")
    X = transversal_from_json(Lg, _read_json(_need(cfg.transversal, "--transversal")))
    return [spray.poisson_map_normal_form(Lg, Lh, f, X, cfg.samples, _tol(cfg, 1e-6), cfg.seed)]


def cmd_groupoid(cfg: RunConfig) -> list:
    L = resolve_algebra(cfg.algebra)
    rep = groupoid.load_rep(L, cfg.rep) if cfg.rep else groupoid.standard_rep(L)
    T = transversal_from_json(L, _read_json(_need(cfg.transversal, "--transversal")))
    tol = _tol(cfg, 1e-6)
    h = cfg.fd_step or 1e-5
    checks = [
        groupoid.check_groupoid_axioms(rep, 10 * cfg.samples, _tol(cfg, 1e-10), cfg.seed),
        groupoid.check_multiplicative(rep, samples=cfg.samples, tol=tol, seed=cfg.seed, h=h),
        groupoid.check_restriction(groupoid.restrict_to_transversal(rep, T), min(cfg.samples, 20), cfg.seed),
    ]
    model = groupoid.build_pullback_model(T, rep=rep)
    checks += model.certify(min(cfg.samples, 50), tol, cfg.seed, h=h)
    for c in checks:
        c.notes.append("the isomorphism with the restricted action groupoid is not constructed")
    return checks


def cmd_frobenius(cfg: RunConfig) -> list:
    L = resolve_algebra(cfg.algebra)
    P = frobenius.frobenius_from_json(L, _read_json(_need(cfg.frobenius, "--frobenius")))
    return [
        frobenius.weinstein_splitting_check(P, cfg.samples, _tol(cfg, 1e-6), cfg.seed, fd_step=cfg.fd_step),
        frobenius.check_vorobjev(P, cfg.samples, _tol(cfg, 1e-5), cfg.seed, fd_step=cfg.fd_step),
        frobenius.transverse_quadraticity(P, tol=_tol(cfg, 1e-8)),
    ]


def cmd_dirac(cfg: RunConfig) -> list:
    """Apply a list of operations to a linear Dirac structure.

    Input: ``{"structure": {...}, "ops": [{"gauge": M} | {"backward": f} |
    {"forward": f}, ...]}`` where ``f`` has shape (target dim, source dim).
    """
    data = _read_json(_need(cfg.dirac, "--dirac"))
    try:
        D = dirac.from_json(data["structure"])
        for op in data.get("ops", []):
            ((kind, arg),) = op.items()
            arg = np.array(arg, dtype=float)
            if kind == "gauge":
                D = dirac.gauge(D, arg)
            elif kind == "backward":
                D = dirac.backward_image(arg, D)
            elif kind == "forward":
                D = dirac.forward_image(arg, D)
            else:
                raise InputError(f"unknown Dirac operation {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed Dirac JSON: {exc}") from exc
    extra = {"dim": D.n, "basis": np.round(D.basis, 12)}
    try:
        extra["bivector"] = np.round(dirac.as_bivector(D), 12)
    except PlabError:
        extra["bivector"] = None
    return [threshold_report("dirac_isotropy", D.isotropy_error(), _tol(cfg, 1e-10), extra=extra)]


COMMANDS = {
    "jacobi": cmd_jacobi,
    "normal-form": cmd_normal_form,
    "dual-pair": cmd_dual_pair,
    "poisson-map": cmd_poisson_map,
    "groupoid": cmd_groupoid,
    "frobenius": cmd_frobenius,
    "dirac": cmd_dirac,
}


# driver ----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="algebra JSON file or catalogue name (so3, sl2, ...)")
    common.add_argument("--transversal")
    common.add_argument("--rep")
    common.add_argument("--frobenius")
    common.add_argument("--morphism")
    common.add_argument("--dirac")
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--tol", type=float)
    common.add_argument("--fd-step", type=float)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "text"), default="json")
    parser = _Parser(prog="plab", description="Verify normal forms around Poisson transversals.")
    parser.add_argument("--version", action="version", version=f"plab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else None)
    sub.add_parser("fixtures", help="print the directory of shipped JSON fixtures")
    return parser


def run(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    start = time.perf_counter()
    try:
        rep.checks = COMMANDS[cfg.command](cfg)
    except InputError:
        raise
    except PlabError as exc:
        # geometric rejection of a well-formed input counts as a failed check
        rep.errors.append(f"{type(exc).__name__}: {exc}")
    rep.wall_time = time.perf_counter() - start
    return rep


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fixtures":
        print(data_path())
        return EXIT_PASS
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    if cfg.samples < 1 or (cfg.tol is not None and cfg.tol <= 0) or (cfg.fd_step is not None and cfg.fd_step <= 0):
        print("plab: error: samples must be >= 1, tol > 0 and fd-step > 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep = run(cfg)
    except (InputError, OSError) as exc:
        print(f"plab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n" if cfg.format == "json" else rep.text()
    if cfg.out:
        Path(cfg.out).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
