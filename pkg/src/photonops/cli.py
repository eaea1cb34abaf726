"""Command-line entry point: ``photonops {pnd,wigner,q-sweep,figure,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage or I/O error,
3 the requested operation annihilates the state.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from dataclasses import dataclass, fields
from typing import Optional

from .errors import NullState, PhotonOpsError
from .figures import ECS_SWEEP, FIGURES, THERMAL_SWEEP, GridConfig, SweepConfig, pnd_table, q_sweep_table, run_figure, wigner_table
from .fock import DEFAULT_TAIL_TOL, OpSequence, Order
from .states import Family, StateSpec

log = logging.getLogger("photonops")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NULL = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: Family = Family.THERMAL
    order: Order = Order.ADD_THEN_SUBTRACT
    p: int = 0
    q: int = 0
    nbar: float = 0.25
    alpha_re: float = 1.0
    alpha_im: float = 0.0
    grid_min: float = -3.0
    grid_max: float = 3.0
    grid_points: int = 81
    sweep_min: Optional[float] = None
    sweep_max: Optional[float] = None
    sweep_points: int = 50
    out: Optional[str] = None
    format: str = "csv"
    tail_tol: float = DEFAULT_TAIL_TOL
    workers: int = 1
    figure: Optional[int] = None
    cutoff_scale: int = 1

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("--p and --q must be nonnegative")
        if self.nbar < 0:
            raise ValueError("--nbar must be nonnegative")
        if self.grid_points < 2:
            raise ValueError("--grid-points must be at least 2")
        if not self.grid_min < self.grid_max:
            raise ValueError("--grid-min must be below --grid-max")
        if not 0 < self.tail_tol < 1:
            raise ValueError("--tail-tol must lie in (0, 1)")
        if self.workers < 1 or self.cutoff_scale < 1:
            raise ValueError("--workers and --cutoff-scale must be positive")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        kw = {k: v for k, v in vars(ns).items() if k in names and v is not None}
        if "family" in kw:
            kw["family"] = Family.parse(kw["family"])
        if "order" in kw:
            kw["order"] = Order.parse(kw["order"])
        return cls(**kw)

    @property
    def spec(self) -> StateSpec:
        if self.family is Family.THERMAL:
            return StateSpec.thermal(self.nbar)
        return StateSpec.even_coherent(complex(self.alpha_re, self.alpha_im))

    @property
    def seq(self) -> OpSequence:
        return OpSequence(self.p, self.q, self.order)

    @property
    def grid(self) -> GridConfig:
        return GridConfig(self.grid_min, self.grid_max, self.grid_points)

    @property
    def sweep(self) -> SweepConfig:
        default = THERMAL_SWEEP if self.family is Family.THERMAL else ECS_SWEEP
        lo = default.sweep_min if self.sweep_min is None else self.sweep_min
        hi = default.sweep_max if self.sweep_max is None else self.sweep_max
        return SweepConfig(lo, hi, self.sweep_points)


def _state_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--family", choices=["thermal", "ecs"], default="thermal")
    sp.add_argument("--order", choices=["sa", "as"], default="sa",
                    help="sa: add p then subtract q; as: subtract q then add p")
    sp.add_argument("--p", type=int, default=0, help="photons added")
    sp.add_argument("--q", type=int, default=0, help="photons subtracted")
    sp.add_argument("--nbar", type=float, help="thermal mean photon number (default 0.25)")
    sp.add_argument("--alpha-re", "--alpha", dest="alpha_re", type=float,
                    help="real part of the coherent amplitude (default 1)")
    sp.add_argument("--alpha-im", type=float, help="imaginary part of the coherent amplitude (default 0)")


def _common_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", help="output path; stdout when omitted")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL,
                    help="discarded population allowed when choosing the Fock cutoff")


def _grid_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--grid-min", type=float, default=-3.0)
    sp.add_argument("--grid-max", type=float, default=3.0)
    sp.add_argument("--grid-points", type=int, default=81, help="points per axis")
    sp.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonops", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pnd", help="photon-number distribution")
    _state_args(sp)
    _common_args(sp)

    sp = sub.add_parser("wigner", help="Wigner function on a square grid")
    _state_args(sp)
    _common_args(sp)
    _grid_args(sp)

    sp = sub.add_parser("q-sweep", help="Mandel Q against nbar (thermal) or alpha (ecs)")
    _state_args(sp)
    _common_args(sp)
    sp.add_argument("--sweep-min", type=float)
    sp.add_argument("--sweep-max", type=float)
    sp.add_argument("--sweep-points", type=int, default=50)

    sp = sub.add_parser("figure", help="regenerate the data behind one figure")
    sp.add_argument("figure", type=int)
    sp.add_argument("--out", help="output directory (default fig<k>)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    _grid_args(sp)

    sp = sub.add_parser("validate", help="compare every closed form against the Fock-space reference")
    sp.add_argument("--out", default="validation_report.json")
    sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    sp.add_argument("--cutoff-scale", type=int, default=1, help="multiply every chosen cutoff by this")
    return parser


@contextlib.contextmanager
def _sink(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(table, cfg: RunConfig) -> None:
    text = table.to_csv() if cfg.format == "csv" else table.to_json()
    with _sink(cfg.out) as fh:
        fh.write(text)


def run_pnd(cfg: RunConfig) -> int:
    _emit(pnd_table(cfg.spec, cfg.seq, cfg.tail_tol), cfg)
    return EXIT_OK


def run_wigner(cfg: RunConfig) -> int:
    _emit(wigner_table(cfg.spec, cfg.seq, cfg.grid, cfg.tail_tol, cfg.workers), cfg)
    return EXIT_OK


def run_q_sweep(cfg: RunConfig) -> int:
    if cfg.family is Family.EVEN_COHERENT and cfg.alpha_im:
        raise ValueError("ECS sweeps run over real alpha; drop --alpha-im")
    _emit(q_sweep_table(cfg.family, cfg.seq, cfg.sweep, cfg.tail_tol), cfg)
    return EXIT_OK


def run_figure_cmd(cfg: RunConfig) -> int:
    if cfg.figure not in FIGURES:
        raise ValueError(f"unknown figure {cfg.figure}; expected 1..{len(FIGURES)}")
    out = cfg.out or f"fig{cfg.figure}"
    manifest = run_figure(cfg.figure, out, cfg.grid, cfg.tail_tol, cfg.workers, cfg.format)
    log.info("wrote %d panels to %s", len(manifest["panels"]), out)
    return EXIT_OK


def run_validate(cfg: RunConfig) -> int:
    from .validation import run_validation

    # open first so an unwritable destination fails before the long run
    with open(cfg.out, "w") as fh:
        report = run_validation(cfg.cutoff_scale, cfg.tail_tol)
        json.dump(report.to_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")
    counts = report.summary()
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {"pnd": run_pnd, "wigner": run_wigner, "q-sweep": run_q_sweep,
            "figure": run_figure_cmd, "validate": run_validate}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except NullState as exc:
        print(f"photonops: degenerate state: {exc}", file=sys.stderr)
        return EXIT_NULL
    except (ValueError, OSError, PhotonOpsError) as exc:
        print(f"photonops: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
