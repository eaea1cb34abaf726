"""Frozen figure parameter sets and the data tables behind each panel.

Every table is built from the Fock-space reference; closed forms appear only
as an extra column in Q sweeps, and only when the branch is nonsingular.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import SingularParameter, UnsupportedBranch
from .fock import DEFAULT_TAIL_TOL, OpSequence, Order
from .observables import mandel_q, mandel_q_closed_ecs, mandel_q_closed_thermal, pnd, prepare_state, wigner_grid
from .states import Family, StateSpec

SA, AS = Order.ADD_THEN_SUBTRACT, Order.SUBTRACT_THEN_ADD


@dataclass(frozen=True)
class GridConfig:
    grid_min: float = -3.0
    grid_max: float = 3.0
    grid_points: int = 81


@dataclass(frozen=True)
class SweepConfig:
    sweep_min: float
    sweep_max: float
    sweep_points: int = 50

    def values(self) -> np.ndarray:
        if self.sweep_points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.sweep_min < self.sweep_max:
            raise ValueError("sweep_min must be below sweep_max")
        return np.linspace(self.sweep_min, self.sweep_max, self.sweep_points)


THERMAL_SWEEP = SweepConfig(0.01, 1.0)
ECS_SWEEP = SweepConfig(0.1, 2.0)


@dataclass(frozen=True)
class Panel:
    """One figure panel: what to compute and for which state."""

    kind: str  # "pnd", "wigner" or "q-sweep"
    family: Family
    order: Order
    p: int
    q: int
    nbar: Optional[float] = None
    alpha: Optional[float] = None

    @property
    def seq(self) -> OpSequence:
        return OpSequence(self.p, self.q, self.order)

    def spec(self, value: Optional[float] = None) -> StateSpec:
        if self.family is Family.THERMAL:
            return StateSpec.thermal(self.nbar if value is None else value)
        return StateSpec.even_coherent(self.alpha if value is None else value)


def _th(kind, order, p, q, nbar=None):
    return Panel(kind, Family.THERMAL, order, p, q, nbar=nbar)


def _ecs(kind, order, p, q, alpha=None):
    return Panel(kind, Family.EVEN_COHERENT, order, p, q, alpha=alpha)


# upper row add-then-subtract, lower row subtract-then-add, panels lettered row by row
FIGURES: dict[int, dict[str, Panel]] = {
    1: dict(zip("abcdef", [_th("pnd", o, p, q, 0.25) for o in (SA, AS) for p, q in ((2, 2), (4, 2), (8, 6))])),
    2: dict(zip("abcdef", [_th("wigner", SA, 1, 1, 0.04), _th("wigner", SA, 4, 12, 0.04),
                           _th("wigner", SA, 8, 12, 0.04), _th("wigner", AS, 1, 1, 0.04),
                           _th("wigner", AS, 2, 4, 0.04), _th("wigner", AS, 2, 6, 0.04)])),
    3: dict(zip("abcd", [_th("q-sweep", SA, 6, 2), _th("q-sweep", SA, 6, 3),
                         _th("q-sweep", AS, 6, 2), _th("q-sweep", AS, 4, 3)])),
    4: dict(zip("abcdef", [_ecs("pnd", SA, 1, 1, 2.0), _ecs("pnd", SA, 8, 4, 2.0),
                           _ecs("pnd", SA, 16, 4, 2.0), _ecs("pnd", AS, 1, 1, 2.0),
                           _ecs("pnd", AS, 4, 8, 2.0), _ecs("pnd", AS, 4, 12, 2.0)])),
    5: dict(zip("abcdef", [_ecs("wigner", o, p, 1, 1.0) for o in (SA, AS) for p in (1, 2, 3)])),
    6: {"a": _ecs("wigner", SA, 1, 0, 0.1), "b": _ecs("wigner", SA, 5, 0, 0.1)},
    7: dict(zip("abcd", [_ecs("q-sweep", SA, 2, 1), _ecs("q-sweep", SA, 1, 2),
                         _ecs("q-sweep", AS, 2, 1), _ecs("q-sweep", AS, 1, 2)])),
}


@dataclass
class Table:
    """Column-oriented numeric table plus the parameters that produced it."""

    columns: list[str]
    rows: list[tuple]
    params: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = {c: [row[i] for row in self.rows] for i, c in enumerate(self.columns)}
        return json.dumps({"params": self.params, "data": data}, sort_keys=True, indent=1) + "\n"

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)


def _fmt(v) -> str:
    # repr gives the shortest string that round-trips a binary64 value
    return repr(int(v)) if isinstance(v, (int, np.integer)) else repr(float(v))


def pnd_table(spec: StateSpec, seq: OpSequence, tail_tol: float = DEFAULT_TAIL_TOL) -> Table:
    state, _, K = prepare_state(spec, seq, tail_tol)
    probs = pnd(state)
    params = {**spec.describe(), "order": seq.order.value, "p": seq.p, "q": seq.q,
              "tail_tol": tail_tol, "cutoff": K}
    return Table(["n", "probability"], [(n, float(v)) for n, v in enumerate(probs)], params)


def wigner_table(spec: StateSpec, seq: OpSequence, grid: GridConfig = GridConfig(),
                 tail_tol: float = DEFAULT_TAIL_TOL, workers: int = 1) -> Table:
    g = wigner_grid(spec, seq, grid.grid_min, grid.grid_max, grid.grid_min, grid.grid_max,
                    grid.grid_points, tail_tol, workers=workers)
    pts = g.points()
    rows = [(float(b.real), float(b.imag), float(w)) for b, w in zip(pts, g.values)]
    params = {**spec.describe(), "order": seq.order.value, "p": seq.p, "q": seq.q, **asdict(grid),
              "tail_tol": tail_tol, "cutoff": g.cutoff}
    return Table(["re", "im", "w"], rows, params)


def q_sweep_table(family: Family, seq: OpSequence, sweep: SweepConfig,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> Table:
    """Mandel Q against n̄ (thermal) or real alpha (ECS); reference values first."""
    xs = sweep.values()
    oracle, closed, cutoffs = [], [], []
    use_closed = True
    for x in xs:
        x = float(x)
        spec = StateSpec.thermal(x) if family is Family.THERMAL else StateSpec.even_coherent(x)
        state, _, K = prepare_state(spec, seq, tail_tol)
        cutoffs.append(K)
        oracle.append(mandel_q(state).q)
        if use_closed:
            try:
                closed.append(mandel_q_closed_thermal(x, seq) if family is Family.THERMAL
                              else mandel_q_closed_ecs(x, seq))
            except (SingularParameter, UnsupportedBranch):
                use_closed = False
    params = {"family": family.value, "order": seq.order.value, "p": seq.p, "q": seq.q,
              **asdict(sweep), "tail_tol": tail_tol, "cutoff": max(cutoffs)}
    if use_closed:
        rows = [(float(x), o, c) for x, o, c in zip(xs, oracle, closed)]
        return Table(["x", "q", "q_closed"], rows, params)
    return Table(["x", "q"], [(float(x), o) for x, o in zip(xs, oracle)], params)


def panel_table(panel: Panel, grid: GridConfig = GridConfig(), tail_tol: float = DEFAULT_TAIL_TOL,
                workers: int = 1) -> Table:
    if panel.kind == "pnd":
        return pnd_table(panel.spec(), panel.seq, tail_tol)
    if panel.kind == "wigner":
        return wigner_table(panel.spec(), panel.seq, grid, tail_tol, workers)
    sweep = THERMAL_SWEEP if panel.family is Family.THERMAL else ECS_SWEEP
    return q_sweep_table(panel.family, panel.seq, sweep, tail_tol)


def run_figure(figure: int, out_dir: str, grid: GridConfig = GridConfig(),
               tail_tol: float = DEFAULT_TAIL_TOL, workers: int = 1, fmt: str = "csv") -> dict:
    """Write one data file per panel plus manifest.json; returns the manifest."""
    from . import __version__

    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure}; expected 1..{len(FIGURES)}")
    os.makedirs(out_dir, exist_ok=True)
    panels = {}
    for letter, panel in FIGURES[figure].items():
        table = panel_table(panel, grid, tail_tol, workers)
        name = f"fig{figure}_{letter}.{fmt}"
        with open(os.path.join(out_dir, name), "w", newline="") as fh:
            fh.write(table.to_csv() if fmt == "csv" else table.to_json())
        panels[name] = {"kind": panel.kind, **table.params}
    manifest = {"figure": figure, "library_version": __version__, "tail_tol": tail_tol, "panels": panels}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return manifest
