"""File formats: training-set, trace, trajectory and error CSVs, model JSON.

Every float is written with 17 significant digits so that values round-trip
exactly, and every write goes to a temporary file that is then renamed.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grid import Grid1D, StencilSpec
from .mlp import LayerDump
from .problems import get_problem
from .refsolve import TrainingSet
from .scheme import CannModel

MODEL_FORMAT = "cann-model/1"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _read_rows(path, header):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        got = next(r, None)
        if got != list(header):
            raise ConfigurationError(f"{path}: expected header {','.join(header)}, got {got}")
        return [row for row in r if row]


# -- training set ------------------------------------------------------------

TRAINING_HEADER = ("n", "j", "u_n", "u_np1")


def write_training_set(S: TrainingSet, path) -> Path:
    rows = (
        (n, j + 1, float(S.levels[n, j]), float(S.levels[n + 1, j]))
        for n in range(S.m + 1)
        for j in range(S.grid.J)
    )
    return write_atomic(path, _csv_text(TRAINING_HEADER, rows))


def read_training_set(path, grid: Grid1D, dt: float) -> TrainingSet:
    """Load pairs; the file carries no geometry, so ``grid`` and ``dt`` come from the config."""
    rows = _read_rows(path, TRAINING_HEADER)
    if not rows:
        raise ConfigurationError(f"{path}: no training pairs")
    n_idx = np.array([int(r[0]) for r in rows])
    j_idx = np.array([int(r[1]) for r in rows])
    m = int(n_idx.max())
    if j_idx.min() < 1 or j_idx.max() > grid.J or len(rows) != (m + 1) * grid.J:
        raise ConfigurationError(
            f"{path}: {len(rows)} pairs do not fill {m + 1} levels of J={grid.J} cells"
        )
    levels = np.full((m + 2, grid.J), np.nan)
    for (n, j), r in zip(zip(n_idx, j_idx), rows):
        u_n, u_np1 = float(r[2]), float(r[3])
        if not np.isnan(levels[n, j - 1]) and levels[n, j - 1] != u_n:
            raise ConfigurationError(f"{path}: inconsistent value at level {n}, cell {j}")
        levels[n, j - 1] = u_n
        levels[n + 1, j - 1] = u_np1
    return TrainingSet(grid, dt, levels)


# -- trace / trajectory / errors -------------------------------------------

def write_trace(trace, path) -> Path:
    return write_atomic(path, _csv_text(("level", "iter", "sq_l2_error"), trace.rows()))


def read_trace(path):
    return [(int(a), int(b), float(c)) for a, b, c in _read_rows(path, ("level", "iter", "sq_l2_error"))]


def write_trajectory(traj, path) -> Path:
    return write_atomic(path, _csv_text(("t", "x_center", "u"), traj.rows()))


def read_trajectory_final(path):
    """``(t, x_centers, u)`` of the last time level in a trajectory CSV."""
    rows = _read_rows(path, ("t", "x_center", "u"))
    data = np.array(rows, dtype=float)
    t_last = data[-1, 0]
    sel = data[data[:, 0] == t_last]
    return float(t_last), sel[:, 1], sel[:, 2]


ERROR_HEADER = ("dx", "dt", "l2", "linf", "order_l2", "order_linf")


def write_error_study(rows, path) -> Path:
    """``rows``: dicts with dx, dt, l2, linf and optional order_l2/order_linf."""
    out = []
    for r in rows:
        out.append(
            [fmt(r["dx"]), fmt(r["dt"]), fmt(r["l2"]), fmt(r["linf"])]
            + [fmt(r[k]) if r.get(k) is not None else "" for k in ("order_l2", "order_linf")]
        )
    return write_atomic(path, _csv_text(ERROR_HEADER, out))


# -- model -------------------------------------------------------------------

def model_to_dict(model: CannModel, grid: Grid1D, seed: int, alpha: float, extra=None) -> dict:
    dump = LayerDump.of(model.net)
    d = {
        "format": MODEL_FORMAT,
        "problem_key": model.problem_key,
        "domain": [grid.a, grid.b],
        "J": grid.J,
        "dx": model.dx,
        "dt": model.dt,
        "stencil": {"p": model.stencil.p, "q": model.stencil.q},
        "layer_sizes": dump.layer_sizes,
        "weights": dump.weights,
        "biases": dump.biases,
        "seed": seed,
        "alpha": alpha,
    }
    if extra:
        d.update(extra)
    return d


def _json(o, level: int = 0) -> str:
    # json.dumps always uses float.__repr__, so floats are formatted here
    pad = " " * (level + 1)
    if isinstance(o, bool) or o is None:
        return json.dumps(o)
    if isinstance(o, (float, np.floating)):
        return fmt(o)
    if isinstance(o, (int, np.integer, str)):
        return json.dumps(o if isinstance(o, str) else int(o))
    if isinstance(o, dict):
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, level + 1)}" for k, v in o.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * level + "}"
    if isinstance(o, (list, tuple)):
        if all(isinstance(v, (int, float, np.number)) for v in o):
            return "[" + ", ".join(_json(v) for v in o) + "]"
        items = [pad + _json(v, level + 1) for v in o]
        return "[\n" + ",\n".join(items) + "\n" + " " * level + "]"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps_model(d: dict) -> str:
    return _json(d) + "\n"


def write_model(model: CannModel, grid: Grid1D, path, seed: int, alpha: float, extra=None) -> Path:
    return write_atomic(path, dumps_model(model_to_dict(model, grid, seed, alpha, extra)))


def read_model(path) -> tuple[CannModel, Grid1D, dict]:
    with open(path) as fh:
        d = json.load(fh)
    if d.get("format") != MODEL_FORMAT:
        raise ConfigurationError(f"{path}: not a {MODEL_FORMAT} file")
    net = LayerDump(d["layer_sizes"], d["weights"], d["biases"]).to_network()
    problem = get_problem(d["problem_key"])
    grid = Grid1D(float(d["domain"][0]), float(d["domain"][1]), int(d["J"]))
    stencil = StencilSpec(int(d["stencil"]["p"]), int(d["stencil"]["q"]))
    model = CannModel(float(d["dx"]), float(d["dt"]), stencil, net, problem.bc, problem.key)
    return model, grid, d
