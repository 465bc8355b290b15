"""Command-line front end.

    c2plus preprocess DATA -o STATE
    c2plus norm STATE DATA
    c2plus query STATE DATA M X Y
    c2plus grid STATE DATA M --res R -o OUT
    c2plus sets STATE
    c2plus dump-cz STATE
    c2plus selftest

DATA is a CSV file with header ``x,y,f`` or a JSON array of [x, y, f]
triples.  Exit status is 0 on success, 1 for bad input and 2 for internal
failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config
from .extension import Interpolant, PreprocessedState, trace_norm_detail

# keys that only influence queries; everything else is fixed at preprocessing
QUERY_KEYS = {"C_T", "qp_tol", "qp_max_iter", "lp_tol", "tn_slack", "D_config", "bbox_factor", "N0"}


class UserError(Exception):
    pass


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    values: np.ndarray

    @property
    def id(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.points, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.values, dtype="<f8").tobytes())
        return h.hexdigest()[:16]


def _read_rows(path: Path) -> list[list[float]]:
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(text)
        if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != 3 for r in rows):
            raise UserError(f"{path}: expected a JSON array of [x, y, f] triples")
        return [[float(v) for v in r] for r in rows]
    reader = csv.reader(text.splitlines())
    header = [h.strip() for h in next(reader, [])]
    if header != ["x", "y", "f"]:
        raise UserError(f"{path}: CSV header must be x,y,f")
    out = []
    for lineno, row in enumerate(reader, 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise UserError(f"{path}:{lineno}: expected 3 columns")
        out.append([float(c) for c in row])
    return out


def load_dataset(path) -> Dataset:
    path = Path(path)
    try:
        rows = _read_rows(path)
    except (OSError, ValueError) as exc:
        raise UserError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise UserError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise UserError(f"{path}: non-finite numbers")
    if np.any(arr[:, 2] < 0):
        raise UserError(f"{path}: data values must be nonnegative")
    pts = arr[:, :2]
    if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
        raise UserError(f"{path}: duplicate points")
    return Dataset(pts, arr[:, 2])


def values_for(state: PreprocessedState, data: Dataset) -> np.ndarray:
    """Data values in the order of the preprocessed points."""
    pos = {p: i for i, p in enumerate(map(tuple, data.points.tolist()))}
    f = np.empty(state.n)
    if data.points.shape[0] != state.n:
        raise UserError(f"data has {data.points.shape[0]} points, the index has {state.n}")
    for i, p in enumerate(map(tuple, state.points.tolist())):
        j = pos.get(p)
        if j is None:
            raise UserError(f"point {p} of the index is missing from the data")
        f[i] = data.values[j]
    return f


def _overrides(items: list[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UserError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _config(args) -> Config:
    try:
        if args.config:
            return Config.from_file(args.config, _overrides(args.set))
        return Config.from_mapping(_overrides(args.set))
    except (OSError, ValueError) as exc:
        raise UserError(str(exc)) from exc


def _load_state(args) -> PreprocessedState:
    try:
        state = PreprocessedState.load(args.state)
    except (OSError, ValueError) as exc:
        raise UserError(f"cannot load {args.state}: {exc}") from exc
    changes = _overrides(args.set)
    if args.config:
        try:
            file_cfg = Config.from_file(args.config)
        except (OSError, ValueError) as exc:
            raise UserError(str(exc)) from exc
        changes = {**{k: str(getattr(file_cfg, k)) for k in QUERY_KEYS}, **changes}
    bad = sorted(set(changes) - QUERY_KEYS)
    if bad:
        raise UserError(f"{', '.join(bad)} can only be set when preprocessing")
    if changes:
        try:
            merged = Config.from_mapping({**dict(l.split("=", 1) for l in state.config.to_lines()),
                                          **changes})
        except ValueError as exc:
            raise UserError(str(exc)) from exc
        state.config = merged
        state.cz.config = merged
    return state


def _parse_M(text: str) -> float:
    try:
        M = float(text)
    except ValueError as exc:
        raise UserError(f"M must be a number, got {text!r}") from exc
    if not (np.isfinite(M) and M >= 0):
        raise UserError("M must be finite and nonnegative")
    return M


def _jet_record(jet_row: np.ndarray, depth: np.ndarray) -> dict:
    v, fx, fy, fxx, fxy, fyy = (float(a) for a in jet_row)
    return {"value": v, "grad": [fx, fy], "hess": [[fxx, fxy], [fxy, fyy]],
            "depth_set": [int(i) for i in depth]}


# ---------------------------------------------------------------- commands


def cmd_preprocess(args, out) -> None:
    data = load_dataset(args.data)
    cfg = _config(args)
    state = PreprocessedState.build(data.points, cfg)
    state.save(args.output)
    print(json.dumps({"points": state.n, "squares": len(state.cz), "dataset": data.id,
                      "output": str(args.output)}), file=out)


def cmd_norm(args, out) -> None:
    state = _load_state(args)
    f = values_for(state, load_dataset(args.data))
    res = trace_norm_detail(state, f)
    print(repr(res.value), file=out)


def cmd_query(args, out) -> None:
    state = _load_state(args)
    f = values_for(state, load_dataset(args.data))
    M = _parse_M(args.M)
    x = np.array([args.x, args.y], dtype=float)
    jet, depth = Interpolant(state, f, M).query(x)
    print(json.dumps(_jet_record(jet.to_array(), depth)), file=out)


def cmd_grid(args, out) -> None:
    state = _load_state(args)
    f = values_for(state, load_dataset(args.data))
    M = _parse_M(args.M)
    if args.res < 2:
        raise UserError("--res must be at least 2")
    lo, hi = state.points.min(axis=0), state.points.max(axis=0)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    half = np.where(half > 0, half, 0.5) * state.config.bbox_factor
    gx = np.linspace(mid[0] - half[0], mid[0] + half[0], args.res)
    gy = np.linspace(mid[1] - half[1], mid[1] + half[1], args.res)
    X = np.stack(np.meshgrid(gx, gy, indexing="xy"), axis=-1).reshape(-1, 2)
    J = Interpolant(state, f, M).jets(X)
    table = np.hstack([X, J])
    header = "x,y,value,fx,fy,fxx,fxy,fyy"
    target = out if args.output is None else open(args.output, "w")
    try:
        np.savetxt(target, table, fmt="%.17g", delimiter=",", header=header, comments="")
    finally:
        if target is not out:
            target.close()


def cmd_sets(args, out) -> None:
    state = _load_state(args)
    fam = state.sfp_family()
    for ell in range(len(fam)):
        rec = {"pair": [int(fam.ra[ell]), int(fam.rb[ell])],
               "set": [int(i) for i in fam.members(ell)]}
        out.write(json.dumps(rec) + "\n")


def cmd_dump_cz(args, out) -> None:
    state = _load_state(args)
    for rec in state.cz.records():
        out.write(json.dumps(rec) + "\n")


def cmd_selftest(args, out) -> None:
    from .selftest import run_selftest

    cfg = _config(args)
    ok = run_selftest(cfg, out, seed=args.seed)
    if not ok:
        raise RuntimeError("self-test failed")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="c2plus", description="Nonnegative C^2 interpolation of planar data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", parents=[common], help="build and save the index of a point set")
    s.add_argument("data")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("norm", parents=[common], help="print the trace-norm estimate M")
    s.add_argument("state")
    s.add_argument("data")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("query", parents=[common], help="two-jet of the extension at one point")
    s.add_argument("state")
    s.add_argument("data")
    s.add_argument("M")
    s.add_argument("x", type=float)
    s.add_argument("y", type=float)
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("grid", parents=[common], help="values and jets on a regular grid")
    s.add_argument("state")
    s.add_argument("data")
    s.add_argument("M")
    s.add_argument("--res", type=int, default=100)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("sets", parents=[common], help="list the finiteness sets as JSON lines")
    s.add_argument("state")
    s.set_defaults(func=cmd_sets)

    s = sub.add_parser("dump-cz", parents=[common], help="list the decomposition as JSON lines")
    s.add_argument("state")
    s.set_defaults(func=cmd_dump_cz)

    s = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def run_command(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return 0 if exc.code == 0 else 1
    try:
        args.func(args, out)
    except UserError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except BrokenPipeError:  # output closed early, e.g. piped into head
        return 0
    except Exception as exc:  # noqa: BLE001 - report, do not crash with a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return 2
    return 0


def main() -> None:
    sys.exit(run_command())
