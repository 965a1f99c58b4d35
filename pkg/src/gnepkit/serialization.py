"""Problem files in, reports out.

Problem files are JSON documents checked against
``schemas/problem.schema.json`` and then semantically (set emptiness,
expression syntax, dimensions). Every problem found is reported with the
JSON pointer of the offending field. Reports are written with a fixed key
order and 17 significant digits per float so that identical runs produce
identical bytes.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import expr as ex
from .best_response import InnerSolverOptions
from .blocks import EUCLIDEAN, BlockStructure, NormSpec
from .exceptions import ExprSyntaxError, GnepkitError, ProblemError
from .game import GameDefinition, classify
from .sets import (Ball, Box, ConvexSet, Fixed, Halfspace, Parametric,
                   ParametricBox, Polytope, ProductSet, Slice)
from .solvers import SolveOptions, rosen_build

SEED_ENV = "GNEPKIT_SEED"
DEFAULT_SEED = 42


def _schema(name: str) -> dict:
    return json.loads(resources.files("gnepkit").joinpath("schemas", name).read_text("utf-8"))


def problem_schema() -> dict:
    return _schema("problem.schema.json")


def report_schema() -> dict:
    return _schema("report.schema.json")


def bundled_problems() -> list[str]:
    root = resources.files("gnepkit").joinpath("problems")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve_problem_path(name) -> Path:
    """``name`` itself if it exists, else the bundled problem of that name."""
    p = Path(name)
    if p.exists():
        return p
    for candidate in (p.name, p.name + ".json"):
        bundled = resources.files("gnepkit").joinpath("problems", candidate)
        if bundled.is_file():
            return Path(str(bundled))
    raise FileNotFoundError(f"no such problem file: {name}")


# ------------------------------------------------------------------ pointers

def _escape(token) -> str:
    return str(token).replace("~", "~0").replace("/", "~1")


def _ptr(*parts) -> str:
    return "".join("/" + _escape(p) for p in parts)


class _Errors:
    def __init__(self):
        self.items: list[tuple[str, str]] = []

    def add(self, pointer, message):
        self.items.append((pointer, message))

    def raise_if_any(self):
        if self.items:
            raise ProblemError(self.items)


# -------------------------------------------------------------- default seed

def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        seed = int(raw)
    except ValueError:
        raise ProblemError([("", f"environment variable {SEED_ENV}={raw!r} is not an integer")]) from None
    if seed < 0:
        raise ProblemError([("", f"environment variable {SEED_ENV} must be nonnegative")])
    return seed


# ------------------------------------------------------------ set decoding

def _bounds(values):
    return [(-math.inf if v is None else v) for v in values]


def _upper(values):
    return [(math.inf if v is None else v) for v in values]


def _box_from(doc, where, errors) -> Box | None:
    lo, hi = doc["lower"], doc["upper"]
    if len(lo) != len(hi):
        errors.add(where, f"lower has {len(lo)} entries but upper has {len(hi)}")
        return None
    lo, hi = _bounds(lo), _upper(hi)
    for i, (a, b) in enumerate(zip(lo, hi)):
        if a > b:
            errors.add(_ptr_join(where, "lower", i),
                       f"lower bound {a!r} exceeds upper bound {b!r} (see {_ptr_join(where, 'upper', i)})")
            return None
    return Box(lo, hi)


def _ptr_join(base, *parts) -> str:
    return base + _ptr(*parts)


def set_from_dict(doc, where="", errors=None) -> ConvexSet | None:
    """Decode one set; problems go to ``errors`` (raised immediately when
    ``errors`` is None)."""
    own = errors is None
    errors = errors or _Errors()
    s = None
    try:
        t = doc["type"]
        if t == "box":
            s = _box_from(doc, where, errors)
        elif t == "ball":
            s = Ball(doc["center"], doc["radius"])
        elif t == "halfspace":
            s = Halfspace(doc["a"], doc["b"])
        elif t == "polytope":
            A, b = doc["A"], doc["b"]
            widths = {len(r) for r in A}
            if len(widths) != 1:
                errors.add(_ptr_join(where, "A"), "rows of A differ in length")
            elif len(b) != len(A):
                errors.add(_ptr_join(where, "b"), f"A has {len(A)} rows but b has {len(b)} entries")
            else:
                box = None
                if "box" in doc:
                    box = _box_from(doc["box"], _ptr_join(where, "box"), errors)
                    if box is not None and box.dim != widths.pop():
                        errors.add(_ptr_join(where, "box"), "box dimension differs from the width of A")
                        box = None
                    elif box is None:
                        return None
                s = Polytope(A, b, box=box, witness=doc.get("witness"))
        elif t == "product":
            parts = [set_from_dict(d, _ptr_join(where, "sets", i), errors)
                     for i, d in enumerate(doc["sets"])]
            if all(p is not None for p in parts):
                s = ProductSet(parts)
    except (GnepkitError, ValueError) as exc:
        errors.add(where, str(exc))
        s = None
    if own:
        errors.raise_if_any()
    return s


def _finite_or_none(v):
    v = float(v)
    return v if math.isfinite(v) else None


def set_to_dict(s: ConvexSet) -> dict:
    if isinstance(s, Box):
        return {"type": "box", "lower": [_finite_or_none(v) for v in s.lower],
                "upper": [_finite_or_none(v) for v in s.upper]}
    if isinstance(s, Ball):
        return {"type": "ball", "center": s.center_.tolist(), "radius": s.radius}
    if isinstance(s, Halfspace):
        return {"type": "halfspace", "a": s.a.tolist(), "b": s.b}
    if isinstance(s, Polytope):
        d = {"type": "polytope", "A": s.A.tolist(), "b": s.b.tolist()}
        if s.box is not None:
            b = set_to_dict(s.box)
            d["box"] = {"lower": b["lower"], "upper": b["upper"]}
        d["witness"] = s.witness.tolist()
        return d
    if isinstance(s, ProductSet):
        return {"type": "product", "sets": [set_to_dict(p) for p in s.sets]}
    raise TypeError(f"cannot serialize set {s!r}")


def map_to_dict(m) -> dict:
    if isinstance(m, Fixed):
        return {"type": "fixed", "set": set_to_dict(m.set)}
    if isinstance(m, Parametric):
        return {"type": "parametric_box",
                "lower": [ex.to_string(e) for e in m.box.lower_exprs],
                "upper": [ex.to_string(e) for e in m.box.upper_exprs]}
    if isinstance(m, Slice):
        return {"type": "slice", "set": set_to_dict(m.shared), "block": list(m.block),
                "read_offset": m.read_offset}
    raise TypeError(f"cannot serialize constraint map {m!r}")


def norm_to_dict(norm: NormSpec):
    if norm.kind == "euclidean":
        return "euclidean"
    if norm.kind == "p_norm":
        return {"kind": "p_norm", "p": norm.p}
    return {"kind": "weighted_euclidean", "weights": list(norm.weights)}


# ----------------------------------------------------------- problem model

@dataclass
class Problem:
    """A decoded problem file."""

    game: GameDefinition
    solver: dict = field(default_factory=dict)
    search_box: Box | None = None
    name: str | None = None
    source: str | None = None

    def solve_options(self, seed: int | None = None, **overrides) -> SolveOptions:
        """Options from the file's ``solver`` section; ``seed`` and
        ``overrides`` (values of None are ignored) take precedence."""
        conf = {k: v for k, v in self.solver.items() if k not in ("method", "inner")}
        inner = InnerSolverOptions(**self.solver.get("inner", {}))
        conf.update({k: v for k, v in overrides.items() if v is not None})
        if seed is not None:
            conf["seed"] = seed
        elif "seed" not in conf:
            conf["seed"] = default_seed()
        return SolveOptions(inner=inner, **conf)

    @property
    def method(self) -> str:
        return self.solver.get("method", "direct")


def _parse_expr(text, n, where, errors):
    try:
        return ex.parse(text, n)
    except ExprSyntaxError as exc:
        errors.add(where, f"expression syntax error: {exc}")
    return None


def problem_from_dict(doc, source: str | None = None) -> Problem:
    """Validate ``doc`` and build the game it describes.

    Raises ProblemError listing every problem found, each tagged with a JSON
    pointer.
    """
    errors = _Errors()
    validator = jsonschema.Draft202012Validator(problem_schema())
    for err in sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message)):
        errors.add(_ptr(*err.absolute_path), err.message)
    if errors.items:
        # still surface expression syntax errors alongside schema errors
        players = doc.get("players") if isinstance(doc, dict) else None
        for i, p in enumerate(players if isinstance(players, list) else []):
            if isinstance(p, dict) and isinstance(p.get("objective"), str) and p["objective"]:
                _parse_expr(p["objective"], None, _ptr("players", i, "objective"), errors)
        errors.raise_if_any()

    players = doc["players"]
    dims = [p["dim"] for p in players]
    structure = BlockStructure(tuple(dims))
    n = structure.total
    rosen = "shared_constraints" in doc

    objectives = [_parse_expr(p["objective"], n, _ptr("players", i, "objective"), errors)
                  for i, p in enumerate(players)]
    names = tuple(p.get("name", f"player{i + 1}") for i, p in enumerate(players))
    if len(set(names)) != len(names):
        errors.add(_ptr("players"), "player names must be unique")

    norm = EUCLIDEAN
    if "norm" in doc:
        nd = doc["norm"]
        try:
            norm = NormSpec() if nd == "euclidean" else NormSpec(
                nd["kind"], nd.get("p"), tuple(nd["weights"]) if "weights" in nd else None)
            if norm.weights is not None and len(norm.weights) != n:
                errors.add(_ptr("norm", "weights"), f"expected {n} weights, got {len(norm.weights)}")
        except ValueError as exc:
            errors.add(_ptr("norm"), str(exc))

    search_box = None
    if "search_box" in doc:
        search_box = _box_from(doc["search_box"], _ptr("search_box"), errors)
        if search_box is not None and search_box.dim != n:
            errors.add(_ptr("search_box"), f"search box has dimension {search_box.dim}, profile has {n}")

    game = None
    if rosen:
        for i, p in enumerate(players):
            for key in ("base_set", "constraint_map"):
                if key in p:
                    errors.add(_ptr("players", i, key),
                               f"{key} is not allowed together with shared_constraints "
                               "(the shared set determines it)")
        shared = _shared_set(doc["shared_constraints"], n, errors)
        errors.raise_if_any()
        try:
            game = rosen_build(shared, objectives, structure, names)
        except (GnepkitError, ValueError) as exc:
            errors.add(_ptr("shared_constraints"), str(exc))
    else:
        base_sets, maps = [], []
        for i, p in enumerate(players):
            where = _ptr("players", i)
            if "base_set" not in p:
                errors.add(where, "'base_set' is a required property (no shared_constraints given)")
                base_sets.append(None)
                maps.append(None)
                continue
            K = set_from_dict(p["base_set"], where + "/base_set", errors)
            if K is not None and K.dim != p["dim"]:
                errors.add(where + "/base_set", f"base set has dimension {K.dim} but dim is {p['dim']}")
            base_sets.append(K)
            maps.append(_map_from_dict(p.get("constraint_map"), K, i, p["dim"], n,
                                       where + "/constraint_map", errors))
        errors.raise_if_any()
        kind = doc.get("kind")
        try:
            if kind is None:
                kind = classify(structure, base_sets, maps)
            game = GameDefinition(structure, tuple(base_sets), tuple(objectives), tuple(maps),
                                  norm, kind, names=names)
        except (GnepkitError, ValueError) as exc:
            errors.add(_ptr("kind") if "kind" in doc else "", str(exc))
    if game is not None and rosen and "kind" in doc and doc["kind"] != "rosen_derived":
        errors.add(_ptr("kind"), "a file with shared_constraints describes a rosen_derived game")
    if game is not None and norm != EUCLIDEAN:
        game = GameDefinition(game.structure, game.base_sets, game.objectives, game.constraint_maps,
                              norm, game.kind, game.joint_set, game.names)
    solver = dict(doc.get("solver", {}))
    try:
        if game is not None:
            Problem(game, solver).solve_options(seed=0)
    except ValueError as exc:
        errors.add(_ptr("solver"), str(exc))
    errors.raise_if_any()
    return Problem(game, solver, search_box, doc.get("name"), source)


def _shared_set(doc, n, errors):
    where = _ptr("shared_constraints")
    box = None
    if "box" in doc:
        box = _box_from(doc["box"], where + "/box", errors)
        if box is not None and box.dim != n:
            errors.add(where + "/box", f"box has dimension {box.dim}, profile has {n}")
            return None
    hs = doc.get("halfspaces", [])
    for i, h in enumerate(hs):
        if len(h["a"]) != n:
            errors.add(_ptr_join(where, "halfspaces", i, "a"), f"expected {n} coefficients, got {len(h['a'])}")
    if errors.items:
        return None
    try:
        if not hs:
            if box is None:
                errors.add(where, "shared constraints need halfspaces or a box")
                return None
            return box
        return Polytope([h["a"] for h in hs], [h["b"] for h in hs], box=box, witness=doc.get("witness"))
    except (GnepkitError, ValueError) as exc:
        errors.add(where, str(exc))
    return None


def _map_from_dict(doc, K, player, dim, n, where, errors):
    if doc is None:
        return Fixed(K) if K is not None else None
    t = doc["type"]
    if t == "fixed":
        s = set_from_dict(doc["set"], where + "/set", errors)
        if s is not None and s.dim != dim:
            errors.add(where + "/set", f"set has dimension {s.dim} but dim is {dim}")
        return Fixed(s) if s is not None else None
    if t == "parametric_box":
        lo, hi = doc["lower"], doc["upper"]
        for key, exprs in (("lower", lo), ("upper", hi)):
            if len(exprs) != dim:
                errors.add(where + "/" + key, f"expected {dim} bound expressions, got {len(exprs)}")
        lo = [_parse_expr(e, n, _ptr_join(where, "lower", i), errors) for i, e in enumerate(lo)]
        hi = [_parse_expr(e, n, _ptr_join(where, "upper", i), errors) for i, e in enumerate(hi)]
        if any(e is None for e in lo + hi) or len(lo) != dim or len(hi) != dim:
            return None
        return Parametric(ParametricBox(player, lo, hi))
    s = set_from_dict(doc["set"], where + "/set", errors)
    start, stop = doc["block"]
    offset = doc.get("read_offset", 0)
    if s is None:
        return None
    if not (0 <= start < stop <= s.dim) or stop - start != dim:
        errors.add(where + "/block", f"block [{start}, {stop}) does not fit a set of dimension "
                                     f"{s.dim} with dim {dim}")
        return None
    if offset + s.dim > n:
        errors.add(where + "/read_offset", f"slice reads x[{offset}:{offset + s.dim}] beyond n = {n}")
        return None
    return Slice(s, (start, stop), offset)


def read_problem(path) -> Problem:
    """Load a problem file (or bundled problem name)."""
    p = resolve_problem_path(path)
    raw = p.read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ProblemError([("", f"file is not valid UTF-8: {exc}")]) from None
    except json.JSONDecodeError as exc:
        raise ProblemError([("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from None
    return problem_from_dict(doc, str(p))


def load_problem(path) -> GameDefinition:
    return read_problem(path).game


def game_to_dict(g: GameDefinition, search_box: Box | None = None, solver: dict | None = None,
                 name: str | None = None) -> dict:
    """Problem-file document describing ``g`` player by player."""
    doc = {}
    if name:
        doc["name"] = name
    doc["kind"] = g.kind
    doc["norm"] = norm_to_dict(g.norm)
    players = []
    for nu in range(g.n_players):
        players.append({
            "name": g.names[nu],
            "dim": g.structure.dims[nu],
            "base_set": set_to_dict(g.base_sets[nu]),
            "objective": ex.to_string(g.objectives[nu]),
            "constraint_map": map_to_dict(g.constraint_maps[nu]),
        })
    doc["players"] = players
    if search_box is not None:
        b = set_to_dict(search_box)
        doc["search_box"] = {"lower": b["lower"], "upper": b["upper"]}
    if solver:
        doc["solver"] = dict(solver)
    return doc


# --------------------------------------------------------------- JSON out

def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    s = format(v, ".17g")
    if s == "-0":
        s = "0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text: keys in insertion order, floats with 17
    significant digits, non-finite numbers as null, trailing newline."""
    out = []

    def emit(o, level):
        pad = " " * (indent * level)
        inner = " " * (indent * (level + 1))
        if o is None or o is True or o is False:
            out.append(json.dumps(o))
        elif isinstance(o, (bool, np.bool_)):
            out.append("true" if o else "false")
        elif isinstance(o, (int, np.integer)):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(_fmt_float(float(o)))
        elif isinstance(o, str):
            out.append(json.dumps(o, ensure_ascii=False))
        elif isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{\n")
            for i, (k, v) in enumerate(o.items()):
                out.append(f"{inner}{json.dumps(str(k), ensure_ascii=False)}: ")
                emit(v, level + 1)
                out.append(",\n" if i < len(o) - 1 else "\n")
            out.append(pad + "}")
        elif isinstance(o, (list, tuple, np.ndarray)):
            items = list(o)
            if not items:
                out.append("[]")
                return
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
                out.append("[")
                for i, v in enumerate(items):
                    if i:
                        out.append(", ")
                    emit(v, level + 1)
                out.append("]")
                return
            out.append("[\n")
            for i, v in enumerate(items):
                out.append(inner)
                emit(v, level + 1)
                out.append(",\n" if i < len(items) - 1 else "\n")
            out.append(pad + "]")
        else:
            raise TypeError(f"cannot serialize {type(o).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def report_to_dict(report, wall_time_ms: float | None = None) -> dict:
    cert = report.certificate
    return {
        "status": report.status,
        "method": report.method,
        "message": report.message,
        "x_hat": [float(v) for v in report.x_hat],
        "y_hat": [float(v) for v in report.y_hat],
        "fp_residual": float(report.fp_residual),
        "certificate": None if cert is None else cert.to_dict(),
        "iterations": int(report.iterations),
        "seed": int(report.seed),
        "wall_time_ms": None if wall_time_ms is None else float(wall_time_ms),
        "tool_version": __version__,
    }


def write_report(report, path, wall_time_ms: float | None = None) -> None:
    """Write a schema-valid report. Leaving ``wall_time_ms`` unset keeps the
    file reproducible byte for byte."""
    doc = report_to_dict(report, wall_time_ms)
    jsonschema.validate(json.loads(dumps(doc)), report_schema())
    write_json(doc, path)


def read_report(path) -> dict:
    doc = json.loads(Path(path).read_text("utf-8"))
    jsonschema.validate(doc, report_schema())
    return doc
