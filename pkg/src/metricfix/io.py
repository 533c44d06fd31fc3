"""JSON documents for spaces, maps and games."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .games import Game
from .metric import COMBINERS, FiniteMetricSpace
from .setvalued import SetValuedMap


def read_json(source: str | Path | None) -> tuple[Any, Path]:
    """Parse JSON from a file, or from stdin when ``source`` is None or ``-``."""
    try:
        if source is None or str(source) == "-":
            return json.load(sys.stdin), Path.cwd()
        path = Path(source)
        with path.open(encoding="utf-8") as fh:
            return json.load(fh), path.parent
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {source or 'stdin'}: {exc}") from None


def _require(doc: Any, key: str, what: str):
    if not isinstance(doc, dict):
        raise InputError(f"{what} must be a JSON object")
    if key not in doc:
        raise InputError(f"{what} is missing {key!r}")
    return doc[key]


def _resolve(doc: Any, base: Path | None) -> tuple[Any, Path | None]:
    if isinstance(doc, str):
        path = Path(doc) if base is None else base / doc
        loaded, parent = read_json(path)
        return loaded, parent
    return doc, base


def space_from_doc(doc: Any, base: Path | None = None) -> FiniteMetricSpace:
    """Accepts either a distance table or an embedding (or a path to either)."""
    doc, _ = _resolve(doc, base)
    points = _require(doc, "points", "space document")
    if not isinstance(points, list):
        raise InputError("'points' must be a list of labels")
    if "distances" in doc:
        rows = doc["distances"]
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise InputError("'distances' must be a full table (list of rows)")
        if any(len(r) != len(rows) for r in rows):
            raise InputError("'distances' must be square; triangular shorthand is not accepted")
        if any(v is None or isinstance(v, bool) for r in rows for v in r):
            raise InputError("'distances' has missing entries")
        return FiniteMetricSpace(points, rows)
    if "embedding" in doc:
        emb = doc["embedding"]
        coords = _require(emb, "coords", "embedding")
        dim = emb.get("dim")
        arr = np.asarray(coords, dtype=float) if coords else np.zeros((0, 0))
        if arr.ndim != 2 or (dim is not None and arr.shape[1] != dim):
            raise InputError(f"embedding coords must be rows of length dim={dim}")
        return FiniteMetricSpace.from_coords(points, arr, doc.get("metric", "euclidean"))
    raise InputError("space document needs 'distances' or 'embedding'")


def space_to_doc(space: FiniteMetricSpace) -> dict:
    return {"points": list(space.labels), "distances": space.dist.tolist()}


def map_from_doc(doc: Any, base: Path | None = None) -> SetValuedMap:
    doc, base = _resolve(doc, base)
    space = space_from_doc(_require(doc, "space", "map document"), base)
    images = _require(doc, "images", "map document")
    if not isinstance(images, dict):
        raise InputError("'images' must map labels to lists of labels")
    for k, v in images.items():
        if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
            raise InputError(f"image of {k!r} must be a list of labels")
    return SetValuedMap.from_labels(space, images)


def map_to_doc(F: SetValuedMap) -> dict:
    return {"space": space_to_doc(F.space), "images": F.label_images()}


def game_from_doc(doc: Any, base: Path | None = None) -> Game:
    doc, base = _resolve(doc, base)
    n = _require(doc, "players", "game document")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("'players' must be a positive integer")
    strategies = _require(doc, "strategies", "game document")
    if not isinstance(strategies, list) or len(strategies) != n:
        raise InputError(f"'strategies' must list {n} strategy spaces")
    spaces = [space_from_doc(s, base) for s in strategies]
    payoffs = _require(doc, "payoffs", "game document")
    mode = _require(payoffs, "mode", "payoffs")
    combiner = doc.get("combiner", "max")
    if combiner not in COMBINERS:
        raise InputError(f"unknown combiner {combiner!r}")
    if mode == "table":
        return Game(spaces, tables=_require(payoffs, "data", "payoffs"), combiner=combiner)
    if mode == "expression":
        formulas = _require(payoffs, "formulas", "payoffs")
        if not isinstance(formulas, list) or not all(isinstance(f, str) for f in formulas):
            raise InputError("'formulas' must be a list of strings")
        return Game(spaces, formulas=formulas, combiner=combiner)
    raise InputError(f"unknown payoff mode {mode!r}; expected table or expression")


def game_to_doc(game: Game) -> dict:
    if game.mode == "table":
        payoffs = {"mode": "table", "data": [t.tolist() for t in game.tables]}
    else:
        payoffs = {"mode": "expression", "formulas": [f.source for f in game.formulas]}
    return {
        "players": game.n_players,
        "strategies": [space_to_doc(s) for s in game.strategy_spaces],
        "payoffs": payoffs,
        "combiner": game.combiner,
    }
