import json
from pathlib import Path

import numpy as np
import pytest

from metricfix.errors import InputError
from metricfix.generators import discoordination_game, quadratic_game, random_space, two_cluster_swap
from metricfix.io import game_from_doc, game_to_doc, map_from_doc, map_to_doc, read_json, space_from_doc, space_to_doc

FIX = Path(__file__).parent / "fixtures"


def test_space_round_trip():
    space = random_space(np.random.default_rng(0), 6)
    back = space_from_doc(json.loads(json.dumps(space_to_doc(space))))
    assert back == space


def test_map_round_trip():
    F = two_cluster_swap()
    assert map_from_doc(json.loads(json.dumps(map_to_doc(F)))) == F


@pytest.mark.parametrize("game", [quadratic_game(), discoordination_game()])
def test_game_round_trip(game):
    back = game_from_doc(json.loads(json.dumps(game_to_doc(game))))
    assert back.mode == game.mode and back.shape == game.shape
    for i in range(game.n_players):
        assert np.array_equal(back.payoff_tensor(i), game.payoff_tensor(i))


def test_embedding_document():
    space = space_from_doc(read_json(FIX / "circle_embedding.json")[0])
    assert len(space) == 8 and space.dist[0, 4] == pytest.approx(2)
    cheb = space_from_doc({"points": ["a", "b"], "embedding": {"coords": [[0, 0], [1, 3]]}, "metric": "chebyshev"})
    assert cheb.dist[0, 1] == 3


def test_space_by_relative_path(tmp_path):
    (tmp_path / "s.json").write_text((FIX / "line3.json").read_text())
    doc = {"space": "s.json", "images": {"0": ["0"], "1": ["0"], "2": ["1"]}}
    F = map_from_doc(doc, tmp_path)
    assert F(2) == {1}


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"points": ["a"]},
        {"points": ["a", "b"], "distances": [[0, 1]]},
        {"points": ["a", "b"], "distances": [[0, None], [1, 0]]},
        {"points": ["a", "b"], "embedding": {"dim": 3, "coords": [[0, 0], [1, 1]]}},
    ],
)
def test_bad_space_documents(doc):
    with pytest.raises(InputError):
        space_from_doc(doc)


def test_bad_map_and_game_documents():
    line = json.loads((FIX / "line3.json").read_text())
    with pytest.raises(InputError):
        map_from_doc({"space": line, "images": {"0": ["0"]}})
    with pytest.raises(InputError):
        map_from_doc({"space": line, "images": {"0": [], "1": ["0"], "2": ["0"]}})
    game = game_to_doc(discoordination_game())
    with pytest.raises(InputError):
        game_from_doc({**game, "players": 0})
    with pytest.raises(InputError):
        game_from_doc({**game, "payoffs": {"mode": "lookup"}})
    with pytest.raises(InputError):
        game_from_doc({**game, "combiner": "min"})


def test_missing_file():
    with pytest.raises(InputError):
        read_json(FIX / "nope.json")
