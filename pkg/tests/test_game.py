"""Core semantics: graphs, payoffs, stability, welfare, subgames."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnpg.game import (
    Game,
    Graph,
    Profile,
    deviation_gain,
    esw,
    induce_subgame,
    is_psne,
    is_stable,
    payoff,
    payoff_levels,
    usw,
)

from helpers import best_shot_game, complete_graph, path_graph


# ---------------------------------------------------------------------------
# hypothesis strategies
# ---------------------------------------------------------------------------

RATIONALS = st.fractions(min_value=0, max_value=4, max_denominator=4)


@st.composite
def games(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    graph = Graph.from_edges(n, sorted(edges))
    ext = []
    for v in range(n):
        width = graph.degree(v) + 2
        ext.append(tuple(draw(st.lists(RATIONALS, min_size=width, max_size=width))))
    cost = [draw(RATIONALS) for _ in range(n)]
    return Game.build(graph, ext, cost)


@st.composite
def games_with_profile(draw, max_n=6):
    game = draw(games(max_n=max_n))
    n = game.graph.player_count
    investing = draw(st.sets(st.integers(0, n - 1)))
    return game, Profile(frozenset(investing))


# ---------------------------------------------------------------------------
# Graph invariants
# ---------------------------------------------------------------------------


def test_graph_rejects_self_loops():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])


def test_graph_rejects_out_of_range_endpoint():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 5)])


def test_graph_rejects_duplicate_edges():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 1), (1, 0)])


def test_degrees_and_closed_neighborhoods():
    g = path_graph(4)
    assert [g.degree(v) for v in range(4)] == [1, 2, 2, 1]
    assert [g.closed_degree(v) for v in range(4)] == [2, 3, 3, 2]
    assert g.closed_neighbors(1) == frozenset({0, 1, 2})
    assert g.neighbors(1) == frozenset({0, 2})


def test_components_are_sorted_partitions():
    g = Graph.from_edges(6, [(0, 1), (3, 4)])
    assert g.components() == ((0, 1), (2,), (3, 4), (5,))


def test_zero_player_graph_is_fine():
    g = Graph.from_edges(0, [])
    assert g.player_count == 0
    assert g.components() == ()


# ---------------------------------------------------------------------------
# Game construction
# ---------------------------------------------------------------------------


def test_externality_table_must_cover_closed_degree_range():
    g = path_graph(2)
    with pytest.raises(ValueError):
        Game.build(g, [(0, 1), (0, 1, 2)], [0, 0])  # player 0 needs 3 values


def test_negative_values_rejected():
    g = path_graph(2)
    with pytest.raises(ValueError):
        Game.build(g, [(0, 1, -1), (0, 1, 2)], [0, 0])
    with pytest.raises(ValueError):
        Game.build(g, [(0, 1, 2), (0, 1, 2)], [-1, 0])


def test_build_coerces_strings_and_ints():
    g = path_graph(2)
    game = Game.build(g, [("1/2", 1, "1.5"), (0, "2", 3)], ["0.25", 1])
    assert game.externality[0] == (Fraction(1, 2), Fraction(1), Fraction(3, 2))
    assert game.cost[0] == Fraction(1, 4)


# ---------------------------------------------------------------------------
# Payoffs and deviation
# ---------------------------------------------------------------------------


def test_payoff_counts_closed_neighborhood_investors():
    # path a-b-c, only b invests
    game = best_shot_game(path_graph(3))
    s = Profile.of(1)
    assert payoff(game, s, 0) == 1  # a sees b
    assert payoff(game, s, 1) == Fraction(1, 2)  # b pays its cost
    assert payoff(game, s, 2) == 1


def test_investing_player_counts_itself():
    game = best_shot_game(path_graph(2), cost=Fraction(0))
    assert payoff(game, Profile.of(0), 0) == 1


@given(games_with_profile())
@settings(max_examples=200, deadline=None)
def test_stability_matches_deviation_gain(pair):
    game, profile = pair
    for v in range(game.graph.player_count):
        invests = v in profile
        count = profile.closed_count(game.graph, v)
        assert is_stable(game, v, invests, count) == (
            deviation_gain(game, profile, v) <= 0
        )


@given(games_with_profile())
@settings(max_examples=200, deadline=None)
def test_psne_means_no_profitable_deviation(pair):
    game, profile = pair
    expected = all(
        deviation_gain(game, profile, v) <= 0
        for v in range(game.graph.player_count)
    )
    assert is_psne(game, profile) == expected


@given(games_with_profile())
@settings(max_examples=200, deadline=None)
def test_flip_is_an_involution(pair):
    game, profile = pair
    for v in range(game.graph.player_count):
        assert profile.flip(v).flip(v) == profile


@given(games_with_profile())
@settings(max_examples=150, deadline=None)
def test_every_payoff_is_a_known_level(pair):
    game, profile = pair
    levels = set(payoff_levels(game))
    for v in range(game.graph.player_count):
        assert payoff(game, profile, v) in levels


def test_profile_validation_rejects_out_of_range():
    game = best_shot_game(path_graph(2))
    with pytest.raises(IndexError):
        Profile.of(5).validate_for(game)


# ---------------------------------------------------------------------------
# Welfare
# ---------------------------------------------------------------------------


def test_welfare_on_a_triangle():
    game = best_shot_game(complete_graph(3), cost=Fraction(1, 4))
    s = Profile.of(0)
    assert usw(game, s) == Fraction(11, 4)  # 3/4 + 1 + 1
    assert esw(game, s) == Fraction(3, 4)


def test_usw_of_zero_players_is_zero():
    game = Game.build(Graph.from_edges(0, []), [], [])
    assert usw(game, Profile.of()) == 0


def test_esw_undefined_for_zero_players():
    game = Game.build(Graph.from_edges(0, []), [], [])
    with pytest.raises(ValueError):
        esw(game, Profile.of())


@given(games_with_profile())
@settings(max_examples=150, deadline=None)
def test_usw_is_sum_and_esw_is_min(pair):
    game, profile = pair
    pays = [payoff(game, profile, v) for v in range(game.graph.player_count)]
    assert usw(game, profile) == sum(pays)
    assert esw(game, profile) == min(pays)


# ---------------------------------------------------------------------------
# Induced subgames
# ---------------------------------------------------------------------------


def test_subgame_keeps_only_internal_edges():
    game = best_shot_game(path_graph(4))
    view = induce_subgame(game, [0, 1, 3])
    assert view.game.graph.edges == frozenset({(0, 1)})
    assert view.kept == (0, 1, 3)


def test_subgame_truncates_externality_tables():
    game = best_shot_game(path_graph(3))
    view = induce_subgame(game, [0, 1])  # vertex 1 loses a neighbor
    assert len(view.game.externality[1]) == 3
    assert view.game.externality[1] == game.externality[1][:3]


def test_subgame_profile_round_trip():
    game = best_shot_game(path_graph(4))
    view = induce_subgame(game, [1, 2, 3])
    inner = Profile.of(0, 2)  # players 1 and 3 of the parent
    assert view.to_parent(inner) == Profile.of(1, 3)
    assert view.to_view(view.to_parent(inner)) == inner


def test_subgame_of_rejects_unknown_players():
    game = best_shot_game(path_graph(3))
    with pytest.raises(IndexError):
        induce_subgame(game, [0, 9])


@given(games(min_n=2, max_n=6), st.data())
@settings(max_examples=100, deadline=None)
def test_subgame_payoffs_match_isolated_restriction(game, data):
    # If the discarded players never invest, a kept player's payoff in the
    # subgame equals its payoff in the full game.
    n = game.graph.player_count
    kept = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    view = induce_subgame(game, kept)
    investing = data.draw(st.sets(st.sampled_from(sorted(kept))))
    sub_profile = view.to_view(Profile(frozenset(investing)))
    parent_profile = view.to_parent(sub_profile)
    for i, p in enumerate(view.kept):
        assert payoff(view.game, sub_profile, i) == payoff(
            game, parent_profile, p
        )
