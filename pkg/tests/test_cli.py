"""End-to-end command-line behavior, driven through main(argv)."""

import io
import random
import subprocess
import sys

import pytest

from bnpg.cli import main
from bnpg.game import Game, Graph
from bnpg.instance_io import (
    GameSpec,
    gen_random_game,
    parse_instance,
    serialize_graph,
    serialize_instance,
)
from bnpg.oracle import max_usw

from helpers import best_shot_game, cycle_graph, path_graph


ONE_PLAYER = "bnpg 1\nn 1\nc 0 1\ng 0 0 0\ng 0 1 2\n"
# matching pennies on an edge: no pure equilibrium
NO_PSNE = (
    "bnpg 1\nn 2\ne 0 1\n"
    "c 0 1\nc 1 1\n"
    "g 0 0 0\ng 0 1 2\ng 0 2 0\n"
    "g 1 0 0\ng 1 1 0\ng 1 2 3\n"
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def machine_dict(out):
    pairs = dict(line.split("=", 1) for line in out.strip().splitlines())
    return pairs


def test_psne_human_output(tmp_path, capsys):
    inst = write(tmp_path, "one.bnpg", ONE_PLAYER)
    code, out, _ = run(capsys, "psne", inst)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "PSNE: yes"
    assert "profile: 0" in lines
    assert any(line.startswith("algorithm:") for line in lines)


def test_psne_machine_output(tmp_path, capsys):
    inst = write(tmp_path, "one.bnpg", ONE_PLAYER)
    code, out, _ = run(capsys, "psne", inst, "--machine")
    assert code == 0
    pairs = machine_dict(out)
    assert pairs["status"] == "solved"
    assert pairs["psne"] == "yes"
    assert pairs["profile"] == "0"
    assert pairs["algorithm"] == "ccforest"
    assert "table_entries" in pairs and "elapsed_s" in pairs


def test_no_psne_exit_code(tmp_path, capsys):
    inst = write(tmp_path, "mp.bnpg", NO_PSNE)
    code, out, _ = run(capsys, "psne", inst)
    assert code == 2
    assert out.splitlines()[0] == "PSNE: no"
    code, out, _ = run(capsys, "psne", inst, "--machine")
    pairs = machine_dict(out)
    assert code == 2 and pairs["status"] == "no_psne" and pairs["psne"] == "no"
    assert "profile" not in pairs


def test_usw_and_esw_values(tmp_path, capsys):
    game = best_shot_game(path_graph(3))
    inst = write(tmp_path, "p3.bnpg", serialize_instance(game))
    code, out, _ = run(capsys, "usw", inst)
    assert code == 0
    assert out.splitlines()[0] == "usw = 5/2"
    code, out, _ = run(capsys, "esw", inst)
    assert code == 0
    assert out.splitlines()[0] == "esw = 1/2"


def test_stdin_dash(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(ONE_PLAYER))
    code, out, _ = run(capsys, "usw", "-")
    assert code == 0
    assert out.splitlines()[0] == "usw = 1"


def test_ccforest_refuses_cyclic_clique_graph(tmp_path, capsys):
    game = best_shot_game(cycle_graph(4))
    inst = write(tmp_path, "c4.bnpg", serialize_instance(game))
    code, out, _ = run(capsys, "psne", inst, "--algo", "ccforest")
    assert code == 3
    assert "not applicable:" in out
    # auto falls through to another solver and succeeds
    code, out, _ = run(capsys, "psne", inst)
    assert code == 0


def test_auto_matches_brute(tmp_path, capsys):
    rng = random.Random(1)
    for seed in range(6):
        spec = GameSpec("gnp", n=7, seed=seed, p=0.5, g_mode="arbitrary")
        game = gen_random_game(spec)
        inst = write(tmp_path, f"g{seed}.bnpg", serialize_instance(game))
        _, auto_out, _ = run(capsys, "usw", inst, "--machine")
        _, brute_out, _ = run(capsys, "usw", inst, "--machine", "--algo", "brute")
        assert machine_dict(auto_out)["value"] == machine_dict(brute_out)["value"]


def test_width_cap_falls_back_to_brute(tmp_path, capsys):
    game = best_shot_game(cycle_graph(6))
    inst = write(tmp_path, "c6.bnpg", serialize_instance(game))
    code, out, _ = run(capsys, "usw", inst, "--machine", "--width-cap", "0")
    assert code == 0
    assert machine_dict(out)["algorithm"] == "brute"
    # and if brute is also ruled out, the failure explains itself
    code, out, _ = run(
        capsys, "usw", inst, "--machine", "--width-cap", "0", "--oracle-limit", "3"
    )
    assert code == 3
    pairs = machine_dict(out)
    assert pairs["status"] == "not_applicable"
    assert "no solver applies" in pairs["detail"]


def test_verify_reports_payoffs(tmp_path, capsys):
    game = best_shot_game(path_graph(3))
    inst = write(tmp_path, "p3.bnpg", serialize_instance(game))
    code, out, _ = run(capsys, "verify", inst, "--profile", "1")
    assert code == 0
    lines = out.splitlines()
    assert "player 0: payoff 1, deviation gain -1/2" in lines
    assert "player 1: payoff 1/2, deviation gain -1/2" in lines
    assert "psne: true" in lines
    assert "usw = 5/2" in lines and "esw = 1/2" in lines
    # a non-equilibrium profile
    code, out, _ = run(capsys, "verify", inst, "--profile", "0 1", "--machine")
    assert code == 0
    assert machine_dict(out)["psne"] == "false"


def test_verify_rejects_out_of_range_profile(tmp_path, capsys):
    inst = write(tmp_path, "one.bnpg", ONE_PLAYER)
    code, _, err = run(capsys, "verify", inst, "--profile", "5")
    assert code == 1
    assert "error:" in err


def test_reduce_3ris_round_trips(tmp_path, capsys):
    gfile = write(tmp_path, "pet.graph", serialize_graph(path_graph(4)))
    code, out, _ = run(capsys, "reduce", "3ris", gfile)
    assert code == 0
    assert "# witness vertex 0 -> player 0" in out
    game = parse_instance(out)
    assert game.player_count == 4


def test_reduce_clique_emits_threshold(tmp_path, capsys):
    text = serialize_graph(Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)]))
    gfile = write(tmp_path, "k3.graph", text)
    code, out, _ = run(capsys, "reduce", "clique", gfile, "--kappa", "3")
    assert code == 0
    assert "# threshold 3" in out
    assert "# witness edge 0-1 -> player 3" in out
    assert "# witness special -> player 6" in out
    game = parse_instance(out)
    _, best = max_usw(game)
    assert best >= 3


def test_reduce_rbds_uses_red_marks(tmp_path, capsys):
    text = "n 3\ne 0 1\ne 0 2\nred 1 2\n"
    gfile = write(tmp_path, "star.graph", text)
    code, out, _ = run(capsys, "reduce", "rbds", gfile, "--kappa", "1")
    assert code == 0
    game = parse_instance(out)
    assert game.player_count == 4  # three vertices plus the watchdog
    code, _, err = run(capsys, "reduce", "rbds", gfile, "--kappa", "0")
    assert code == 1 and ">= 1" in err


def test_reduce_clique_requires_kappa(tmp_path, capsys):
    gfile = write(tmp_path, "k3.graph", serialize_graph(cycle_graph(3)))
    code, _, err = run(capsys, "reduce", "clique", gfile)
    assert code == 1
    assert "--kappa" in err


def test_gen_is_deterministic_and_parses(capsys):
    argv = ("gen", "--family", "tree", "--n", "9", "--seed", "4")
    code, first, _ = run(capsys, *argv)
    assert code == 0
    code, second, _ = run(capsys, *argv)
    assert first == second
    game = parse_instance(first)
    assert game.player_count == 9


def test_gen_twin_tree_multiplicities(capsys):
    code, out, _ = run(
        capsys,
        "gen", "--family", "twin_tree", "--multiplicities", "2,3,2", "--seed", "1",
    )
    assert code == 0
    assert parse_instance(out).player_count == 7


def test_ccgraph_reports_forest_verdict(tmp_path, capsys):
    inst = write(tmp_path, "p3.bnpg", serialize_instance(best_shot_game(path_graph(3))))
    code, out, _ = run(capsys, "ccgraph", inst)
    assert code == 0
    assert "cliques: 3" in out and "forest: yes" in out
    inst = write(tmp_path, "c4.bnpg", serialize_instance(best_shot_game(cycle_graph(4))))
    code, out, _ = run(capsys, "ccgraph", inst, "--machine")
    pairs = machine_dict(out)
    assert pairs["forest"] == "no" and pairs["cliques"] == "4"


def test_decompose_and_td_flow(tmp_path, capsys):
    game = best_shot_game(cycle_graph(5))
    inst = write(tmp_path, "c5.bnpg", serialize_instance(game))
    code, td_text, _ = run(capsys, "decompose", inst)
    assert code == 0
    assert td_text.startswith("s td ")
    td_file = write(tmp_path, "c5.td", td_text)
    code, out, _ = run(capsys, "usw", inst, "--td", td_file, "--machine")
    assert code == 0
    pairs = machine_dict(out)
    assert pairs["algorithm"] == "treewidth"
    _, best = max_usw(game)
    assert pairs["value"] == str(best)


def test_td_player_count_mismatch(tmp_path, capsys):
    inst = write(tmp_path, "one.bnpg", ONE_PLAYER)
    td_file = write(tmp_path, "bad.td", "s td 1 2 2\nb 1 1 2\n")
    code, _, err = run(capsys, "usw", inst, "--td", td_file)
    assert code == 1
    assert "error:" in err


def test_td_conflicts_with_brute(tmp_path, capsys):
    inst = write(tmp_path, "one.bnpg", ONE_PLAYER)
    td_file = write(tmp_path, "one.td", "s td 1 1 1\nb 1 1\n")
    code, _, err = run(capsys, "usw", inst, "--td", td_file, "--algo", "brute")
    assert code == 1
    assert "--td" in err


def test_missing_file_is_an_input_error(capsys):
    code, _, err = run(capsys, "psne", "/nonexistent/thing.bnpg")
    assert code == 1
    assert "error:" in err


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["psne"])  # missing instance argument
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "x"])
    assert exc.value.code == 1


def test_console_script_works(tmp_path):
    inst = tmp_path / "one.bnpg"
    inst.write_text(ONE_PLAYER)
    proc = subprocess.run(
        ["bnpg", "psne", str(inst), "--machine"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "psne=yes" in proc.stdout
