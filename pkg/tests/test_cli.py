# tests/test_cli.py

import json

import pytest

from src.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, build_parser, main
from src.config import settings

# --- Fixtures ---


@pytest.fixture
def write_input(tmp_path):
    """Writes a payload to tmp_path/<name>.json and returns the path as a string."""

    def _write(name, payload):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def triangle_input(write_input):
    return write_input("triangle", {"polytope": {"kind": "simplex", "k": 3}, "cover": {"type": "argmax", "n": 3}})


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


# --- Parser ---


def test_parser_knows_every_command():
    parser = build_parser()
    for command in ("solve-kkm", "pierce", "divide", "hypergraph", "check-cover"):
        args = parser.parse_args([command, "x.json", "--eps", "1/2"])
        assert args.command == command
        assert args.eps == "1/2"
    with pytest.raises(SystemExit):
        parser.parse_args(["unknown", "x.json"])


# --- solve-kkm ---


def test_solve_kkm_writes_certificate_and_trace(triangle_input, tmp_path):
    out = tmp_path / "cert.json"
    code = main(["solve-kkm", triangle_input, "--eps", "1/4", "--out", str(out), "--trace"])
    assert code == EXIT_OK
    payload = _read(out)
    assert sorted(payload["pi"]) == [1, 2, 3]
    assert payload["eps"] == [1, 4]
    assert payload["p"] == [[1, 3], [1, 3], [1, 3]]
    assert payload["summary"]["vertices"] >= 3
    lines = (tmp_path / "cert.trace.jsonl").read_text(encoding="utf-8").splitlines()
    assert lines and json.loads(lines[0])["iteration"] == 0


def test_solve_kkm_default_output_dir(triangle_input, tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "OUTPUT_DIR", tmp_path / "results")
    assert main(["solve-kkm", triangle_input, "--eps", "1/2"]) == EXIT_OK
    assert (tmp_path / "results" / "triangle_solve-kkm.json").exists()


def test_solve_kkm_cover_violation(write_input, tmp_path):
    path = write_input("empty", {"polytope": {"kind": "simplex", "k": 3}, "cover": {"type": "empty", "n": 3}})
    out = tmp_path / "violation.json"
    assert main(["solve-kkm", path, "--out", str(out)]) == EXIT_VIOLATION
    payload = _read(out)
    assert payload["violation"] == "cover"
    assert payload["colors"]


def test_solve_kkm_bad_inputs(write_input, tmp_path):
    assert main(["solve-kkm", str(tmp_path / "missing.json")]) == EXIT_ERROR
    path = write_input("nocover", {"polytope": {"kind": "simplex", "k": 3}})
    assert main(["solve-kkm", path, "--out", str(tmp_path / "x.json")]) == EXIT_ERROR
    floats = write_input(
        "floats", {"polytope": {"kind": "simplex", "k": 3}, "cover": {"type": "argmax", "n": 3, "weights": {"1": [0.5, 1, 1]}}}
    )
    assert main(["solve-kkm", floats, "--out", str(tmp_path / "y.json")]) == EXIT_ERROR


def test_nonpositive_eps_is_rejected(triangle_input):
    assert main(["solve-kkm", triangle_input, "--eps=0"]) == EXIT_ERROR


# --- pierce ---


def test_pierce_writes_matching(write_input, tmp_path):
    families = [[[[z, z]] for z in (i, i + 3, i + 6)] for i in (1, 2, 3)]
    path = write_input("points", {"variant": "general", "d": 1, "k": 3, "families": families})
    out = tmp_path / "matching.json"
    assert main(["pierce", path, "--eps", "1/2", "--out", str(out)]) == EXIT_OK
    payload = _read(out)
    assert payload["size"] == 3
    assert payload["bound"] == 3
    # raw coordinates come back, not normalized ones
    assert all(m["components"][0][0][1] == 1 for m in payload["matching"])


def test_pierce_hypothesis_violation(write_input, tmp_path):
    families = [[[[z, z]] for z in (1, 4, 7)], [[[0, 1]], [["1/2", 2]]], [[[z, z]] for z in (3, 6, 9)]]
    path = write_input("bad", {"variant": "general", "d": 1, "k": 3, "families": families})
    out = tmp_path / "bad_out.json"
    assert main(["pierce", path, "--out", str(out)]) == EXIT_VIOLATION
    payload = _read(out)
    assert payload["violation"] == "hypothesis"
    assert payload["colors"] == [2]
    assert payload["required"] == 3


def test_pierce_separated_three_pieces_two_cakes(write_input, tmp_path):
    """m = 3, d = 2, n = 5: every member is one point in each cake, all points distinct."""
    families = []
    for i in range(1, 6):
        numerators = [5 * (i - 1) + j + 1 for j in range(5)]
        families.append([[[f"{a}/30", f"{a}/30"], [f"{30 + a}/30", f"{30 + a}/30"]] for a in numerators])
    path = write_input("separated", {"variant": "separated", "d": 2, "m": 3, "families": families})
    out = tmp_path / "separated_out.json"
    assert main(["pierce", path, "--eps", "1", "--out", str(out)]) == EXIT_OK
    payload = _read(out)
    assert payload["bound"] == 3
    assert payload["size"] >= 3
    assert len(payload["certificate"]["pi"]) == 5


def test_pierce_hypothesis_cap_flag(write_input, tmp_path, monkeypatch):
    families = [[[[z, z]] for z in (i, i + 3, i + 6)] for i in (1, 2, 3)]
    path = write_input("points", {"variant": "general", "d": 1, "k": 3, "families": families})
    monkeypatch.setattr(settings, "HYPOTHESIS_FAMILY_CAP", 2)
    assert main(["pierce", path, "--eps", "1/2", "--out", str(tmp_path / "capped.json")]) == EXIT_ERROR
    assert not (tmp_path / "capped.json").exists()
    out = tmp_path / "uncapped.json"
    assert main(["pierce", path, "--eps", "1/2", "--no-hypothesis-cap", "--out", str(out)]) == EXIT_OK
    assert _read(out)["size"] == 3


def test_parser_hypothesis_flags():
    args = build_parser().parse_args(["pierce", "x.json", "--no-hypothesis-cap", "--skip-hypothesis"])
    assert args.no_hypothesis_cap and args.skip_hypothesis
    assert not build_parser().parse_args(["pierce", "x.json"]).no_hypothesis_cap


# --- divide ---


def test_divide_writes_allocation(write_input, tmp_path):
    players = [
        {"densities": [[[1, 0, "1/5"]]]},
        {"densities": [[[1, "2/5", "3/5"]]]},
        {"densities": [[[1, "4/5", 1]]]},
    ]
    path = write_input("cake", {"m": 3, "d": 1, "players": players})
    out = tmp_path / "alloc.json"
    assert main(["divide", path, "--out", str(out)]) == EXIT_OK
    payload = _read(out)
    assert payload["size"] == 3
    assert sorted((a["player"], a["pieces"]) for a in payload["allocation"]) == [(1, [1]), (2, [2]), (3, [3])]
    assert len(payload["partition"]["cuts"][0]) == 2


# --- hypergraph and check-cover ---


def test_hypergraph_report(write_input, tmp_path):
    lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
    path = write_input("fano", {"vertices": 7, "edges": lines})
    out = tmp_path / "fano_out.json"
    assert main(["hypergraph", path, "--out", str(out)]) == EXIT_OK
    payload = _read(out)
    assert (payload["nu"], payload["tau"], payload["nu_star"]) == (1, 3, [7, 3])
    assert payload["furedi_bound"] == [1, 1]


def test_check_cover_passes_and_fails(write_input, tmp_path):
    good = write_input("good", {"polytope": {"kind": "simplex", "k": 3}, "cover": {"type": "argmax", "n": 3}})
    out = tmp_path / "good_out.json"
    assert main(["check-cover", good, "--samples", "4", "--seed", "3", "--out", str(out)]) == EXIT_OK
    assert _read(out) == {"violation": None, "m": 3, "samples": 4, "seed": 3}

    bad = write_input(
        "bad", {"polytope": {"kind": "simplex", "k": 3}, "cover": {"type": "argmax", "n": 3, "empty_colors": [1]}}
    )
    out = tmp_path / "bad_out.json"
    assert main(["check-cover", bad, "--samples", "2", "--out", str(out)]) == EXIT_VIOLATION
    assert _read(out)["colors"] == [1]
