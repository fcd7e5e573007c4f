import json
import os
import shutil

import pytest

from doxa.io.bundle import BundleError, load_bundle, write_manifest
from doxa.io.cli import main
from doxa.io.convert import bundle_to_dict, world_from_dict, world_to_dict
from doxa.io.report import Report, exit_code, parse_report

from conftest import fixture_path

RUNNING = fixture_path("running")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out, dict(parse_report(out)) if out.startswith("command:") else {}


def copy_running(tmp_path):
    dst = tmp_path / "running"
    shutil.copytree(RUNNING, dst)
    return dst


def test_report_render_and_parse():
    rep = Report("doxa x")
    rep.add("level", 3)
    rep.add("path", ["s1", "s2"])
    rep.verdict(True)
    rep.code = exit_code(True)
    text = rep.render()
    assert text.splitlines()[0] == "command: doxa x"
    assert parse_report(text)[-1] == ("exit", "0")
    assert ("path", "s1 s2") in parse_report(text)
    assert exit_code(False) == 1 and exit_code(True, definitive=False) == 2


def test_validate_shipped_bundles(capsys):
    for name in ("initially-switched", "permanently-switched", "position-uncertain",
                 "wrong-coarse"):
        code, out, kv = run(capsys, "validate", os.path.join(RUNNING, name + ".doxa"))
        assert code == 0, out
        assert kv["verdict"] == "valid"
    code, _, kv = run(capsys, "validate", os.path.join(RUNNING, "initially-switched.doxa"))
    assert kv["knowledge-consistent"] == "yes"


def test_dangling_belief_id(tmp_path, capsys):
    d = copy_running(tmp_path)
    f = d / "sensor.formation"
    f.write_text(f.read_text().replace("rule r11 -> B01", "rule r11 -> B99"))
    code, out, _ = run(capsys, "validate", str(d / "initially-switched.doxa"))
    assert code == 3
    assert "unknown belief 'B99'" in out
    with pytest.raises(BundleError):
        load_bundle(str(d / "initially-switched.doxa"))


def test_empty_bundle_missing_sections(tmp_path, capsys):
    (tmp_path / "empty.doxa").write_text("# nothing here\n")
    code, out, _ = run(capsys, "validate", str(tmp_path / "empty.doxa"))
    assert code == 3
    for section in ("world", "goals", "obs"):
        assert f"missing-section: {section}" in out


def test_missing_bundle_is_input_error(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "dominance", str(tmp_path / "nope.doxa"))
    assert code == 3 and "not found" in out


def test_manifest_round_trip():
    b, _ = load_bundle(os.path.join(RUNNING, "initially-switched.doxa"))
    text = write_manifest(b)
    for line in ("world design.world", "obs xe ye rp bp", "formation sensor.formation"):
        assert line in text


def test_synth_autonomous_exit_zero(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, kv = run(capsys, "analyze", "synth-autonomous",
                        os.path.join(RUNNING, "initially-switched.doxa"), "--out", str(out_dir))
    assert code == 0, out
    assert kv["verdict"] == "exists"
    assert (out_dir / "autonomous.formation").exists()
    from doxa.beliefs import parse_formation
    parse_formation((out_dir / "autonomous.formation").read_text())


def test_conserve_autonomous_exit_one(tmp_path, capsys):
    code, out, kv = run(capsys, "analyze", "conserve-autonomous",
                        os.path.join(RUNNING, "permanently-switched.doxa"),
                        "--out", str(tmp_path))
    assert code == 1
    assert kv["verdict"] == "no" and kv["definitive"] == "yes"
    assert "counterexample" in kv
    assert (tmp_path / "counterexample.txt").exists()
    assert (tmp_path / "counterexample.svg").exists()


def test_simulate_slow(capsys):
    code, out, kv = run(capsys, "analyze", "simulate",
                        os.path.join(RUNNING, "initially-switched.doxa"), "--env", "slow",
                        "--strategy", "sigma_b")
    assert code == 0, out
    steps = [line for line in out.splitlines() if line.startswith("step ")]
    assert [s.split()[2] for s in steps] == ["s1", "s2", "s3", "s5"]
    assert all(" f/" in s for s in steps)
    assert kv["level"] == "3"


def test_reports_are_byte_identical(capsys):
    argv = ("analyze", "dominance", os.path.join(RUNNING, "initially-switched.doxa"))
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_unknown_env_is_input_error(capsys):
    code, out, _ = run(capsys, "analyze", "simulate",
                       os.path.join(RUNNING, "initially-switched.doxa"), "--env", "missing",
                       "--strategy", "sigma_b")
    assert code == 3


def test_convert_json(tmp_path, capsys):
    target = tmp_path / "bundle.json"
    code, out, _ = run(capsys, "convert", os.path.join(RUNNING, "initially-switched.doxa"),
                       "--out", str(target))
    assert code == 0
    data = json.loads(target.read_text())
    assert data["obs"] == ["xe", "ye", "rp", "bp"]
    assert data["goals"][0]["priority"] == 1
    assert {b["id"] for b in data["catalog"]["beliefs"]} >= {"B01", "B12"}
    b, _ = load_bundle(os.path.join(RUNNING, "initially-switched.doxa"))
    assert world_from_dict(data["world"]) == b.world
    assert json.loads(json.dumps(bundle_to_dict(b))) == data


def test_world_dict_round_trip():
    b, _ = load_bundle(os.path.join(RUNNING, "initially-switched.doxa"))
    for w in [b.world] + list(b.catalog.worlds().values()):
        assert world_from_dict(world_to_dict(w)) == w


def test_plots_written(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "simulate",
                       os.path.join(RUNNING, "initially-switched.doxa"), "--env", "hasty",
                       "--strategy", "sigma_b", "--out", str(tmp_path))
    assert code == 0, out
    svg = (tmp_path / "simulation.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
