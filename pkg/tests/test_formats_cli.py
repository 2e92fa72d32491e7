import json
import subprocess
import sys

import pytest

from twistgpd.algebra import Element
from twistgpd.cli import main
from twistgpd.errors import MalformedSpec, ParseError, StructureError, UnknownArrow
from twistgpd.formats import (
    arrow_from_json,
    arrow_to_json,
    build_model,
    cocycle_from_json,
    element_from_json,
    element_to_json,
    load_element_file,
    load_model_file,
    model_to_json,
)
from twistgpd.groupoid import GroupModel, Pair
from twistgpd.groups import zd
from twistgpd.phase import Cyclo

MODEL_SPECS = [
    {"kind": "pair", "n": 3},
    {"kind": "group", "group": {"family": "zd", "d": 2}},
    {"kind": "group", "group": {"family": "lamplighter", "m": 2}},
    {"kind": "group_bundle", "units": [0, 1], "groups": [{"family": "cyclic", "n": 2}, {"family": "zd", "d": 1}]},
    {"kind": "transformation", "points": ["a", "b"], "group": {"family": "cyclic", "n": 4},
     "action": {"generators": [[1, 0]]}},
    {"kind": "cylinder_shift", "alphabet": 2, "forbidden": [[1, 1]]},
    {"kind": "finite", "units": [0], "range": [0, 0], "source": [0, 0], "inverse": [0, 1],
     "compose": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]},
    {"kind": "pair", "n": 2, "weak_containment": "unknown"},
]

ORACLE = {"format_version": 1, "terms": [
    {"arrow": {"n": 0}, "re": "1"}, {"arrow": {"n": 1}, "re": "1"}, {"arrow": {"n": 2}, "im": "1"},
]}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run_cli(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


class TestModels:
    @pytest.mark.parametrize("spec", MODEL_SPECS, ids=lambda s: s["kind"])
    def test_round_trip(self, spec):
        model = build_model(spec)
        again = build_model(model_to_json(model))
        assert model_to_json(again) == model_to_json(model)

    def test_load_pair(self, tmp_path):
        model = load_model_file(write(tmp_path, "m.json", {"format_version": 1, "kind": "pair", "n": 3}))
        assert isinstance(model, Pair) and len(model.units()) == 3

    def test_version_required_in_files(self, tmp_path):
        with pytest.raises(MalformedSpec) as err:
            load_model_file(write(tmp_path, "m.json", {"kind": "pair", "n": 3}))
        assert err.value.context["field"] == "format_version"

    def test_unknown_field_named(self, tmp_path):
        with pytest.raises(MalformedSpec) as err:
            load_model_file(write(tmp_path, "m.json", {"format_version": 1, "kind": "pair", "n": 3, "size": 4}))
        assert err.value.context["path"].endswith("m.json")

    def test_negative_alphabet(self):
        with pytest.raises(MalformedSpec):
            build_model({"kind": "cylinder_shift", "alphabet": -1})

    def test_broken_composition(self):
        spec = dict(MODEL_SPECS[6], compose=[[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]])
        with pytest.raises(StructureError) as err:
            build_model(spec)
        assert err.value.context["witness"]

    def test_parse_error_has_line(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_model_file(write(tmp_path, "m.json", '{\n  "kind": "pair",\n  "n": 3,\n}'))
        assert err.value.context["line"] == 4


class TestElements:
    def test_oracle_element(self, tmp_path):
        model = GroupModel(zd(1))
        f = load_element_file(write(tmp_path, "f.json", ORACLE), model)
        assert f == Element.build(model, [((0,), 1), ((1,), 1), ((2,), Cyclo.root(1, 4))])

    def test_duplicates_summed(self):
        model = GroupModel(zd(1))
        f = element_from_json(model, {"format_version": 1, "terms": [
            {"arrow": {"n": 1}, "re": "1/2"}, {"arrow": {"n": 1}, "re": "1/2", "im": "1"}]})
        assert f == Element.delta(model, (1,), Cyclo.gaussian(1, 1))

    def test_unknown_arrow(self):
        model = build_model(MODEL_SPECS[6])
        with pytest.raises(UnknownArrow):
            element_from_json(model, {"format_version": 1, "terms": [{"arrow": {"id": 7}, "re": 1}]})

    def test_float_input_is_inexact(self):
        f = element_from_json(GroupModel(zd(1)), {"format_version": 1, "terms": [{"arrow": {"n": 0}, "re": 0.5}]})
        assert not f.exact

    @pytest.mark.parametrize("spec", MODEL_SPECS[:7], ids=lambda s: s["kind"])
    def test_element_round_trip(self, spec):
        model = build_model(spec)
        if model.is_finite:
            arrows = model.arrows()[:4]
            f = Element.build(model, [(a, Cyclo.root(k, 12) * (k + 1)) for k, a in enumerate(arrows)])
        elif spec["kind"] == "cylinder_shift":
            f = Element.build(model, [(({0: 0, 1: 1}, 1), Cyclo.root(1, 3)), (({-1: 1}, 0), 2)])
        else:
            f = Element.build(model, [(model.unit_arrow(model.units()[0]), Cyclo.root(1, 5))])
        g = element_from_json(model, element_to_json(f))
        assert g == f
        assert element_to_json(g) == element_to_json(f)

    def test_arrow_round_trip(self):
        model = build_model(MODEL_SPECS[4])
        for a in model.arrows():
            assert arrow_from_json(model, arrow_to_json(model, a)) == a


class TestCocycles:
    def test_table_on_pair(self):
        sigma = cocycle_from_json(Pair(2), {"format_version": 1, "kind": "table", "denominator": 2,
                                            "entries": [[{"pair": [0, 1]}, {"pair": [1, 0]}, 1]]})
        assert str(sigma.phase((0, 1), (1, 0))) == "1/2"

    def test_transformation_takes_pullbacks_only(self):
        model = build_model(MODEL_SPECS[4])
        with pytest.raises(MalformedSpec):
            cocycle_from_json(model, {"format_version": 1, "kind": "bicharacter", "theta": [[0]]})

    def test_weak_containment_flag_checked(self):
        with pytest.raises(MalformedSpec):
            cocycle_from_json(Pair(2), {"format_version": 1, "kind": "trivial", "weak_containment": "maybe"})


@pytest.fixture
def files(tmp_path):
    z = write(tmp_path, "z.json", {"format_version": 1, "kind": "group", "group": {"family": "zd", "d": 1}})
    return {
        "z": z,
        "shift": write(tmp_path, "shift.json", {"format_version": 1, "kind": "cylinder_shift", "alphabet": 2}),
        "trivial": write(tmp_path, "trivial.json", {"format_version": 1, "kind": "trivial"}),
        "f": write(tmp_path, "f.json", ORACLE),
        "pair": write(tmp_path, "pair.json", {"format_version": 1, "kind": "pair", "n": 2,
                                              "weak_containment": "unknown"}),
        "klein": write(tmp_path, "klein.json", {"format_version": 1, "kind": "group",
                                                "group": {"family": "product", "orders": [2, 2]}}),
        "twist": write(tmp_path, "twist.json", {"format_version": 1, "kind": "bicharacter",
                                                "theta": [[0, 0], ["1/2", 0]]}),
        "bad_table": write(tmp_path, "bad.json", {"format_version": 1, "kind": "table", "denominator": 4,
                                                  "entries": [[{"pair": [0, 1]}, {"pair": [1, 0]}, 1]]}),
        "pair2": write(tmp_path, "pair2.json", {"format_version": 1, "kind": "pair", "n": 2}),
        "cfg": write(tmp_path, "cfg.json", {"format_version": 1, "truncation": 32, "seed": 5}),
        "tmp": tmp_path,
    }


class TestCli:
    def test_norm(self, capsys, files):
        status, out = run_cli(capsys, "norm", "--model", files["z"], "--element", files["f"], "--output", "json")
        rec = json.loads(out)
        assert status == 0 and rec["i_norm"]["value"] == 3.0

    def test_conv_and_involve(self, capsys, files):
        status, out = run_cli(capsys, "conv", "--model", files["z"], "--element", files["f"], "--element",
                              files["f"], "--output", "json")
        assert status == 0 and len(json.loads(out)["result"]["terms"]) == 5
        status, out = run_cli(capsys, "involve", "--model", files["z"], "--element", files["f"], "--output", "json")
        arrows = sorted(t["arrow"]["g"] for t in json.loads(out)["result"]["terms"])
        assert arrows == [-2, -1, 0]

    def test_reduced_norm(self, capsys, files):
        status, out = run_cli(capsys, "reduced-norm", "--model", files["z"], "--element", files["f"],
                              "--truncation", "128", "--tol", "1e-8", "--output", "json")
        est = json.loads(out)["estimate"]
        assert status == 0 and 2.7 < est["lower"] <= est["upper"] == 3.0

    def test_analyze_shift(self, capsys, files):
        status, out = run_cli(capsys, "analyze", "--model", files["shift"], "--cocycle", files["trivial"],
                              "--depth", "4", "--output", "json")
        assert status == 0 and json.loads(out)["verdict"] == "CStarUnique"

    def test_analyze_inconclusive_exit(self, capsys, files):
        status, out = run_cli(capsys, "analyze", "--model", files["pair"], "--output", "json")
        assert status == 3 and json.loads(out)["verdict"] == "Inconclusive"

    def test_validate_and_decompose(self, capsys, files):
        status, out = run_cli(capsys, "validate", "--model", files["klein"], "--cocycle", files["twist"],
                              "--output", "json")
        assert status == 0 and json.loads(out)["validation"]["valid"]
        status, out = run_cli(capsys, "decompose", "--model", files["klein"], "--cocycle", files["twist"],
                              "--output", "json")
        assert [b["dimension"] for b in json.loads(out)["blocks"]["blocks"]] == [2]

    def test_validation_failure_exit(self, capsys, files):
        status, out = run_cli(capsys, "validate", "--model", files["pair2"], "--cocycle", files["bad_table"],
                              "--output", "json")
        rec = json.loads(out)
        assert status == 2 and rec["error"] == "CocycleViolation" and rec["witness"]

    def test_principal_text_output(self, capsys, files):
        status, out = run_cli(capsys, "principal", "--model", files["shift"], "--depth", "3")
        assert status == 0 and "outcome: yes" in out

    def test_input_errors_exit_four(self, capsys, files):
        status, out = run_cli(capsys, "norm", "--model", str(files["tmp"] / "missing.json"), "--output", "json")
        assert status == 4 and json.loads(out)["error"] == "ParseError"
        status, _ = run_cli(capsys, "norm", "--model", files["z"], "--output", "json")
        assert status == 4
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "--model", files["z"]])
        assert exc.value.code == 4

    def test_config_file(self, capsys, files):
        status, out = run_cli(capsys, "reduced-norm", "--model", files["z"], "--element", files["f"],
                              "--config", files["cfg"], "--output", "json")
        rec = json.loads(out)
        assert rec["seed"] == 5 and rec["estimate"]["truncations"] == [32]
        _, out = run_cli(capsys, "reduced-norm", "--model", files["z"], "--element", files["f"],
                         "--config", files["cfg"], "--truncation", "16", "--output", "json")
        assert json.loads(out)["estimate"]["truncations"] == [16]

    def test_byte_identical_reports(self, capsys, files):
        argv = ["reduced-norm", "--model", files["z"], "--element", files["f"], "--truncation", "64",
                "--seed", "3", "--output", "json"]
        assert run_cli(capsys, *argv) == run_cli(capsys, *argv)

    def test_console_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "twistgpd.cli", "norm", "--model", files["z"], "--element",
                               files["f"], "--output", "json"], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["i_norm"]["value"] == 3.0
