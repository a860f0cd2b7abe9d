import json

import pytest

from tamebox import PartialInjection
from tamebox.cli import main
from tamebox.documents import serialize_document
from tamebox.injections import QuasiAffineInjection, interleave
from tamebox.iset import representable_iset, restriction_coequalizer
from tamebox.mset import injection_mset, unit_mset
from tamebox.opalg import OperadElement


@pytest.fixture()
def workspace(tmp_path):
    def write(name, kind, value):
        path = tmp_path / name
        path.write_text(serialize_document(kind, value) + "\n")
        return str(path)

    return tmp_path, write


def run(capsys, *argv):
    code = main(["--deterministic", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCommands:
    def test_support(self, capsys):
        code, rep = run(
            capsys, "support",
            "--element", '{"level":2,"image":[1,3],"point":"a"}',
        )
        assert code == 0
        assert rep["value"] == [1, 3]

    def test_act(self, capsys, workspace):
        _, write = workspace
        inj = write("f.json", "partial-injection", PartialInjection({1: 4, 2: 1}))
        mset = write("m.json", "mset", injection_mset(2))
        code, rep = run(
            capsys, "act", inj, mset,
            "--element", '{"level":2,"image":[1,2],"point":"p0"}',
        )
        assert code == 0
        assert rep["value"]["image"] == [1, 4]

    def test_box_of_injections(self, capsys, workspace):
        _, write = workspace
        i1 = write("i1.json", "mset", injection_mset(1))
        code, rep = run(capsys, "box", i1, i1)
        assert code == 0
        assert rep["value"]["payload"]["maxLevel"] == 2
        level2 = rep["value"]["payload"]["levels"]["2"]
        assert len(level2["points"]) == 2

    def test_decompose_round_trip(self, capsys, workspace):
        _, write = workspace
        m = write("m.json", "mset", injection_mset(2))
        code, rep = run(capsys, "--window", "6", "decompose", m)
        assert code == 0 and rep["outcome"] == "pass"

    def test_flat_check_failure_witness(self, capsys, workspace):
        _, write = workspace
        q = write("q.json", "iset", restriction_coequalizer(4))
        code, rep = run(capsys, "flat-check", "--mode", "both", q)
        assert code == 1
        assert rep["outcome"] == "fail"
        assert "2" in rep["counterexample"]

    def test_flat_check_pass(self, capsys, workspace):
        _, write = workspace
        r = write("r.json", "iset", representable_iset(1, 4))
        code, rep = run(capsys, "flat-check", "--mode", "both", r)
        assert code == 0

    def test_flatten_and_n_iso(self, capsys, workspace, tmp_path):
        _, write = workspace
        q = write("q.json", "iset", restriction_coequalizer(4))
        code, rep = run(capsys, "flatten", q)
        assert code == 0
        assert rep["value"]["unitLevelwiseBijective"] is False
        morphism = {"kind": "morphism", "formatVersion": 1,
                    "payload": rep["value"]["unit"]}
        path = tmp_path / "eta.json"
        path.write_text(json.dumps(morphism))
        code, rep = run(capsys, "n-iso", str(path))
        assert code == 0 and rep["outcome"] == "pass"

    def test_day_then_canonicalize(self, capsys, workspace):
        _, write = workspace
        r = write("r.json", "iset", representable_iset(1, 4))
        code, rep = run(capsys, "day", r, r)
        assert code == 0
        day_path = workspace[0] / "day.json"
        day_path.write_text(json.dumps(rep["value"]))
        code, rep = run(capsys, "canonicalize", str(day_path))
        assert code == 0
        assert set(rep["value"]["payload"]["levels"]) == {"2"}

    def test_xinf_and_sum(self, capsys, workspace, tmp_path):
        code, rep = run(capsys, "xinf", "--points", "2", "--level", "4")
        assert code == 0
        path = tmp_path / "p.json"
        path.write_text(json.dumps(rep["value"]))
        code, rep = run(
            capsys, "sum", str(path),
            "--x", '{"level":1,"image":[2],"point":"p0"}',
            "--y", '{"level":1,"image":[5],"point":"p0"}',
        )
        assert code == 0
        assert rep["value"]["image"] == [2, 5]

    def test_operad_act(self, capsys, workspace, tmp_path):
        code, rep = run(capsys, "xinf", "--points", "3", "--level", "4")
        monoid = tmp_path / "m.json"
        monoid.write_text(json.dumps(rep["value"]))
        op = tmp_path / "op.json"
        op.write_text(serialize_document("operad-element", interleave()))
        code, rep = run(
            capsys, "operad-act", str(monoid), str(op),
            "--args",
            '[{"level":1,"image":[1],"point":"p0"},'
            '{"level":1,"image":[1],"point":"p1"}]',
        )
        assert code == 0
        assert rep["value"]["level"] == 2

    def test_monoid_round_trip_commands(self, capsys, workspace, tmp_path):
        code, rep = run(capsys, "xinf", "--points", "2", "--level", "3")
        monoid = tmp_path / "m.json"
        monoid.write_text(json.dumps(rep["value"]))
        code, rep = run(capsys, "to-algebra", str(monoid))
        assert code == 0 and rep["outcome"] == "pass"
        code, rep = run(capsys, "to-monoid", str(monoid))
        assert code == 0 and rep["outcome"] == "pass"

    def test_certificates(self, capsys, workspace, tmp_path):
        _, write = workspace
        s = interleave()
        phi = OperadElement(
            [s.slot(1).compose(QuasiAffineInjection.affine(3, 0)),
             s.slot(2).compose(QuasiAffineInjection.affine(1, 2))]
        )
        phi_path = write("phi.json", "operad-element", phi)
        psi_path = write("psi.json", "operad-element", s)
        cert_path = tmp_path / "cert.json"
        code, rep = run(
            capsys, "a3", "--phi", phi_path, "--psi", psi_path,
            "--constraints", "[[],[]]", "--emit", str(cert_path),
        )
        assert code == 0 and rep["outcome"] == "pass"
        assert rep["value"]["chainLength"] > 0
        code, rep = run(
            capsys, "verify-cert", str(cert_path),
            "--phi", phi_path, "--psi", psi_path,
        )
        assert code == 0 and rep["outcome"] == "pass"
        code, rep = run(
            capsys, "verify-cert", str(cert_path),
            "--phi", psi_path, "--psi", phi_path,
        )
        assert code == 1 and rep["outcome"] == "fail"

    def test_chi(self, capsys, workspace, tmp_path):
        _, write = workspace
        op = write("op.json", "operad-element", interleave())
        m = write("m.json", "mset", injection_mset(1))
        code, rep = run(
            capsys, "chi", op, m, m,
            "--x", '{"level":1,"image":[2],"point":"p0"}',
            "--y", '{"level":1,"image":[1],"point":"p0"}',
        )
        assert code == 0
        assert rep["value"]["first"]["image"] == [3]
        assert rep["value"]["second"]["image"] == [2]

    def test_wedge(self, capsys):
        code, rep = run(capsys, "wedge-iso", "--x", "2", "--y", "3",
                        "--level", "2")
        assert code == 0
        assert rep["value"]["2"] == 9

    def test_orbit_set(self, capsys, workspace):
        _, write = workspace
        m = write("m.json", "mset", injection_mset(3))
        code, rep = run(capsys, "orbit-set", m)
        assert code == 0
        assert len(rep["value"]) == 1

    def test_selftest_small(self, capsys):
        code, rep = run(capsys, "selftest", "--seed", "5", "--cases", "2")
        assert code == 0
        assert rep["outcome"] == "pass"
        assert {s["name"] for s in rep["value"]["suites"]} >= {
            "decomposition-round-trip",
            "agreement-certificates",
        }


class TestReportDiscipline:
    def test_input_error_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "qa-injection", "payload": {"pieces": []}}')
        code, rep = run(capsys, "canonicalize", str(bad))
        assert code == 2
        assert rep["outcome"] == "error"

    def test_reports_byte_identical(self, capsys, workspace):
        _, write = workspace
        m = write("m.json", "mset", unit_mset())
        main(["--deterministic", "orbit-set", m])
        first = capsys.readouterr().out
        main(["--deterministic", "orbit-set", m])
        second = capsys.readouterr().out
        assert first == second

    def test_timing_present_by_default(self, capsys, workspace):
        _, write = workspace
        m = write("m.json", "mset", unit_mset())
        main(["orbit-set", m])
        rep = json.loads(capsys.readouterr().out)
        assert "elapsedMs" in rep
