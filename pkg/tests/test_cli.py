import csv
import io
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from conjoint import catalog
from conjoint.cli import cmd_compare, cmd_joint, cmd_predict, cmd_retrodict, cmd_sample, cmd_validate, main
from conjoint.model import assemble_complete_state
from conjoint.oracle import enumerate_joint
from conjoint.probability import joint_distribution, marginal_a, marginal_b

DATA = Path(__file__).parent / "data"
UNNORMALIZED = str(DATA / "unnormalized.scenario")


def fx(name):
    return str(catalog.fixture_path(name))


def read_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows, "empty csv"
    return rows


def table_from_csv(rows, quantity, shape):
    out = np.full(shape, np.nan)
    for r in rows:
        if r["quantity"] == quantity:
            out[int(r["a"]), int(r["b"])] = float(r["value"]) if r["value"] else np.nan
    return out


def engine_joint(name):
    s = catalog.build(name).scenario
    return joint_distribution(assemble_complete_state(s.preparation), s.evolution, s.basis_a, s.basis_b)


class TestValidate:
    def test_ok(self):
        out = cmd_validate(fx("bell"))
        assert (out.exit_code, out.rendered) == (0, "OK\n")

    def test_unnormalized(self):
        out = cmd_validate(UNNORMALIZED)
        assert out.exit_code == 1 and out.rendered == ""
        assert "scenario.preparation.amplitudes" in out.errors and "residual 1" in out.errors

    def test_missing_file(self):
        assert cmd_validate(str(DATA / "absent.scenario")).exit_code == 2

    def test_eps_override(self, tmp_path):
        text = catalog.fixture_path("bell").read_text().replace("0.70710678118654746", "0.7071068", 1)
        path = tmp_path / "loose.scenario"
        path.write_text(text)
        assert cmd_validate(str(path)).exit_code == 1
        assert cmd_validate(str(path), eps=1e-6).exit_code == 0

    def test_bad_eps_is_usage_error(self):
        assert cmd_validate(fx("bell"), eps=0.1).exit_code == 2


class TestJoint:
    def test_bell_text(self):
        out = cmd_joint(fx("bell"))
        assert out.exit_code == 0
        lines = out.rendered.splitlines()
        assert lines[3].split() == ["a=0", "0.5000", "0.0000", "0.5000"]
        assert lines[4].split() == ["a=1", "0.0000", "0.5000", "0.5000"]
        assert lines[5].split() == ["p(B=b)", "0.5000", "0.5000"]

    def test_cnot_mass_in_first_column(self):
        out = cmd_joint(fx("cnot-interaction"), fmt="csv")
        got = table_from_csv(read_csv(out.rendered), "joint", (2, 2))
        np.testing.assert_allclose(got, enumerate_joint(catalog.build("cnot-interaction").scenario).p, atol=1e-12)
        assert got[:, 1].tolist() == [0, 0]

    @pytest.mark.parametrize("name", catalog.FIXTURE_NAMES)
    def test_csv_reparses_to_engine_values(self, name):
        jt = engine_joint(name)
        rows = read_csv(cmd_joint(fx(name), fmt="csv").rendered)
        assert np.max(np.abs(table_from_csv(rows, "joint", jt.shape) - jt.p)) <= 1e-12
        ma = [float(r["value"]) for r in rows if r["quantity"] == "marginal_a"]
        mb = [float(r["value"]) for r in rows if r["quantity"] == "marginal_b"]
        np.testing.assert_allclose(ma, marginal_a(jt), atol=1e-12)
        np.testing.assert_allclose(mb, marginal_b(jt), atol=1e-12)

    def test_invalid_writes_no_table(self):
        out = cmd_joint(UNNORMALIZED)
        assert out.exit_code == 1 and out.rendered == ""


class TestConditionals:
    def test_bell_retrodict(self):
        lines = cmd_retrodict(fx("bell")).rendered.splitlines()
        assert lines[3].split() == ["a=0", "1.0000", "0.0000"]
        assert lines[4].split() == ["a=1", "0.0000", "1.0000"]

    def test_non_orthogonal_retrodict(self):
        out = cmd_retrodict(fx("non-orthogonal"))
        assert out.rendered.splitlines()[3].split()[1] == "0.6667"

    def test_cnot_retrodict_masks_column(self):
        out = cmd_retrodict(fx("cnot-interaction"))
        lines = out.rendered.splitlines()
        assert [line.split()[2] for line in lines[3:5]] == ["—", "—"]
        assert "p(B=1) = 0" in out.rendered

    def test_cnot_retrodict_csv_masked_blank(self):
        rows = read_csv(cmd_retrodict(fx("cnot-interaction"), fmt="csv").rendered)
        assert [r["value"] for r in rows if r["b"] == "1"] == ["", ""]

    def test_predict(self):
        out = cmd_predict(fx("non-orthogonal"))
        lines = out.rendered.splitlines()
        assert lines[3].split() == ["a=0", "1.0000", "0.0000"]
        assert lines[4].split() == ["a=1", "0.5000", "0.5000"]

    def test_invalid(self):
        assert cmd_predict(UNNORMALIZED).exit_code == 1
        assert cmd_retrodict(UNNORMALIZED).exit_code == 1


class TestCompare:
    @pytest.mark.parametrize("name,tv", [("embedded-local-joint", "0.0000"), ("cnot-interaction", "0.5000"), ("bell", "0.0000")])
    def test_total_variation(self, name, tv):
        out = cmd_compare(fx(name))
        assert out.exit_code == 0
        assert f"total_variation  {tv}" in out.rendered

    def test_csv(self):
        rows = read_csv(cmd_compare(fx("cnot-interaction"), fmt="csv").rendered)
        tv = [float(r["value"]) for r in rows if r["quantity"] == "total_variation"]
        assert tv == [pytest.approx(0.5, abs=1e-12)]
        np.testing.assert_allclose(table_from_csv(rows, "conventional", (2, 2)), [[0.5, 0], [0, 0.5]], atol=1e-15)

    def test_invalid(self):
        assert cmd_compare(UNNORMALIZED).exit_code == 1


class TestSample:
    def test_bell_million(self):
        out = cmd_sample(fx("bell"), n=10**6, seed=20261016, fmt="csv")
        rows = read_csv(out.rendered)
        (tv,) = [float(r["value"]) for r in rows if r["quantity"] == "tv_distance"]
        assert tv <= 0.005

    def test_deterministic_fixture(self):
        out = cmd_sample(fx("single-outcome"), n=1000, seed=1)
        assert "tv_distance  0.0000" in out.rendered

    def test_repeatable(self):
        assert cmd_sample(fx("random-seeded"), n=5000, seed=9).rendered == cmd_sample(fx("random-seeded"), n=5000, seed=9).rendered

    @pytest.mark.parametrize("n", [None, 0])
    def test_missing_or_zero_n(self, n):
        assert cmd_sample(fx("bell"), n=n).exit_code == 2


class TestClickWiring:
    def run(self, *args):
        return CliRunner().invoke(main, list(args))

    def test_validate(self):
        result = self.run("validate", fx("bell"))
        assert result.exit_code == 0 and result.stdout == "OK\n"

    def test_diagnostics_on_stderr(self):
        result = self.run("joint", UNNORMALIZED)
        assert result.exit_code == 1
        assert result.stdout == ""
        assert "amplitudes" in result.stderr

    def test_missing_file(self):
        assert self.run("validate", "does-not-exist.scenario").exit_code == 2

    def test_sample_requires_n(self):
        assert self.run("sample", fx("bell")).exit_code == 2
        assert self.run("sample", fx("bell"), "--n", "0").exit_code == 2

    def test_unknown_format(self):
        assert self.run("joint", fx("bell"), "--format", "xml").exit_code == 2

    def test_eps_flag(self):
        assert self.run("compare", fx("cnot-interaction"), "--eps", "1e-8").exit_code == 0

    def test_sample_byte_identical(self):
        a = self.run("sample", fx("bell"), "--n", "20000", "--seed", "3")
        b = self.run("sample", fx("bell"), "--n", "20000", "--seed", "3", "--workers", "3")
        assert a.exit_code == 0 and a.stdout == b.stdout

    def test_module_entry_point(self):
        import subprocess
        import sys

        proc = subprocess.run([sys.executable, "-m", "conjoint", "compare", fx("cnot-interaction")],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "total_variation  0.5000" in proc.stdout
