"""Command-line interface: exit codes, diagnostics, library equality."""

import json
import re

import pytest
import yaml
from click.testing import CliRunner

from euarch import fixtures
from euarch.cli import main
from euarch.compiler import compile_architecture

UNATTACHED = """architecture Bad : DNA {
  component d : Delete;
}
"""


@pytest.fixture
def ws(tmp_path):
    """A working directory with style, architecture, and config files."""
    (tmp_path / "dna.eus").write_text(fixtures.DNA_STYLE)
    (tmp_path / "workflow.eus").write_text(fixtures.WORKFLOW_STYLE)
    (tmp_path / "fig5.eua").write_text(fixtures.FIG5_ARCH)
    (tmp_path / "bad.eua").write_text(UNATTACHED)
    (tmp_path / "broken.eua").write_text("architecture Broken {")
    (tmp_path / "bindings.yaml").write_text(yaml.safe_dump(
        {t: {"kind": b.kind, "ref": b.ref}
         for t, b in fixtures.DNA_BINDINGS.items()}))
    (tmp_path / "costs.yaml").write_text(yaml.safe_dump(
        {t: {"fixed_seconds": 1.0}
         for t in fixtures.resolved("DNA").component_types}))
    return tmp_path


def _invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def _styles(ws):
    return ["--style", ws / "dna.eus", "--style", ws / "workflow.eus"]


# -- check --------------------------------------------------------------------

def test_check_clean_exits_zero(ws):
    result = _invoke("check", ws / "fig5.eua", *_styles(ws))
    assert result.exit_code == 0
    assert result.output == ""


def test_check_violations_exit_one_with_rule_lines(ws):
    result = _invoke("check", ws / "bad.eua", *_styles(ws))
    assert result.exit_code == 1
    assert re.search(r"^error: UNATTACHED_PORT: ", result.output, re.M)


def test_parse_diagnostics_are_located(ws):
    result = _invoke("check", ws / "broken.eua", *_styles(ws))
    assert result.exit_code == 1
    assert re.search(r"broken\.eua:\d+:\d+: error: ", result.stderr)


def test_missing_style_option_is_usage_error(ws):
    result = _invoke("check", ws / "fig5.eua")
    assert result.exit_code == 2


def test_unknown_subcommand_is_usage_error():
    assert _invoke("frobnicate").exit_code == 2


# -- analyze ------------------------------------------------------------------

def test_analyze_performance_matches_library(ws, dna_style, email_arch):
    from euarch.analyses import CostModel, performance_estimate
    from euarch.analyses.performance import CostEntry
    result = _invoke("analyze", "performance", ws / "fig5.eua", *_styles(ws),
                     "--costs", ws / "costs.yaml")
    assert result.exit_code == 0
    expected = performance_estimate(email_arch, dna_style, {}, CostModel(
        entries={t: CostEntry(fixed_seconds=1.0)
                 for t in dna_style.component_types}))
    assert float(result.output.strip()) == expected


def test_analyze_security_reports_auth_scheme(ws):
    result = _invoke("analyze", "security", ws / "fig5.eua", *_styles(ws))
    assert result.exit_code == 1
    assert "AUTH_SCHEME" in result.output


def test_analyze_rejects_unknown_analysis(ws):
    result = _invoke("analyze", "nonsense", ws / "fig5.eua", *_styles(ws))
    assert result.exit_code == 2


# -- compile and run ----------------------------------------------------------

def _compile(ws):
    plan_file = ws / "plan.json"
    result = _invoke("compile", ws / "fig5.eua", *_styles(ws),
                     "--bindings", ws / "bindings.yaml", "--out", plan_file)
    assert result.exit_code == 0
    return plan_file


def test_compile_writes_the_library_plan(ws, dna_style, email_arch):
    plan_file = _compile(ws)
    expected = compile_architecture(email_arch, dna_style, fixtures.DNA_BINDINGS)
    assert json.loads(plan_file.read_text()) == expected.to_dict()


def test_run_completes_and_dumps_history(ws):
    plan_file = _compile(ws)
    history_file = ws / "history.json"
    result = _invoke("run", plan_file, "--user", "ann",
                     "--history-out", history_file)
    assert result.exit_code == 0
    session = json.loads(result.output)
    assert session["status"] == "Completed"
    records = json.loads(history_file.read_text())
    assert [r["record_id"] for r in records] == session["record_ids"]


def test_run_respects_access_rules(ws):
    plan_file = _compile(ws)
    (ws / "rules.yaml").write_text(yaml.safe_dump(
        [{"principal": "ann", "resource": "Delete", "action": "use"}]))
    result = _invoke("run", plan_file, "--user", "ann",
                     "--rules", ws / "rules.yaml")
    assert result.exit_code == 1
    assert "error:" in result.stderr


def test_step_advances_count_steps(ws):
    plan_file = _compile(ws)
    result = _invoke("step", plan_file, "--count", "2")
    assert result.exit_code == 0
    session = json.loads(result.output)
    assert session["status"] == "Paused"
    assert list(session["step_states"].values()).count("Done") == 2


# -- repo ---------------------------------------------------------------------

def test_repo_seed_then_search(ws):
    repo_dir = ws / "repo"
    assert _invoke("repo", "seed", repo_dir, "--count", "12").exit_code == 0
    result = _invoke("repo", "search", repo_dir,
                     "--prefix", "root/TextProcessing")
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert len(lines) == 4
    assert all("root/TextProcessing" in line for line in lines)


def test_repo_register_prints_entry_id(ws):
    repo_dir = ws / "repo2"
    result = _invoke("repo", "register", repo_dir, "Delete", *_styles(ws),
                     "--ontology", "root/Text/Clean")
    assert result.exit_code == 0
    assert result.output.strip() == "Delete@1"
    again = _invoke("repo", "register", repo_dir, "Delete", *_styles(ws),
                    "--ontology", "root/Text/Clean")
    assert again.output.strip() == "Delete@2"


def test_repo_register_unknown_type_fails(ws):
    result = _invoke("repo", "register", ws / "repo3", "Ghost", *_styles(ws),
                     "--ontology", "root/X")
    assert result.exit_code == 1


# -- history ------------------------------------------------------------------

def test_history_list_and_synth_round_trip(ws):
    plan_file = _compile(ws)
    history_file = ws / "history.json"
    store_dir = ws / "store"
    assert _invoke("run", plan_file, "--user", "ann", "--store", store_dir,
                   "--history-out", history_file).exit_code == 0

    listed = _invoke("history", "list", history_file, "--user", "ann")
    assert listed.exit_code == 0
    assert all("\tann\t" in line
               for line in listed.output.strip().splitlines())

    synth = _invoke("history", "synth", history_file, *_styles(ws),
                    "--style-name", "DNA", "--store", store_dir)
    assert synth.exit_code == 0
    arch_file = ws / "synth.eua"
    arch_file.write_text(synth.output)
    assert _invoke("check", arch_file, *_styles(ws)).exit_code == 0
