import pytest

from internames.cli import main
from internames.errors import InvalidStep, ParseError, ValidationError
from internames.fabric import EventKind
from internames.scenario import (
    BUILTIN_NAMES,
    MigrationPlan,
    apply_migration,
    diff_trace,
    golden_trace,
    load_builtin,
    parse_plan,
    parse_scenario,
    run_scenario,
    save_scenario,
)

ALL_SOURCES = ("fig3", "mobility-return", "reverse-multicast", "disaster", "cdn")

MINIMAL = """
[realms]
net,IPISH,-

[nodes]
a,host,net
b,host,net

[links]
a,b,net,1

[bindings]
n2n://users:x,a.net
"""


def test_builtins_load():
    fig3 = load_builtin("fig3")
    ip = [r for r in fig3.realms if r.technology == "IPISH"]
    ccn = [r for r in fig3.realms if r.technology == "CCNISH"]
    assert len(ip) == 1 and len(ccn) == 1
    kinds = {n.id: n.kind for n in fig3.nodes}
    assert kinds["RN1"] == "name_router"
    assert "ors" in kinds.values() and "nrs" in kinds.values()
    assert set(BUILTIN_NAMES) == {
        "fig3", "mobility-return", "reverse-multicast", "disaster", "migration",
    }


def test_unknown_builtin():
    with pytest.raises(ParseError):
        load_builtin("nope")


def test_load_save_load_fixpoint_on_all_builtins():
    for name in ALL_SOURCES + ("migration",):
        s = load_builtin(name)
        assert parse_scenario(save_scenario(s), name=s.name) == s


@pytest.mark.parametrize("text,error", [
    ("[nodes]\nn1,host,nowhere\n", ValidationError),
    ("[realms]\nnet,IPISH,-\n[links]\na,b,net,1\n", ValidationError),
    ("[realms]\nnet,WIFI,-\n", ValidationError),
    ("[realms]\nnet,IPISH,-\nnet,IPISH,-\n", ValidationError),
    ("[whatever]\nx\n", ParseError),
    ("stray line\n", ParseError),
    ("[realms]\nnet,IPISH\n", ParseError),
    ("[timeline]\n5,pull,n2n://u:a,n2n://u:b\n1,pull,n2n://u:a,n2n://u:b\n", ValidationError),
    ("[timeline]\n0,teleport,x\n", ParseError),
    ("[bindings]\nn2n://u:x,ghost.net\n", ValidationError),
])
def test_invalid_scenarios_rejected(text, error):
    with pytest.raises(error):
        parse_scenario(text)


def test_empty_timeline_trace_has_only_rebinds():
    result = run_scenario(parse_scenario(MINIMAL, name="minimal"))
    assert {e.event for e in result.fabric.trace} == {EventKind.REBIND}


def test_scenario_runs_are_deterministic():
    for name in ALL_SOURCES:
        s = load_builtin(name)
        assert run_scenario(s).trace_text == run_scenario(s).trace_text


def test_diff_trace_identical_and_perturbed():
    trace = run_scenario(load_builtin("fig3")).trace_text + "\n"
    assert diff_trace(trace, trace) == (0, "traces identical")
    lines = trace.splitlines()
    lines[2] = lines[2].replace("t=", "t=9")
    status, message = diff_trace(trace, "\n".join(lines) + "\n")
    assert status == 1
    assert "line 3" in message
    status, message = diff_trace(trace, trace + "extra\n")
    assert status == 1 and "longer" in message


def test_builtins_match_frozen_goldens():
    for name in BUILTIN_NAMES:
        actual = run_scenario(load_builtin(name)).trace_text + "\n"
        assert diff_trace(actual, golden_trace(name))[0] == 0, name


def test_empty_migration_plan_is_identity():
    s = load_builtin("cdn")
    assert apply_migration(s, MigrationPlan()) == s


def test_plan_parsing_and_bad_steps():
    plan = parse_plan("replace_authoritative_resolver\n")
    assert len(plan.steps) == 1
    with pytest.raises(ParseError):
        parse_plan("warp_drive,now\n")
    with pytest.raises(ParseError):
        parse_plan("deploy_nested_realm,too,few\n")


def test_invalid_migration_steps():
    s = load_builtin("cdn")
    with pytest.raises(InvalidStep):
        apply_migration(s, parse_plan("deploy_nested_realm,net,IPISH,net,r1,r2,rtrC\n"))
    with pytest.raises(InvalidStep):
        apply_migration(s, parse_plan(
            "update_nrs,n2n://cp.com:ghost,CCNISH_OVER_UDPISH,f,CCNISH,cdn,0,100,-,-,-,-\n"))
    bare = parse_scenario(MINIMAL, name="bare")
    with pytest.raises(InvalidStep):
        apply_migration(bare, parse_plan("replace_authoritative_resolver\n"))


def test_migration_keeps_old_path_pullable():
    before = load_builtin("cdn")
    after = load_builtin("migration")
    prefixes_before = {r.prefix for r in before.nrs_records}
    prefixes_after = {r.prefix for r in after.nrs_records}
    assert prefixes_before <= prefixes_after
    old_records = set(before.nrs_records)
    assert old_records <= set(after.nrs_records)


# ----------------------------------------------------------------------- CLI


def test_cli_run_builtin(capsys, tmp_path):
    assert main(["run", "fig3"]) == 0
    out = capsys.readouterr().out
    assert "event=DELIVER" in out
    trace_file = tmp_path / "t.txt"
    assert main(["run", "fig3", "--trace", str(trace_file)]) == 0
    assert trace_file.read_text() == out


def test_cli_run_until(capsys):
    assert main(["run", "fig3", "--until", "4"]) == 0
    out = capsys.readouterr().out
    assert "event=ORS_R" in out
    assert "event=DELIVER" not in out


def test_cli_diff_match_and_mismatch(tmp_path, capsys):
    assert main(["diff", "fig3", "fig3"]) == 0
    bad = tmp_path / "bad.golden"
    bad.write_text("t=0 node=x realm=y event=SEND msg=1 name=- detail=-\n")
    assert main(["diff", "fig3", str(bad)]) == 1
    capsys.readouterr()


def test_cli_parse_errors_exit_2(tmp_path, capsys):
    missing = tmp_path / "missing.scn"
    assert main(["run", str(missing)]) == 2
    broken = tmp_path / "broken.scn"
    broken.write_text("[nodes]\nn1,host,nowhere\n")
    assert main(["run", str(broken)]) == 2
    capsys.readouterr()


def test_cli_migrate(tmp_path, capsys):
    plan = tmp_path / "plan"
    plan.write_text("replace_authoritative_resolver\n")
    assert main(["migrate", "cdn", str(plan)]) == 0
    out = capsys.readouterr().out
    assert "[realms]" in out
    bad_plan = tmp_path / "bad.plan"
    bad_plan.write_text("deploy_nested_realm,net,IPISH,net,a,b,rtrC\n")
    assert main(["migrate", "cdn", str(bad_plan)]) == 2
    capsys.readouterr()


def test_cli_list_builtin(capsys):
    assert main(["list-builtin"]) == 0
    assert capsys.readouterr().out.split() == list(BUILTIN_NAMES)
