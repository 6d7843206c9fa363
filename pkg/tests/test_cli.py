import io
import subprocess
import sys

import pytest

from callee.cli import RunConfig, main

from conftest import NEGATIVE, POSITIVE


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_clean(at_root):
    assert run("check", "corpus/positive/console.cle") == (0, "", "")


def test_check_e202(at_root):
    code, out, err = run("check", "corpus/negative/e202_print_line.cle")
    assert code == 1 and out == ""
    assert err.count("\n") == 1 and err.startswith("error[E202]: ")
    assert err.rstrip().endswith("--> corpus/negative/e202_print_line.cle:6:37")


def test_missing_file(tmp_path):
    code, out, err = run("check", str(tmp_path / "nope.cle"))
    assert code == 2 and "cannot read" in err


@pytest.mark.parametrize("argv", [[], ["frobnicate", "x"], ["run"], ["run", "x", "--fuel", "0"],
                                  ["run", "x", "--fuel", "many"]])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2


def test_run_trace(at_root):
    code, out, err = run("run", "corpus/positive/console.cle", "--trace")
    assert code == 0 and err == ""
    assert out == (
        "CALL Console.printLine static=Console allow=[*]\n"
        "CALL Console.printStr static=Console allow=[Console.print]\n"
        "CALL Console.print static=Console allow=[Console.print]\n"
        "new Unit()\n")


@pytest.mark.parametrize("path", POSITIVE, ids=lambda p: p.name)
def test_run_monitor_corpus(path):
    code, out, err = run("run", str(path), "--monitor")
    assert code == 0 and err == ""
    assert out.startswith("new ")


def test_run_corrupted(at_root):
    path = "corpus/negative/corrupted_console.cle"
    code, out, err = run("run", path, "--unchecked", "--monitor")
    assert code == 4
    assert out == "new Unit()\n"
    assert err == "VIOLATION frame Console.print\n"
    code, out, _ = run("run", path, "--unchecked", "--monitor", "--trace")
    assert code == 4 and out.splitlines()[-2:] == ["VIOLATION frame Console.print", "new Unit()"]
    # without the monitor nothing is checked at runtime
    assert run("run", path, "--unchecked")[0] == 0
    assert run("run", path)[0] == 1


def test_run_without_main(tmp_path):
    f = tmp_path / "lib.cle"
    f.write_text("class Unit() { }\n")
    code, _, err = run("run", str(f))
    assert code == 2 and "no main" in err
    assert run("check", str(f))[0] == 0


def test_run_out_of_fuel(tmp_path):
    f = tmp_path / "loop.cle"
    f.write_text("class L() { L loop() effect[L.loop] = this.loop(); }\nmain = new L().loop();\n")
    code, out, err = run("run", str(f), "--fuel", "10")
    assert code == 3 and out == "" and "out of fuel" in err


def test_run_stuck(tmp_path):
    f = tmp_path / "stuck.cle"
    f.write_text("class Unit() { }\nmain = new Unit().go();\n")
    assert run("run", str(f))[0] == 1
    code, _, err = run("run", str(f), "--unchecked")
    assert code == 3 and "stuck" in err


def test_effects_text_and_dot(at_root):
    code, out, _ = run("effects", "corpus/positive/console.cle")
    assert code == 0
    assert out == ("Console.print effect[Console.print]\n"
                   "Console.printLine effect[Console.print]\n"
                   "Console.printStr effect[Console.print]\n")
    code, out, _ = run("effects", "corpus/positive/console.cle", "--dot")
    assert code == 0
    edges = [line.strip() for line in out.splitlines() if "->" in line]
    assert edges == ['"Console.print" -> "Console.print";',
                     '"Console.printLine" -> "Console.print";',
                     '"Console.printStr" -> "Console.print";']


def test_effects_empty_program(tmp_path):
    f = tmp_path / "empty.cle"
    f.write_text("// nothing here\n")
    assert run("effects", str(f), "--dot") == (0, "digraph effects {\n}\n", "")
    assert run("effects", str(f)) == (0, "", "")


def test_effects_ill_typed(at_root):
    code, out, err = run("effects", "corpus/negative/e204_hello.cle")
    assert code == 1 and out == "" and "E204" in err


@pytest.mark.parametrize("path", POSITIVE + NEGATIVE, ids=lambda p: p.name)
def test_check_and_run_agree(path):
    checked = run("check", str(path))[0]
    ran = run("run", str(path))[0]
    assert (checked == 1) == (ran == 1)
    assert run("check", str(path)) == run("check", str(path))


def test_run_config_validates():
    with pytest.raises(ValueError):
        RunConfig("run", "x", fuel=0)
    with pytest.raises(ValueError):
        RunConfig("lint", "x")


def test_console_script_entry_point(at_root):
    proc = subprocess.run([sys.executable, "-m", "callee.cli", "run", "corpus/positive/hello.cle"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "new Unit()\n"
