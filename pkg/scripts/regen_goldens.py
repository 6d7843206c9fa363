"""Rewrite corpus/negative/*.err from the current checker output.

Run from the repository root. Review the diff before committing: the golden
files are the expected behaviour, not a snapshot to refresh blindly.
"""

import io
import pathlib

from callee.cli import cmd_check

for src in sorted(pathlib.Path("corpus/negative").glob("*.cle")):
    err = io.StringIO()
    code = cmd_check(str(src), out=io.StringIO(), err=err)
    src.with_suffix(".err").write_text(err.getvalue())
    print(f"{src}: exit {code}, {err.getvalue().count(chr(10))} line(s)")
