"""
Instance files and the command line
===================================

Every generator writes a small self-describing text format, and the
``subreco`` command covers the generate / solve / validate loop without any
Python.  This script drives the console entry point through a scratch
directory and shows each file it produces.
"""

import subprocess
import tempfile
from pathlib import Path


def run(*args):
    proc = subprocess.run(
        ["subreco", *args], capture_output=True, text=True, check=False
    )
    print(f"$ subreco {' '.join(str(a) for a in args)}")
    for line in (proc.stdout + proc.stderr).strip().splitlines():
        print(f"  {line}")
    print(f"  (exit {proc.returncode})")
    return proc


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    inst = tmp / "detour.inst"
    seq = tmp / "walk.csv"

    # built-in generator -> instance file
    run("gen", "obs52", "--out", inst)
    print("\n" + inst.read_text())

    # thresholded search writes the walk as index,set,value rows
    run("solve", "astar", inst, "--theta", "1", "--out", seq)
    print("\n" + seq.read_text())

    # the validator replays the walk against the instance
    run("validate", inst, seq, "--theta", "1")

    # structural audits of the oracle behind the instance
    run("curvature", inst)
    run("check", "submodular", inst)

    # tightening the threshold past the optimum flips the exit code to 1
    run("exact", inst)
    run("validate", inst, seq, "--theta", "1.01")
