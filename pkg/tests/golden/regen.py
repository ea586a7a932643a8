"""Regenerate the committed CLI fixtures and golden outputs.

Run from the repository root:

    python tests/golden/regen.py

Inputs land in tests/data/, golden outputs in tests/golden/.  Outputs are
the byte-exact --json stdout of each CLI invocation listed in CASES.
"""

import contextlib
import io
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
DATA = HERE.parent / "data"

sys.path.insert(0, str(HERE.parent))  # tests/ on the path for cli_cases

from cli_cases import CASES

from blockmoment import (ch_fixture, ds_fixture, gauss_quadrature,
                         ind_fixture, moments_from_jacobi)
from blockmoment.cli import run
from blockmoment.jacobi import BlockJacobiMatrix
from blockmoment.serialize import (dumps, jacobi_to_doc, measure_to_doc,
                                   moments_to_doc)


def borderline_fixture(n_blocks=240):
    """Kernel sums grow too slowly to classify (dead-zone ratios)."""
    def rule(k):
        return np.zeros((1, 1)), np.array([[float((k + 1) ** 1.2)]])
    diag = tuple(rule(k)[0] for k in range(n_blocks))
    off = tuple(rule(k)[1] for k in range(n_blocks - 1))
    return BlockJacobiMatrix(1, diag, off, rule)


def block_doc(value):
    return [[[float(np.real(value)), float(np.imag(value))]]]


def write_inputs():
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "ch.json").write_text(dumps(jacobi_to_doc(ch_fixture(210))))
    (DATA / "ind.json").write_text(dumps(jacobi_to_doc(ind_fixture(420))))
    (DATA / "ds.json").write_text(dumps(jacobi_to_doc(ds_fixture(210))))
    (DATA / "borderline.json").write_text(
        dumps(jacobi_to_doc(borderline_fixture(240))))
    (DATA / "moments_ch.json").write_text(
        dumps(moments_to_doc(moments_from_jacobi(ch_fixture(), 6))))
    (DATA / "measure_ch2.json").write_text(
        dumps(measure_to_doc(gauss_quadrature(ch_fixture(), 2))))
    (DATA / "u_one.json").write_text(dumps(block_doc(1.0)))
    (DATA / "u_minus_one.json").write_text(dumps(block_doc(-1.0)))
    (DATA / "u_iphase.json").write_text(dumps(block_doc(1j)))
    (DATA / "v_zero.json").write_text(dumps(block_doc(0.0)))
    (DATA / "bad_moments.json").write_text(dumps(
        {"p": 1, "S": [[[[1.0, 0.0]]], [[[2.0, 0.0]]], [[[4.0, 0.0]]]]}))


def capture(argv):
    buf = io.StringIO()
    cwd = Path.cwd()
    try:
        import os
        os.chdir(DATA)
        with contextlib.redirect_stdout(buf):
            code = run(argv)
    finally:
        import os
        os.chdir(cwd)
    if code != 0:
        raise SystemExit(f"golden case {argv} exited {code}")
    return buf.getvalue()


def main():
    write_inputs()
    for name, argv in CASES:
        out = capture(argv)
        (HERE / f"{name}.json").write_text(out)
        print(f"wrote {name}.json ({len(out)} bytes)")


if __name__ == "__main__":
    main()
