import math
from pathlib import Path

import pytest

from cvmbqc.programfile import ProgramParseError, load_program, parse_number, parse_program

PROGRAMS = sorted((Path(__file__).parent.parent / "programs").glob("*.prog"))


@pytest.mark.parametrize("text,value", [("pi", math.pi), ("-pi/2", -math.pi / 2), ("3*pi/4", 0.75 * math.pi), ("0.25", 0.25), ("+pi", math.pi)])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


def test_parse_full():
    pf = parse_program(
        """
        # comment
        modes: 2
        cluster_db: 10
        seed: 7
        trials: 500
        mode: corrected
        inputs:
          1 squeezed_db 3 p
        steps:
          beamsplitter pi/4 on 0 1   # trailing
          displace 0.5 -0.25 on 1
        """
    )
    assert pf.epsilon == pytest.approx(0.1)
    assert (pf.seed, pf.trials, pf.mode) == (7, 500, "corrected")
    assert pf.program.inputs[0].kind == "vacuum"
    assert pf.program.inputs[1].quadrature == "p"
    assert [g.kind for g in pf.program.steps] == ["beamsplitter", "displace"]


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("steps:\n  cz 1 on 0 1\n", 1, 1),  # missing modes
        ("modes: 2\n  bogus: 3\n", 2, 3),
        ("modes: 2\nepsilon:  1.5\n", 2, 11),
        ("modes: 2\nsteps:\n  cz 1 on 0 5\n", 3, 3),
        ("modes: 2\nsteps:\n  cz x on 0 1\n", 3, 6),
        ("modes: 2\nsteps:\n  warp 1 on 0 1\n", 3, 3),
        ("modes: 2\nsteps:\n  cz 1 0 1\n", 3, 3),
        ("modes: 2\nsteps:\n  cz 1 on 0\n", 3, 8),
        ("modes: 2\ninputs:\n  0 squeezed -1\n", 3, 14),
        ("modes: 2\ninputs:\n  0 thermal 1\n", 3, 5),
        ("modes: 2\nepsilon: 0.1\ncluster_db: 10\n", 3, 1),
        ("modes: 2\nsteps:\n  cz 1 on 0 1\n  two-mode-general 0.3 0.1 0.3 0.5 on 0 1\n", 4, 3),
    ],
)
def test_errors_have_positions(text, line, col):
    with pytest.raises(ProgramParseError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_degenerate_step_index():
    with pytest.raises(ProgramParseError, match="step 1"):
        parse_program("modes: 2\nsteps:\n  cz 1 on 0 1\n  two-mode-general 0.3 0.1 0.3 0.5 on 0 1\n")


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.name)
def test_shipped_programs_load(path):
    assert load_program(path).program.num_modes >= 2
