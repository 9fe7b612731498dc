"""Shared fixtures: the two shipped pipelines, built once per session.

The exact backend is the expensive one (seconds per example), so every test
that needs an exact frame or surface pair pulls it from here.
"""

import pytest

from willmore.frames import integrate_frame
from willmore.iwasawa import assemble_frame, solve_iwasawa_exact
from willmore.potentials import builtin_potential, to_nilpotent
from willmore.surfaces import extract_pair


@pytest.fixture(scope="session")
def hf1():
    return integrate_frame(to_nilpotent(builtin_potential(1)))


@pytest.fixture(scope="session")
def hf2():
    return integrate_frame(to_nilpotent(builtin_potential(2)))


@pytest.fixture(scope="session")
def frame1(hf1):
    return assemble_frame(hf1, solve_iwasawa_exact(hf1))


@pytest.fixture(scope="session")
def frame2(hf2):
    return assemble_frame(hf2, solve_iwasawa_exact(hf2))


@pytest.fixture(scope="session")
def pair1(frame1):
    return extract_pair(frame1, 1)


@pytest.fixture(scope="session")
def pair2(frame2):
    return extract_pair(frame2, 1)
