from __future__ import annotations

import pathlib

import pytest

from actionsensors import fileio

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_body(name: str):
    return fileio.load(FIXTURES / name).body


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def grid7():
    return load_body("grid7.world.json")


@pytest.fixture(scope="session")
def z_plan():
    return load_body("grid7-z.plan.json")


@pytest.fixture(scope="session")
def s_plan():
    return load_body("grid7-s.plan.json")


@pytest.fixture(scope="session")
def zs_plan():
    return load_body("grid7-zs.plan.json")


@pytest.fixture(scope="session")
def backchained_plan():
    return load_body("grid7-backchained.plan.json")


@pytest.fixture(scope="session")
def landmark_constraint():
    return load_body("grid7-landmark.constraint.json")


@pytest.fixture(scope="session")
def chain3():
    return load_body("chain3.world.json")


@pytest.fixture(scope="session")
def chain3_walk():
    return load_body("chain3-walk.plan.json")
