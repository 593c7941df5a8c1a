import os
from pathlib import Path

import hypothesis
import pytest

from wallettrace import (
    TransformSet,
    build_term_index,
    load_public_suffix_list,
    load_secret_profile,
)

hypothesis.settings.register_profile(
    "suite",
    deadline=None,  # scanning/compression tests have uneven per-example cost
    print_blob=True,
)
hypothesis.settings.load_profile("suite")

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def fixture_path(*parts: str) -> str:
    return os.path.join(FIXTURES, *parts)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return Path(FIXTURES)


@pytest.fixture(scope="session")
def psl():
    return load_public_suffix_list(fixture_path("psl_fixture.dat"))


@pytest.fixture(scope="session")
def profile():
    return load_secret_profile(fixture_path("secrets_fixture.json"))


@pytest.fixture(scope="session")
def transforms():
    return TransformSet()


@pytest.fixture(scope="session")
def index(profile, transforms):
    return build_term_index(profile, transforms)
