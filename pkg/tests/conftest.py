"""Shared fixtures: the weather instance, trained models, and atom sets."""

from pathlib import Path

import pytest

from xresp import (
    enumerate_counterfactuals,
    load_dataset,
    model_atom_sets,
    parse_entity,
    to_percent,
    train,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
TEST_DATA = Path(__file__).resolve().parent / "data"

WEATHER_CSV = DATA_DIR / "weather.csv"
DEMO_PROGRAM = DATA_DIR / "demo_program.lp"


@pytest.fixture(scope="session")
def weather_dataset():
    return load_dataset(str(WEATHER_CSV))


@pytest.fixture(scope="session")
def weather_model(weather_dataset):
    return train(weather_dataset)


@pytest.fixture(scope="session")
def weather_percent(weather_model):
    return to_percent(weather_model)


@pytest.fixture(scope="session")
def weather_entity(weather_model):
    return parse_entity("rain,high,normal,weak", weather_model.schema)


@pytest.fixture(scope="session")
def weather_versions(weather_percent, weather_entity):
    return enumerate_counterfactuals(weather_percent, weather_entity)


@pytest.fixture(scope="session")
def weather_atom_sets(weather_versions, weather_percent, weather_entity):
    return model_atom_sets(weather_versions, weather_percent, weather_entity)
