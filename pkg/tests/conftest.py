import json
from importlib.resources import files

import pytest

FX = files("vertiops.fixtures")


@pytest.fixture(scope="session")
def env_text():
    return FX.joinpath("env_info.lp").read_text()


@pytest.fixture(scope="session")
def agent_text():
    return FX.joinpath("agent_info.lp").read_text()


@pytest.fixture(scope="session")
def query_texts():
    return [
        FX.joinpath(f"queries/query0{i}.lp").read_text() for i in (1, 2, 3)
    ]


@pytest.fixture(scope="session")
def config_text():
    return FX.joinpath("network.yaml").read_text()


@pytest.fixture(scope="session")
def goldens():
    return json.loads(FX.joinpath("goldens.json").read_text())


@pytest.fixture(scope="session")
def corpus(env_text, agent_text, query_texts):
    """All bundled programs, individually."""
    return [env_text, agent_text] + list(query_texts)
