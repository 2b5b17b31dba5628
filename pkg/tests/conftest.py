import json

import numpy as np
import pytest

import systems


@pytest.fixture(scope="session")
def m3():
    return systems.model3()


@pytest.fixture(scope="session")
def m2():
    return systems.model2()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_model(path, **fields):
    data = {"v": 1}
    for key, value in fields.items():
        data[key] = value.tolist() if isinstance(value, np.ndarray) else value
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def model3_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "model3.json"
    return write_model(path, A=systems.A3, B=systems.B3, C=systems.C3,
                       labels=["zeta1", "zeta2", "zeta3", "zeta4"])


@pytest.fixture(scope="session")
def model2_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "model2.json"
    return write_model(path, A=systems.A2, B=systems.B2, C=systems.C2)
