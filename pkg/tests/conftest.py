import json
import os

import pytest

from bergmankit import constructors, fans


@pytest.fixture(autouse=True)
def _test_env():
    os.environ["WORKSPACE"] = "test"
    os.environ.pop("SENTRY_DSN", None)
    os.environ.pop("BERGMANKIT_SIZE_CAP", None)
    os.environ.pop("BERGMANKIT_SAMPLES", None)
    os.environ.pop("BERGMANKIT_SEED", None)


@pytest.fixture(scope="session")
def k4():
    return constructors.complete_graph(4)


@pytest.fixture(scope="session")
def k5():
    return constructors.complete_graph(5)


@pytest.fixture(scope="session")
def fano():
    return constructors.projective_geometry(2, 2)


@pytest.fixture(scope="session")
def u23():
    return constructors.uniform(2, 3)


@pytest.fixture(scope="session")
def u24():
    return constructors.uniform(2, 4)


@pytest.fixture(scope="session")
def u34():
    return constructors.uniform(3, 4)


@pytest.fixture(scope="session")
def boolean3():
    return constructors.uniform(3, 3)


@pytest.fixture(scope="session")
def boolean4():
    return constructors.uniform(4, 4)


@pytest.fixture(scope="session")
def pg32():
    return constructors.projective_geometry(3, 2)


@pytest.fixture(scope="session")
def dowling_z2():
    return constructors.dowling(3, constructors.cyclic_group_table(2))


@pytest.fixture(scope="session")
def parallel_u23():
    """U(2,3) on a,b,p glued to U(2,3) on c,d,q along p ~ q."""
    return constructors.parallel_connection(
        constructors.uniform(2, 3, ["a", "b", "p"]),
        constructors.uniform(2, 3, ["c", "d", "q"]),
        "p",
        "q",
    )


@pytest.fixture(scope="session")
def k4_fine(k4):
    return fans.fine_fan(k4)


@pytest.fixture(scope="session")
def k4_nested(k4):
    return fans.nested_fan(k4)


@pytest.fixture
def matroid_file(tmp_path):
    def write(matroid, name="matroid.json"):
        path = tmp_path / name
        path.write_text(json.dumps(matroid.to_dict()), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def fan_file(tmp_path):
    def write(fan, name="fan.json"):
        path = tmp_path / name
        path.write_text(json.dumps(fan.to_dict()), encoding="utf-8")
        return str(path)

    return write
