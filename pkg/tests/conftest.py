from pathlib import Path

import pytest

from policystory import parse_config, parse_graph, parse_policy

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


@pytest.fixture(scope="session")
def mini_doc():
    return parse_policy(fixture_bytes("mini.policy.txt"), "Acme")


@pytest.fixture(scope="session")
def mini_config():
    config, diags = parse_config(fixture_bytes("mini.config.json"))
    assert config is not None and not diags
    return config


@pytest.fixture(scope="session")
def mini_graph():
    graph, diags = parse_graph(fixture_bytes("mini.graph.json"))
    assert graph is not None and not diags
    return graph


@pytest.fixture(scope="session")
def acme_doc():
    return parse_policy(fixture_bytes("acme.policy.txt"), "Acme")


@pytest.fixture(scope="session")
def acme_config():
    config, diags = parse_config(fixture_bytes("acme.config.json"))
    assert config is not None and not diags
    return config


@pytest.fixture(scope="session")
def acme_graph():
    graph, diags = parse_graph(fixture_bytes("acme.graph.json"))
    assert graph is not None and not diags
    return graph
