import pytest

from euarch import fixtures
from euarch.executor import AccessRule, Runtime, User


@pytest.fixture
def dna_style():
    return fixtures.resolved("DNA")


@pytest.fixture
def neuro_style():
    return fixtures.resolved("Neuro")


@pytest.fixture
def ozone_style():
    return fixtures.resolved("Ozone")


@pytest.fixture
def email_arch(dna_style):
    return fixtures.architecture(fixtures.FIG5_ARCH, dna_style)


@pytest.fixture
def preprocessing_arch(neuro_style):
    return fixtures.architecture(fixtures.FIG7_ARCH, neuro_style)


@pytest.fixture
def analyst():
    return User(name="ann", roles=frozenset({"analyst"}))


@pytest.fixture
def open_runtime():
    """Runtime where the analyst role may use everything."""
    return Runtime(rules=[AccessRule(principal="analyst", resource="*", action="use"),
                          AccessRule(principal="analyst", resource="*", action="read")],
                   bindings=dict(fixtures.DNA_BINDINGS))
