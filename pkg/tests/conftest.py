import pytest

from semiact.instances import build_cyclic_exp, build_flat_semilattice, build_min_chain, build_zn_mult


@pytest.fixture
def z29():
    """Order-29 subgroup of Z_59^* generated by 4."""
    return build_cyclic_exp(59, 29, 4)


@pytest.fixture
def z28():
    """Z_29^* itself: order 28, generator 2."""
    return build_cyclic_exp(29, 28, 2)


@pytest.fixture
def zn28():
    return build_zn_mult(28)


@pytest.fixture
def flat4():
    return build_flat_semilattice(4, seed=3)


@pytest.fixture
def chain8():
    return build_min_chain(8, seed=1)
