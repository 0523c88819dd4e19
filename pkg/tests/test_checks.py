from semiact.checks import (
    check_action_law,
    check_dh,
    check_rho_propagation,
    check_semigroup_laws,
    registered_systems,
    run_suite,
)
from semiact.core import Semigroup
from semiact.instances import ZnMul, build_cyclic_exp, build_symmetric


class _Broken(ZnMul):
    """Z_n under a - b: not associative."""

    commutative = False

    def compose(self, a, b):
        return (a - b) % self.n


def test_laws_exhaustive_on_small_carriers():
    results = check_semigroup_laws(ZnMul(28))
    assert all(r.passed and r.exhaustive for r in results)
    assert {r.name.split(": ")[1] for r in results} == {"associativity", "identity", "inverses", "commutativity"}


def test_laws_catch_violation():
    results = {r.name.split(": ")[1]: r for r in check_semigroup_laws(_Broken(7))}
    assert not results["associativity"].passed


def test_sampled_above_threshold():
    r = check_action_law(build_symmetric(64), samples=300)
    assert r.passed and not r.exhaustive and r.checked == 300


def test_dh_exhaustive_small():
    r = check_dh(build_cyclic_exp(59, 29, 4))
    assert r.passed and r.exhaustive and r.checked == 29 * 29


def test_rho_propagation():
    r = check_rho_propagation(build_cyclic_exp(59, 29, 4))
    assert r.passed and r.checked > 0


def test_registered_systems_cover_instances():
    names = " ".join(s.name for s in registered_systems())
    for key in ("min-chain", "flat-semilattice", "Sym", "/<"):
        assert key in names or key.lower() in names.lower()


def test_suite_passes():
    results = run_suite(samples=200)
    assert results and all(r.passed for r in results), [r.line() for r in results if not r.passed]
