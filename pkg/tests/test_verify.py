import pytest

from specflow import verify


def test_default_seed_passes():
    rep = verify.run_suite(seed=0)
    assert rep["passed"], rep
    assert list(rep["groups"]) == list(verify.GROUPS)


@pytest.mark.parametrize("seed", [1, 2])
def test_other_seeds_pass(seed):
    assert verify.run_suite(seed=seed)["passed"]


def test_injected_fault_names_the_invariant():
    rep = verify.run_suite(seed=0, groups=["hermitian"], inject="hermiticity")
    assert not rep["passed"]
    failed = [k for k, v in rep["groups"]["hermitian"].items() if not v["passed"]]
    assert failed == ["hermiticity"]


def test_group_filter():
    rep = verify.run_suite(seed=0, groups=["gallery"])
    assert list(rep["groups"]) == ["gallery"]


def test_unknown_group_or_fault():
    with pytest.raises(ValueError):
        verify.run_suite(groups=["nope"])
    with pytest.raises(ValueError):
        verify.run_suite(inject="nope")
