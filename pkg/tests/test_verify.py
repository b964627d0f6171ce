import pytest

from weylbridge.verify import SUITES, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes_at_reduced_size(suite):
    res = run_suite(suite, seed=0, scale=0.05)
    assert res.passed, [c.as_dict() for c in res.checks if not c.passed]
    assert res.as_dict()["suite"] == suite


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")
