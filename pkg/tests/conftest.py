import pytest

from crmw.series import GaussianRational, TruncatedSeries, VarSpace, gr


def var(space, kind, idx, order, grading="total"):
    return TruncatedSeries.var(space, (kind, idx), order, grading)


def series(space, order, terms):
    """terms: {exponent tuple: value parsable by gr}."""
    return TruncatedSeries(space, order, {e: gr(c) for e, c in terms.items()})


def half():
    return GaussianRational(1) / 2


@pytest.fixture
def sp11():
    return VarSpace(1, 1)


@pytest.fixture
def sp22():
    return VarSpace(2, 2)
