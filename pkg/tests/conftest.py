import pytest

from sheafforcing.catalog import CATALOG, arrow_site_degenerate


@pytest.fixture(params=sorted(CATALOG))
def any_site(request):
    return CATALOG[request.param]()


@pytest.fixture
def point():
    return CATALOG["1"]()


@pytest.fixture
def arrow():
    return CATALOG["2"]()


@pytest.fixture
def arrow_covered():
    return CATALOG["2'"]()


@pytest.fixture
def degenerate():
    return arrow_site_degenerate()
