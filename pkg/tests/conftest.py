import pytest

from lpvariance.rand_core import RngStream, stream_id_for


@pytest.fixture
def stream(request):
    """A stream keyed on the test name, so every test draws its own numbers."""
    return RngStream(20160101, stream_id_for("tests", request.node.name))
