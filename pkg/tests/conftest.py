import numpy as np
import pytest
from hypothesis import settings

from ersteg.corpus import make_cover, synth_image

# numba-compiled paths warm up on first call; property tests must not
# time out on that
settings.register_profile("ersteg", deadline=None, max_examples=50)
settings.load_profile("ersteg")


@pytest.fixture(scope="session")
def cover_q75():
    return make_cover(synth_image(0), 75)


@pytest.fixture(scope="session")
def cover_q95():
    return make_cover(synth_image(0), 95)


@pytest.fixture()
def rng():
    return np.random.default_rng(0xC0FFEE)
