import numpy as np
import pytest

#: Pot values spanning every validity regime, used by oracle-equivalence
#: and gradient sampling tests.
POT_SAMPLE = (2.0, 2.5, 3.0, 3.1, 3.35, 3.5, 3.75, 4.0, 4.15, 4.65, 5.0,
              6.0, 8.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
