import sys
from pathlib import Path

import pytest

# Let the test modules import their shared naive reference implementations
# (tests/oracles.py) without turning tests/ into an installed package.
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def sigma5():
    """The default full-depth build, shared across modules (it is the
    expensive fixture: most of a minute)."""
    from sigma35.sigmabuild import build_sigma

    return build_sigma(max_grade=5, strata_order=40)


@pytest.fixture(scope="session")
def sigma2():
    from sigma35.sigmabuild import build_sigma

    return build_sigma(max_grade=2)


@pytest.fixture(scope="session")
def sigma2_pair():
    """Grade-2 build from stratum vanishing and the two Hirota constraints
    only — the configuration whose grade-2 block is underdetermined."""
    from sigma35.sigmabuild import build_sigma

    return build_sigma(max_grade=2, constraints=("strata", "hirota"))
