import dataclasses
from functools import lru_cache

import pytest

from torspin.scenario import bundled_scenarios, load_scenario
from torspin.spinaffinity import TorsionalSpinAffinity
from torspin.worldgeom import TorsionField

REQUIRED_SCENARIOS = ("flat-trivial", "flat-constant-torsion", "conformal-polynomial-torsion", "flrw-torsion")


@lru_cache(maxsize=None)
def bundled(name: str):
    return load_scenario(bundled_scenarios()[name])


def without_torsion(scenario):
    """The same scenario with world torsion and torsional spin affinity removed."""
    return dataclasses.replace(scenario, torsion=TorsionField.zero(),
                               spin_torsion=TorsionalSpinAffinity.zero())


@pytest.fixture(params=sorted(bundled_scenarios()))
def any_bundled(request):
    return bundled(request.param)
