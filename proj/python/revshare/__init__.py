"""Commission-setting game between an AI platform and app developers."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401


def canonical_developer(id="canonical"):
    """R = e, phi = e^2/2, q = e, no outside option."""
    return DeveloperProfile(id=id)  # noqa: F405


def canonical_platform(marginal_cost):
    return PlatformParams(marginal_cost=marginal_cost, population=[canonical_developer()])  # noqa: F405
