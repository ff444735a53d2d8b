"""Euler forms of pseudo-Riemannian metrics, their first variations and the
invariant boundary polynomials, backed by the C++ core."""

from pathlib import Path

from ._gbcurv import *  # noqa: F401,F403
from ._gbcurv import __version__, load_spec

CATALOG = Path(__file__).resolve().parent / "catalog"


def catalog_spec(name):
    """Spec shipped with the package, e.g. catalog_spec("sphere2")."""
    return load_spec(str(CATALOG / f"{name}.json"))
