"""Benchmark problems with known exact solutions.

Each preset fixes a domain and a solution u, then manufactures the data
so that u satisfies

    -laplace(u) = f        in the domain,
    du/dnu + u/eps = u0/eps + g   on the boundary.

The boundary data is built from a smooth extension of the outward
normal field (radial on the disk, nearest-side on the square), so u0
and g can be evaluated at quadrature points of the polygonal boundary,
which lies slightly inside the curved one.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import ProblemData
from .errors import InvalidParameter
from .geometry import Domain, unit_disk, unit_square

__all__ = ["Problem", "get_problem", "problem_names", "list_problems"]


@dataclass(frozen=True)
class Problem:
    """A named benchmark: domain plus epsilon-dependent data factory."""

    name: str
    domain: Domain
    description: str
    make_data: Callable[[float], ProblemData]


def _radial_normal(x, y):
    r = np.hypot(x, y)
    return x / r, y / r


def _side_normal(x, y):
    """Nearest-side outward normal of the unit square, extended inward."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dists = np.stack([y, 1.0 - y, x, 1.0 - x])  # bottom, top, left, right
    side = np.argmin(dists, axis=0)
    nx = np.where(side == 2, -1.0, np.where(side == 3, 1.0, 0.0))
    ny = np.where(side == 0, -1.0, np.where(side == 1, 1.0, 0.0))
    return nx, ny


def _robin_data(u, grad, f, normal_ext, epsilon, split_flux=False):
    """Assemble ProblemData for exact u: u0 = u + eps*(du/dnu - g).

    With split_flux the normal derivative is supplied through g and u0
    reduces to the trace of u; otherwise g = 0 and u0 carries the flux.
    """

    def flux(x, y):
        nx, ny = normal_ext(x, y)
        gx = grad(x, y)
        return gx[..., 0] * nx + gx[..., 1] * ny

    if split_flux:
        u0 = u
        g = flux
    else:
        def u0(x, y):
            return u(x, y) + epsilon * flux(x, y)

        def g(x, y):
            return np.zeros_like(np.asarray(x, dtype=float))

    return ProblemData(f=f, u0=u0, g=g, exact_u=u, exact_grad=grad)


def _make_sinsin(split_flux=False):
    def u(x, y):
        return np.sin(x) * np.sin(y)

    def grad(x, y):
        return np.stack([np.cos(x) * np.sin(y), np.sin(x) * np.cos(y)], axis=-1)

    def f(x, y):
        return 2.0 * np.sin(x) * np.sin(y)

    def make(epsilon):
        return _robin_data(u, grad, f, _radial_normal, epsilon, split_flux=split_flux)

    return make


def _make_sqrt_singular():
    # distance to (-1, 0): smooth inside, gradient blows up at that
    # boundary point, which keeps the solution just below H^2
    def rho(x, y):
        return np.hypot(x + 1.0, y)

    def u(x, y):
        return rho(x, y)

    def grad(x, y):
        r = rho(x, y)
        return np.stack([(x + 1.0) / r, y / r], axis=-1)

    def f(x, y):
        return -1.0 / rho(x, y)

    def make(epsilon):
        return _robin_data(u, grad, f, _radial_normal, epsilon)

    return make


def _make_radial_exp():
    def u(x, y):
        return np.exp(-(x * x + y * y))

    def grad(x, y):
        e = np.exp(-(x * x + y * y))
        return np.stack([-2.0 * x * e, -2.0 * y * e], axis=-1)

    def f(x, y):
        r2 = x * x + y * y
        return (4.0 - 4.0 * r2) * np.exp(-r2)

    def make(epsilon):
        return _robin_data(u, grad, f, _radial_normal, epsilon)

    return make


def _make_linear_patch():
    a, b, c = 0.3, 0.7, -0.4

    def u(x, y):
        return a + b * x + c * y

    def grad(x, y):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape + (2,))
        out[..., 0] = b
        out[..., 1] = c
        return out

    def f(x, y):
        return np.zeros_like(np.asarray(x, dtype=float))

    def make(epsilon):
        return _robin_data(u, grad, f, _side_normal, epsilon)

    return make


_REGISTRY = {
    "sinsin": Problem(
        name="sinsin",
        domain=unit_disk(),
        description="smooth product of sines on the unit disk",
        make_data=_make_sinsin(),
    ),
    "sinsin_flux": Problem(
        name="sinsin_flux",
        domain=unit_disk(),
        description="same solution as sinsin, data split between u0 and g",
        make_data=_make_sinsin(split_flux=True),
    ),
    "sqrt_singular": Problem(
        name="sqrt_singular",
        domain=unit_disk(),
        description="distance to a boundary point; limited regularity",
        make_data=_make_sqrt_singular(),
    ),
    "radial_exp": Problem(
        name="radial_exp",
        domain=unit_disk(),
        description="radial Gaussian bump on the unit disk",
        make_data=_make_radial_exp(),
    ),
    "linear_patch": Problem(
        name="linear_patch",
        domain=unit_square(),
        description="linear solution on the unit square (patch test)",
        make_data=_make_linear_patch(),
    ),
}


def get_problem(name):
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise InvalidParameter(f"unknown problem {name!r}; known: {known}") from None


def problem_names():
    return sorted(_REGISTRY)


def list_problems():
    """(name, domain, description) rows for display."""
    rows = []
    for name in problem_names():
        p = _REGISTRY[name]
        rows.append((p.name, p.domain.kind.value, p.description))
    return rows
