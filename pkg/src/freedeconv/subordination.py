"""C^2-valued Cauchy transforms and the subordination fixed point for
signal-plus-noise spectra.

A rectangular operator Y embeds in the self-adjoint block matrix
[[0, Y*], [Y, 0]]; tracing the two diagonal blocks separately gives a
Cauchy transform on pairs of complex numbers, mapping the product upper
half-plane H+(C^2) into the lower one.  For Y = A + sigma C with C a free
circular block, the transform G of the embedded sum satisfies the
subordination equation

    G(z) = G_A(z - sigma^2 eta(G(z))),    eta(x, y) = ((p/d) y, x),

where G_A is the closed-form transform of the embedded signal, determined
by the squared singular values of A alone.  Solving the fixed point along
z1 = z2 = sqrt(x + i eps) and applying Stieltjes inversion yields the
spectral density of (A + sigma C)*(A + sigma C).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, NoConvergenceError, SigmaZeroError
from .models import SpnModel

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10000
DEFAULT_DAMPING = 0.5
EPSILON_LADDER = (0.1, 0.03, 0.01, 0.003, 0.001, 0.0003)


class CPoint2(NamedTuple):
    """A point of C^2; the transform domain is Im z1 > 0 and Im z2 > 0."""

    z1: complex
    z2: complex


@dataclass(frozen=True)
class SubordinationResult:
    """Fixed point of the subordination equation at one spectral parameter.

    ``g`` is the value of the embedded Cauchy transform, ``omega`` the
    subordinated argument the signal transform is evaluated at, and
    ``residual`` the fixed-point defect of ``g``.
    """

    g: CPoint2
    omega: CPoint2
    iterations: int
    residual: float


@dataclass(frozen=True)
class DensityCurve:
    """Spectral density sampled on a positive grid by Stieltjes inversion."""

    grid: np.ndarray
    values: np.ndarray
    epsilon: float
    mass: float
    max_residual: float = 0.0
    max_iterations: int = 0


def _require_upper(z: CPoint2) -> None:
    if not (z.z1.imag > 0 and z.z2.imag > 0):
        raise DomainError(
            f"point {z} is not in the upper half-plane of C^2", module="subordination"
        )


def _squared_atoms(singular_values: Sequence):
    a = np.asarray([float(v) for v in singular_values])
    return np.unique(a * a, return_counts=True)


def _g_atoms(atoms, counts, p, d, z1, z2):
    # Closed-form transform of the embedded signal: with w = z2*z1,
    #   G_1 = (z2/d) sum_k 1/(w - a_k^2)
    #   G_2 = (z1/p) sum_k 1/(w - a_k^2) + (p-d)/(p z2).
    w = z2 * z1
    if np.ndim(z1) == 0:
        s = np.sum(counts / (w - atoms))
    else:
        s = np.sum(counts[:, None] / (w[None, :] - atoms[:, None]), axis=0)
    g1 = z2 * s / d
    g2 = z1 * s / p + (p - d) / (p * z2)
    return g1, g2


def g_lambda_atoms(
    singular_values: Sequence, p: int, d: int, z: CPoint2
) -> CPoint2:
    """Cauchy transform of the embedded signal block at a point of H+(C^2).

    Depends on the signal only through its squared singular values; maps the
    upper half-plane of C^2 into the lower one.
    """
    _require_upper(z)
    atoms, counts = _squared_atoms(singular_values)
    g1, g2 = _g_atoms(atoms, counts, p, d, complex(z.z1), complex(z.z2))
    return CPoint2(complex(g1), complex(g2))


def eta(x: CPoint2, p: int, d: int) -> CPoint2:
    """Variance map of the embedded circular block: (x, y) -> ((p/d) y, x)."""
    return CPoint2((p / d) * x.z2, x.z1)


def _fixed_point(atoms, counts, p, d, sigma_sq, z1, z2, tol, max_iter, g=None,
                 damping=DEFAULT_DAMPING):
    """Damped Picard iteration for g = G_A(z - sigma_sq * eta(g)).

    Works elementwise on scalars or numpy arrays; returns the iterate, the
    subordinated argument, the iteration count and the final residual.
    """
    if g is None:
        g = _g_atoms(atoms, counts, p, d, z1, z2)
    g1, g2 = g
    for it in range(1, max_iter + 1):
        w1 = z1 - sigma_sq * (p / d) * g2
        w2 = z2 - sigma_sq * g1
        t1, t2 = _g_atoms(atoms, counts, p, d, w1, w2)
        res = float(np.max(np.maximum(np.abs(t1 - g1), np.abs(t2 - g2))))
        if res <= tol:
            return (g1, g2), (w1, w2), it, res
        g1 = (1.0 - damping) * g1 + damping * t1
        g2 = (1.0 - damping) * g2 + damping * t2
    raise NoConvergenceError(
        f"subordination fixed point did not converge within {max_iter} "
        f"iterations (residual {res:.3e})",
        residual=res,
        iterations=max_iter,
    )


def solve_subordination(
    model: SpnModel,
    z: CPoint2,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    initial: CPoint2 | None = None,
) -> SubordinationResult:
    """Solve the subordination equation for the embedded sum at one point.

    With sigma = 0 the transform of the signal itself is returned after a
    single evaluation.  Otherwise damped fixed-point iteration runs from
    the signal transform (or ``initial``) until the defect drops below
    ``tol``; non-convergence raises NoConvergenceError with the last
    residual.
    """
    _require_upper(z)
    atoms, counts = _squared_atoms(model.singular_values)
    sigma_sq = float(model.sigma) ** 2
    g0 = None if initial is None else (complex(initial.z1), complex(initial.z2))
    (g1, g2), (w1, w2), iterations, residual = _fixed_point(
        atoms, counts, model.p, model.d, sigma_sq,
        complex(z.z1), complex(z.z2), tol, max_iter, g=g0,
    )
    return SubordinationResult(
        g=CPoint2(complex(g1), complex(g2)),
        omega=CPoint2(complex(w1), complex(w2)),
        iterations=iterations,
        residual=residual,
    )


def spn_density(
    model: SpnModel,
    grid: Sequence[float],
    epsilon: float = 1e-3,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DensityCurve:
    """Spectral density of the signal-plus-noise model on a positive grid.

    Evaluates the subordination fixed point along z1 = z2 = sqrt(x + i eps)
    and reads the density off the first transform component by Stieltjes
    inversion, rho(x) = -Im[G_1 / sqrt(x + i eps)] / pi.  The offset is
    walked down a ladder from 0.1 to ``epsilon``, reusing each solution as
    the next initial guess, because the iteration contracts more slowly
    near the real axis.  Only the absolutely continuous regime sigma != 0
    is supported; for sigma = 0 the spectrum is atomic and covered by the
    moment route.
    """
    if float(model.sigma) == 0.0:
        raise SigmaZeroError(
            "sigma = 0 has an atomic spectrum; use models.atomic_moments"
        )
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("grid must be a 1-d array with at least two points",
                          module="subordination")
    if not (np.all(x > 0) and np.all(np.diff(x) > 0)):
        raise DomainError("grid must be positive and strictly ascending",
                          module="subordination")
    if epsilon <= 0:
        raise DomainError("epsilon must be positive", module="subordination")

    atoms, counts = _squared_atoms(model.singular_values)
    sigma_sq = float(model.sigma) ** 2
    ladder = [e for e in EPSILON_LADDER if e > epsilon] + [epsilon]
    g = None
    max_res = 0.0
    max_its = 0
    for eps in ladder:
        zeta = np.sqrt(x + 1j * eps)
        zeta = np.where(zeta.imag > 0, zeta, -zeta)
        g, _, its, res = _fixed_point(
            atoms, counts, model.p, model.d, sigma_sq,
            zeta, zeta, tol, max_iter, g=g,
        )
        max_res = max(max_res, res)
        max_its = max(max_its, its)
    values = np.maximum(-np.imag(g[0] / zeta) / np.pi, 0.0)
    mass = float(np.trapezoid(values, x))
    return DensityCurve(
        grid=x,
        values=values,
        epsilon=epsilon,
        mass=mass,
        max_residual=max_res,
        max_iterations=max_its,
    )


def curve_moment(curve: DensityCurve, k: int) -> float:
    """k-th moment of a density curve by trapezoidal quadrature."""
    return float(np.trapezoid(curve.grid**k * curve.values, curve.grid))


def curve_cdf(curve: DensityCurve) -> np.ndarray:
    """Cumulative integral of the density along its grid."""
    dx = np.diff(curve.grid)
    incr = 0.5 * dx * (curve.values[1:] + curve.values[:-1])
    return np.concatenate(([0.0], np.cumsum(incr)))
