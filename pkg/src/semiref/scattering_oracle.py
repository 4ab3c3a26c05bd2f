"""Exact reflection references for validating the semiclassical routes.

Two oracles:  the known closed form for the inverse oscillator, and a
direct integration of the stationary Schroedinger equation for the
flat-tailed families with a fixed-step Numerov recurrence (fourth-order
accurate).  The wave is launched as a pure outgoing plane wave at the
right edge and decomposed into incident and reflected plane waves at the
left edge; regimes are chosen so |R|^2 stays well above the double
precision floor, and comparisons are made on ln of the probability.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .potentials import PhysicalConstants, PotentialKind, PotentialModel, v
from .wkb_reflection import Method, ReflectionResult

__all__ = [
    "ScatteringGrid",
    "default_grid",
    "exact_ho_reflection",
    "numerov_reflection",
]

_MAX_POINTS = 50_000_000


@dataclass(frozen=True)
class ScatteringGrid:
    """Uniform integration window [-x_max, x_max] with step dx.

    ``tail_tol`` is the relative flatness |V(x_max) + V0| / V0 required
    before plane-wave asymptotics are trusted at the window edges.
    """

    x_max: float
    dx: float
    tail_tol: float = 1e-6

    def __post_init__(self):
        if not (self.x_max > 0.0 and math.isfinite(self.x_max)):
            raise DomainError("x_max must be positive and finite")
        if not (0.0 < self.dx < self.x_max):
            raise DomainError("dx must satisfy 0 < dx < x_max")
        if not (0.0 < self.tail_tol < 1.0):
            raise DomainError("tail_tol must lie in (0, 1)")
        if self.n_points > _MAX_POINTS:
            raise DomainError(f"grid of {self.n_points} points is too large")

    @property
    def n_points(self) -> int:
        return int(math.ceil(2.0 * self.x_max / self.dx)) + 1


def default_grid(
    model: PotentialModel,
    E: float,
    consts: PhysicalConstants,
    tail_tol: float = 1e-6,
    k_dx: float = 0.05,
) -> ScatteringGrid:
    """Grid sized for the model: window doubled from 12a until the tail is
    flat to ``tail_tol``, step set so k * dx <= ``k_dx``."""
    if model.kind is PotentialKind.INVERSE_HO:
        raise DomainError("inverse_ho has no flat tail; use exact_ho_reflection")
    if not E > 0.0:
        raise DomainError("E must be positive")
    v0 = model.v0
    x_max = 12.0 * model.a
    while abs(v(model, x_max) + v0) > tail_tol * v0:
        x_max *= 2.0
        if x_max > 1e9 * model.a:
            raise ConvergenceError("potential tail never flattens to tail_tol")
    k = math.sqrt(2.0 * consts.mass * (E + v0)) / consts.hbar
    n = int(math.ceil(2.0 * x_max * k / k_dx)) + 1
    dx = 2.0 * x_max / (n - 1)
    return ScatteringGrid(x_max=x_max, dx=dx, tail_tol=tail_tol)


def exact_ho_reflection(
    E: float, consts: PhysicalConstants, alpha: float
) -> ReflectionResult:
    """Exact inverse-oscillator reflection probability.

    |R|^2 = e^{-s} / (1 + e^{-s}) with s = 2 pi E / (hbar omega) and
    omega = sqrt(alpha/m).  Valid for any real E; for E > 0 it is strictly
    below the semiclassical estimate e^{-s} and agrees with it to leading
    exponential order.
    """
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError("alpha must be positive and finite")
    omega = math.sqrt(alpha / consts.mass)
    s = 2.0 * math.pi * E / (consts.hbar * omega)
    if s >= 0.0:
        log_prob = -(s + math.log1p(math.exp(-s)))
    else:
        log_prob = -math.log1p(math.exp(s))
    return ReflectionResult.from_log(E, log_prob, Method.EXACT_HO)


def numerov_reflection(
    model: PotentialModel,
    E: float,
    consts: PhysicalConstants,
    grid: ScatteringGrid | None = None,
) -> ReflectionResult:
    """Reflection probability from direct solution of the scattering problem.

    Integrates psi'' = (2m/hbar^2)(V - E) psi from +x_max (outgoing wave
    e^{ikx}, k the asymptotic wavenumber) down to -x_max with the Numerov
    three-term recurrence, then solves the two leftmost grid values for the
    plane-wave amplitudes A e^{ikx} + B e^{-ikx}.  Returns |B/A|^2; the
    ``err_estimate`` records the unitarity defect |R + T - 1| of the run.
    """
    if model.kind is PotentialKind.INVERSE_HO:
        raise DomainError("inverse_ho has no flat tail; use exact_ho_reflection")
    if not E > 0.0:
        raise DomainError("E must be positive")
    if grid is None:
        grid = default_grid(model, E, consts)
    v0 = model.v0
    if abs(v(model, grid.x_max) + v0) > grid.tail_tol * v0:
        raise DomainError("potential is not flat to tail_tol at x_max")
    k = math.sqrt(2.0 * consts.mass * (E + v0)) / consts.hbar
    if k * grid.dx > 0.1:
        raise DomainError(f"k*dx = {k * grid.dx:.3f} > 0.1 under-resolves the wave")

    n = grid.n_points
    x = np.linspace(-grid.x_max, grid.x_max, n)
    dx = x[1] - x[0]
    gsq = (2.0 * consts.mass / consts.hbar**2) * (E - v(model, x))
    f = 1.0 + (dx * dx / 12.0) * gsq
    fl = f.tolist()
    cf = (12.0 - 10.0 * f).tolist()

    psi_hi = cmath.exp(1j * k * x[-1])
    psi_mid = cmath.exp(1j * k * x[-2])
    for i in range(n - 2, 0, -1):
        psi_hi, psi_mid = psi_mid, (cf[i] * psi_mid - fl[i + 1] * psi_hi) / fl[i - 1]
    psi0, psi1 = psi_mid, psi_hi

    r = cmath.exp(1j * k * dx)
    denom = r - 1.0 / r
    a_inc = (psi1 - psi0 / r) / denom
    b_ref = (psi0 * r - psi1) / denom
    inc_flux = abs(a_inc) ** 2
    refl = abs(b_ref) ** 2 / inc_flux
    trans = 1.0 / inc_flux
    unitarity_defect = abs(refl + trans - 1.0)

    refl = min(max(refl, _tiny_prob()), 1.0)
    return ReflectionResult.from_log(
        E, math.log(refl), Method.NUMEROV_ORACLE, unitarity_defect
    )


def _tiny_prob() -> float:
    return np.finfo(float).tiny
