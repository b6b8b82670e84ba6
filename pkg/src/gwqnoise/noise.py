"""Quantum noise budgets, the standard quantum limit, and optimum light power.

Photon-counting noise is read out on the photon difference at its dark
fringe ``phi = pi/2``::

    dz_pc^2 = A_pc var(Jy) / <Jz>^2,    A_pc = (L / (omega tau))^2

and radiation pressure enters through ``Jx``::

    dz_rp^2 = A_rp (2 dJx)^2,           A_rp = (hbar omega tau^2 / (m L))^2
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .detector import DetectorConfig
from .interferometer import Observable, phase_uncertainty
from .optimize import golden_section
from .states import coherent_squeezed_moments, coherent_vacuum_moments, intelligent_limit_variance
from .su2 import MomentSet, TwoModeState, moments_of

DEFAULT_BOUNDS = (1.0, 1e26)
ZERO_FRINGE_TOL = 1e-12
CLOSED_FORM_RTOL = 1e-6


class ZeroFringeError(ValueError):
    """``<Jz> = 0``: the photon difference has no slope at the dark fringe."""


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class NoiseBudget:
    dz_pc: float
    dz_rp: float
    nbar: float
    power: float
    flags: tuple[str, ...] = ()
    dz_total: float = field(init=False)

    def __post_init__(self):
        for name in ("dz_pc", "dz_rp", "nbar", "power"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        object.__setattr__(self, "dz_total", math.hypot(self.dz_pc, self.dz_rp))

    @property
    def dz2(self) -> float:
        return self.dz_pc**2 + self.dz_rp**2


def _budget(pc2: float, rp2: float, nbar: float, config: DetectorConfig, flags=()) -> NoiseBudget:
    return NoiseBudget(math.sqrt(pc2), math.sqrt(rp2), nbar, config.power(nbar), tuple(flags))


def sql(config: DetectorConfig) -> float:
    """``sqrt(2 hbar tau / m)``."""
    return math.sqrt(2 * config.hbar * config.tau / config.mirror_mass)


def budget_from_moments(moments: MomentSet, config: DetectorConfig) -> NoiseBudget:
    scale = max(1.0, moments.nbar)
    if abs(moments.mean_jz) < ZERO_FRINGE_TOL * scale:
        raise ZeroFringeError(
            "<Jz> = 0: zero fringe derivative for the photon difference; "
            "use the squared-difference readout (budget_from_state) instead"
        )
    pc2 = config.a_pc * moments.var_jy / moments.mean_jz**2
    rp2 = config.a_rp * 4 * moments.var_jx
    return _budget(pc2, rp2, moments.nbar, config)


def budget_from_state(state: TwoModeState, config: DetectorConfig) -> NoiseBudget:
    """Budget for an explicit state, readout chosen automatically.

    States with ``<Jz> = 0`` (twin Fock) cannot use the photon difference;
    they are read out with ``S = q_out^2`` at ``phi = 0`` and flagged.
    """
    moments = moments_of(state)
    if abs(moments.mean_jz) >= ZERO_FRINGE_TOL * max(1.0, moments.nbar):
        return budget_from_moments(moments, config)
    dphi = phase_uncertainty(state, Observable.SQUARED_DIFFERENCE, 0.0)
    pc2 = config.a_pc * dphi.squared
    rp2 = config.a_rp * 4 * moments.var_jx
    return _budget(pc2, rp2, moments.nbar, config, ("sqdiff-readout",))


def budget_coherent(nbar: float, config: DetectorConfig) -> NoiseBudget:
    """``A_pc / N + A_rp N``; any port-1 state with vacuum in port 2."""
    if nbar <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar!r}")
    return _budget(config.a_pc / nbar, config.a_rp * nbar, nbar, config)


def budget_squeezed(alpha: float, r: float, config: DetectorConfig, mode: str = "exact") -> NoiseBudget:
    """Coherent carrier with matched squeezed vacuum (``theta = 0``, real ``alpha``)."""
    if mode == "exact":
        return budget_from_moments(coherent_squeezed_moments(alpha, r), config)
    if mode != "asymptotic":
        raise ValueError(f"mode must be 'exact' or 'asymptotic', got {mode!r}")
    a2, s2 = float(alpha) ** 2, math.sinh(r) ** 2
    flags = ()
    if a2 < 10 * s2:
        warnings.warn(f"alpha^2 = {a2:g} is not >> sinh^2 r = {s2:g}; asymptotic form is unreliable")
        flags = ("asymptotic-invalid",)
    nbar = a2 + s2
    return _budget(config.a_pc * math.exp(-2 * r) / nbar, config.a_rp * math.exp(2 * r) * nbar,
                   nbar, config, flags)


def budget_mismatch_quadrature(nbar1: float, r: float, config: DetectorConfig) -> NoiseBudget:
    """Carrier with ``<a1^dag^2 + a1^2> = 0`` against squeezed vacuum: ``cosh 2r`` penalty.

    ``nbar`` is the total photon number ``nbar1 + sinh^2 r``.
    """
    s2 = math.sinh(r) ** 2
    flags = ("carrier-not-dominant",) if nbar1 < 100 * s2 else ()
    nbar = nbar1 + s2
    ch = math.cosh(2 * r)
    return _budget(config.a_pc * ch / nbar, config.a_rp * ch * nbar, nbar, config, flags)


def budget_phase_insensitive_port(nbar1: float, nbar2: float, config: DetectorConfig) -> NoiseBudget:
    """Arbitrary carrier mixed with a port-2 state obeying ``<a2^2> = 0``."""
    if nbar1 == nbar2:
        raise ValueError("degenerate ports: nbar1 == nbar2 leaves no fringe")
    w = 2 * nbar1 * nbar2 + nbar1 + nbar2
    return _budget(w * config.a_pc / (nbar1 - nbar2) ** 2, w * config.a_rp, nbar1 + nbar2, config)


def budget_heisenberg_limited(nbar: float, config: DetectorConfig) -> NoiseBudget:
    """``2 A_pc / N^2 + A_rp N^2 / 2`` for Heisenberg-limited readout."""
    if nbar <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar!r}")
    flags = ("small-nbar",) if nbar < 100 else ()
    return _budget(2 * config.a_pc / nbar**2, config.a_rp * nbar**2 / 2, nbar, config, flags)


def budget_intelligent(moments: MomentSet, config: DetectorConfig) -> NoiseBudget:
    """``A_pc (2 dJx)^-2 + A_rp (2 dJx)^2`` from an intelligent state's moments."""
    w = 4 * moments.var_jx
    return _budget(config.a_pc / w, config.a_rp * w, moments.nbar, config)


def budget_intelligent_limit(nbar: float, m0: float, config: DetectorConfig) -> NoiseBudget:
    """Intelligent state as ``eta -> 0``: ``(2 dJx)^2 = 2 (j^2 - m0^2 + j)`` with ``j = N/2``."""
    j = nbar / 2
    w = 2 * (j * j - m0 * m0 + j)
    if w <= 0:
        raise ValueError(f"|m0| = {abs(m0)} exceeds j = {j}")
    return _budget(config.a_pc / w, config.a_rp * w, nbar, config)


def budget_twin_fock(nbar: float, config: DetectorConfig) -> NoiseBudget:
    """Twin Fock read out on ``S`` at ``phi = 0``; ``j = N/2``."""
    j = nbar / 2
    if j <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar!r}")
    jj = j * (j + 1)
    return _budget(config.a_pc / (2 * jj), config.a_rp * 2 * jj, nbar, config, ("sqdiff-readout",))


# -- closed-form optima ----------------------------------------------------------

def coherent_optimum_nbar(config: DetectorConfig) -> float:
    """``m L^2 / (hbar omega^2 tau^3)``."""
    return config.mirror_mass * config.arm_length**2 / (config.hbar * config.omega**2 * config.tau**3)


def coherent_optimum_power(config: DetectorConfig) -> float:
    """``m L^2 / (omega tau^4)``."""
    return config.mirror_mass * config.arm_length**2 / (config.omega * config.tau**4)


def squeezed_optimum_nbar(r: float, config: DetectorConfig) -> float:
    return coherent_optimum_nbar(config) * math.exp(-2 * r)


def heisenberg_optimum_nbar(config: DetectorConfig) -> float:
    """``(2 m L^2 / (hbar omega^2 tau^3))^(1/2)``."""
    return math.sqrt(2 * coherent_optimum_nbar(config))


def heisenberg_optimum_power(config: DetectorConfig) -> float:
    """``(2 hbar m L^2 / tau^5)^(1/2)``."""
    return math.sqrt(2 * config.hbar * config.mirror_mass * config.arm_length**2 / config.tau**5)


class Method(enum.Enum):
    CLOSED_FORM = "closed-form"
    NUMERICAL = "numerical"


@dataclass(frozen=True)
class Optimum:
    nbar_opt: float
    power_opt: float
    dz_opt: float
    method: Method
    budget: NoiseBudget
    closed_form_nbar: float | None = None


def optimize_budget(budget_fn: Callable[[float], NoiseBudget], config: DetectorConfig,
                    bounds: tuple[float, float] = DEFAULT_BOUNDS,
                    closed_form_nbar: float | None = None, rtol: float = 1e-8) -> Optimum:
    """Minimize ``dz_total^2`` over ``nbar`` by golden section in ``log nbar``.

    When ``closed_form_nbar`` is given, the numerical optimum must agree
    with it to 1e-6 relative or :class:`OptimizationError` is raised.
    """
    lo, hi = bounds
    if not 0 < lo < hi:
        raise ValueError(f"bounds must satisfy 0 < lo < hi, got {bounds}")
    # relative scale keeps the objective O(1) so golden-section comparisons stay well posed
    ref = budget_fn(math.sqrt(lo * hi)).dz2 or 1.0
    res = golden_section(lambda x: budget_fn(math.exp(x)).dz2 / ref,
                         math.log(lo), math.log(hi), xtol=rtol)
    nbar = math.exp(res.x)
    best = budget_fn(nbar)
    if closed_form_nbar is not None:
        err = abs(nbar / closed_form_nbar - 1)
        if err > CLOSED_FORM_RTOL:
            raise OptimizationError(
                f"numerical optimum {nbar:.9e} disagrees with closed form {closed_form_nbar:.9e} ({err:.2e})"
            )
    return Optimum(nbar, config.power(nbar), best.dz_total, Method.NUMERICAL, best, closed_form_nbar)


def closed_form_optimum(budget_fn: Callable[[float], NoiseBudget], nbar_opt: float,
                        config: DetectorConfig) -> Optimum:
    best = budget_fn(nbar_opt)
    return Optimum(nbar_opt, config.power(nbar_opt), best.dz_total, Method.CLOSED_FORM, best, nbar_opt)


# -- losses ------------------------------------------------------------------------

@dataclass(frozen=True)
class LossCheck:
    ok: bool
    nbar_out: float
    product: float

    @property
    def status(self) -> str:
        return "ok" if self.ok else "violated"


def loss_threshold_check(nbar: float, gamma: float) -> LossCheck:
    """Heisenberg-limited readout survives losses only while ``N Gamma < 1/2``."""
    if gamma < 0:
        raise ValueError(f"loss coefficient must be >= 0, got {gamma!r}")
    product = nbar * gamma
    return LossCheck(product < 0.5, nbar * math.exp(-gamma), product)


# -- families as functions of nbar ------------------------------------------------------

FAMILIES = ("coherent", "squeezed", "twin-fock", "intelligent", "heisenberg")


@dataclass(frozen=True)
class FamilyModel:
    """Budget of an input-state family as a function of total photon number."""

    name: str
    budget: Callable[[float], NoiseBudget]
    closed_form_nbar: float | None


def family_model(family: str, config: DetectorConfig, r: float = 0.0, m0: float = 0.0,
                 mode: str = "exact") -> FamilyModel:
    if family == "coherent":
        return FamilyModel(family, lambda n: budget_coherent(n, config), coherent_optimum_nbar(config))
    if family == "squeezed":
        s2 = math.sinh(r) ** 2

        def fn(n):
            if n <= s2:
                raise ValueError(f"nbar = {n} cannot exceed the squeezed-vacuum photons {s2}")
            return budget_squeezed(math.sqrt(n - s2), r, config, mode)

        closed = squeezed_optimum_nbar(r, config) if mode == "asymptotic" else None
        return FamilyModel(family, fn, closed)
    if family == "twin-fock":
        return FamilyModel(family, lambda n: budget_twin_fock(n, config), None)
    if family == "intelligent":
        return FamilyModel(family, lambda n: budget_intelligent_limit(n, m0, config),
                           heisenberg_optimum_nbar(config) if m0 == 0 else None)
    if family == "heisenberg":
        return FamilyModel(family, lambda n: budget_heisenberg_limited(n, config),
                           heisenberg_optimum_nbar(config))
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def family_optimum(family: str, config: DetectorConfig, bounds=DEFAULT_BOUNDS, **params) -> Optimum:
    model = family_model(family, config, **params)
    lo = bounds[0]
    if family == "squeezed":
        lo = max(lo, 2 * math.sinh(params.get("r", 0.0)) ** 2 + 1)
    return optimize_budget(model.budget, config, (lo, bounds[1]), model.closed_form_nbar)


def heisenberg_dz_opt(config: DetectorConfig) -> float:
    """Minimum of the Heisenberg-limited budget: ``sqrt(2) (A_pc A_rp)^(1/4)``."""
    return math.sqrt(2) * (config.a_pc * config.a_rp) ** 0.25

