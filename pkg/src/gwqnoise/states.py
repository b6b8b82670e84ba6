"""Input-state families and their analytic moments.

Squeezed vacuum follows ``|xi> = exp(xi a^dag^2 / 2 - xi^* a^2 / 2)|0>`` with
``xi = r exp(i theta)``, so ``<a^2> = exp(i theta) sinh r cosh r``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special, stats

from .su2 import (
    Basis,
    IrrepLabel,
    MomentSet,
    TwoModeState,
    build_irrep_matrices,
    two_j_of,
)

TAIL_TOL = 1e-12
ETA_MIN = 1e-3


class TruncationError(ValueError):
    """The Fock cap discards too much probability."""


class DegenerateSpectrumError(ValueError):
    pass


# -- state specs -------------------------------------------------------------

@dataclass(frozen=True)
class CoherentVacuum:
    alpha: complex

    family = "coherent"


@dataclass(frozen=True)
class CoherentSqueezed:
    alpha: complex
    r: float
    theta: float = 0.0

    family = "squeezed"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeeze factor r must be >= 0, got {self.r!r}")

    @property
    def xi(self) -> complex:
        return self.r * np.exp(1j * self.theta)


@dataclass(frozen=True)
class TwinFock:
    n: int

    family = "twin-fock"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"twin-Fock photon number must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True)
class Intelligent:
    """Jx-Jy intelligent state; ``eta == 0`` marks the eta -> 0 limit."""

    two_j: int
    eta: float
    two_m0: int

    family = "intelligent"

    def __post_init__(self):
        IrrepLabel(self.two_j)
        if abs(self.two_m0) > self.two_j or (self.two_j - self.two_m0) % 2:
            raise ValueError(f"m0 = {self.two_m0}/2 is not a magnetic number of j = {self.two_j}/2")
        if abs(self.eta) > 1:
            raise ValueError(f"|eta| must be <= 1, got {self.eta!r}")

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def m0(self) -> float:
        return self.two_m0 / 2

    @property
    def limit_zero(self) -> bool:
        return self.eta == 0


@dataclass(frozen=True)
class Custom:
    state: TwoModeState

    family = "custom"


InputStateSpec = Union[CoherentVacuum, CoherentSqueezed, TwinFock, Intelligent, Custom]

_FAMILIES = {cls.family: cls for cls in (CoherentVacuum, CoherentSqueezed, TwinFock, Intelligent, Custom)}


def spec_to_json(spec: InputStateSpec) -> dict:
    d = {"family": spec.family}
    if isinstance(spec, (CoherentVacuum, CoherentSqueezed)):
        alpha = complex(spec.alpha)
        d["alpha_re"], d["alpha_im"] = alpha.real, alpha.imag
    if isinstance(spec, CoherentSqueezed):
        d["r"], d["theta"] = spec.r, spec.theta
    elif isinstance(spec, TwinFock):
        d["n"] = int(spec.n)
    elif isinstance(spec, Intelligent):
        d["j2"], d["eta"], d["m0x2"] = spec.two_j, spec.eta, spec.two_m0
    elif isinstance(spec, Custom):
        d["state"] = spec.state.to_json()
    return d


def spec_from_json(d: dict) -> InputStateSpec:
    family = d.get("family")
    if family not in _FAMILIES:
        raise ValueError(f"unknown state family {family!r}")
    if family in ("coherent", "squeezed"):
        alpha = complex(d.get("alpha_re", 0.0), d.get("alpha_im", 0.0))
        if family == "coherent":
            return CoherentVacuum(alpha)
        return CoherentSqueezed(alpha, float(d["r"]), float(d.get("theta", 0.0)))
    if family == "twin-fock":
        return TwinFock(int(d["n"]))
    if family == "intelligent":
        return Intelligent(int(d["j2"]), float(d["eta"]), int(d["m0x2"]))
    return Custom(TwoModeState.from_json(d["state"]))


# -- analytic moments ----------------------------------------------------------

def coherent_vacuum_moments(nbar: float) -> MomentSet:
    if nbar < 0:
        raise ValueError(f"mean photon number must be >= 0, got {nbar!r}")
    return MomentSet(
        mean_jx=0.0, mean_jy=0.0, mean_jz=nbar / 2,
        var_jx=nbar / 4, var_jy=nbar / 4, var_jz=nbar / 4,
        nbar1=nbar, nbar2=0.0,
    )


def coherent_squeezed_moments(alpha: float, r: float) -> MomentSet:
    """Moments of ``|alpha>|xi = r>`` for real ``alpha`` at matched phase."""
    if r < 0:
        raise ValueError(f"squeeze factor r must be >= 0, got {r!r}")
    if np.iscomplexobj(alpha) and np.imag(alpha) != 0:
        raise ValueError("the analytic squeezed moments need real alpha; use the oracle route")
    a2 = float(np.real(alpha)) ** 2
    s2 = math.sinh(r) ** 2
    # <Jz^2> = (<n1^2> - 2 n1 n2 + <n2^2>)/4, <n2^2> = 3 s^4 + 2 s^2 for squeezed vacuum
    var_jz = (a2 + 2 * s2 * (s2 + 1)) / 4
    return MomentSet(
        mean_jx=0.0, mean_jy=0.0, mean_jz=(a2 - s2) / 2,
        var_jx=(a2 * math.exp(2 * r) + s2) / 4,
        var_jy=(a2 * math.exp(-2 * r) + s2) / 4,
        var_jz=var_jz,
        nbar1=a2, nbar2=s2,
    )


def twin_fock_moments(n: int) -> MomentSet:
    TwinFock(n)
    j = n
    return MomentSet(
        mean_jx=0.0, mean_jy=0.0, mean_jz=0.0,
        var_jx=j * (j + 1) / 2, var_jy=j * (j + 1) / 2, var_jz=0.0,
        nbar1=float(n), nbar2=float(n),
    )


def fock_product_moments(n1: int, n2: int) -> MomentSet:
    """Moments of ``|n1>|n2>``; the pure phase-insensitive-port case."""
    w = (2 * n1 * n2 + n1 + n2) / 4
    return MomentSet(
        mean_jx=0.0, mean_jy=0.0, mean_jz=(n1 - n2) / 2,
        var_jx=w, var_jy=w, var_jz=0.0,
        nbar1=float(n1), nbar2=float(n2),
    )


# -- single-mode amplitudes ----------------------------------------------------

def coherent_cutoff(alpha) -> int:
    """``ceil(|a|^2 + 10|a| + 20)``, raised if needed until the tail is below 1e-12."""
    a = abs(alpha)
    n = math.ceil(a * a + 10 * a + 20)
    while coherent_tail(alpha, n) >= TAIL_TOL:
        n += 1
    return n


def squeezed_cutoff(r: float) -> int:
    """``ceil(sinh^2 r + 10 sinh r cosh r + 20)``, raised until the tail is below 1e-12.

    The bare rule is not enough on its own: at ``r = 0.5`` it still drops
    ~7e-11 of the photon distribution.
    """
    s, c = math.sinh(r), math.cosh(r)
    n = math.ceil(s * s + 10 * s * c + 20)
    if r == 0:
        return n
    k, logmag = _squeezed_log_weights(r, 8 * n + 400)
    p = np.exp(2 * logmag)
    tail = np.cumsum(p[::-1])[::-1]  # tail[i] = sum_{k >= i} p_k
    need = np.flatnonzero(tail < TAIL_TOL)
    return max(n, 2 * int(need[0]) - 1) if need.size else 8 * n + 400


def coherent_amplitudes(alpha, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    a = abs(alpha)
    if a == 0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -a * a / 2 + n * math.log(a) - 0.5 * special.gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def coherent_tail(alpha, n_max: int) -> float:
    return float(stats.poisson.sf(n_max, abs(alpha) ** 2))


def _squeezed_log_weights(r: float, n_max: int):
    k = np.arange(n_max // 2 + 1)
    t = math.tanh(r)
    logmag = (
        k * math.log(t) + 0.5 * special.gammaln(2 * k + 1)
        - k * math.log(2) - special.gammaln(k + 1) - 0.5 * math.log(math.cosh(r))
    )
    return k, logmag


def squeezed_vacuum_amplitudes(r: float, theta: float, n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1, dtype=complex)
    if r == 0:
        out[0] = 1.0
        return out
    k, logmag = _squeezed_log_weights(r, n_max)
    out[2 * k] = np.exp(logmag) * np.exp(1j * k * theta)
    return out


def squeezed_tail(r: float, n_max: int) -> float:
    if r == 0:
        return 0.0
    # sum the discarded even terms directly; 1 - kept loses everything below 1e-16
    far = max(n_max, squeezed_cutoff(r)) * 4 + 200
    k, logmag = _squeezed_log_weights(r, far)
    return float(np.sum(np.exp(2 * logmag[2 * k > n_max])))


def _check_tail(tail: float, what: str, n_max: int):
    if tail >= TAIL_TOL:
        raise TruncationError(f"{what}: cap n_max={n_max} discards probability {tail:.3e} >= {TAIL_TOL}")


def coherent_state_single(alpha, n_max: int | None = None) -> np.ndarray:
    n_max = coherent_cutoff(alpha) if n_max is None else n_max
    _check_tail(coherent_tail(alpha, n_max), f"coherent alpha={alpha}", n_max)
    psi = coherent_amplitudes(alpha, n_max)
    return psi / np.linalg.norm(psi)


def squeezed_state_single(r: float, theta: float = 0.0, n_max: int | None = None) -> np.ndarray:
    n_max = squeezed_cutoff(r) if n_max is None else n_max
    _check_tail(squeezed_tail(r, n_max), f"squeezed r={r}", n_max)
    psi = squeezed_vacuum_amplitudes(r, theta, n_max)
    return psi / np.linalg.norm(psi)


def vacuum_single(n_max: int = 1) -> np.ndarray:
    psi = np.zeros(n_max + 1, dtype=complex)
    psi[0] = 1.0
    return psi


# -- fixed photon-number families ----------------------------------------------

def twin_fock_state(n: int) -> TwoModeState:
    """``|n>|n> = |j = n, m = 0>`` in the irrep basis."""
    TwinFock(n)
    return TwoModeState.irrep_basis_state(n, 0)


@dataclass(frozen=True)
class IntelligentStateSolution:
    eigenvalue: complex
    amplitudes: np.ndarray
    eta: float
    two_m0: int

    @property
    def two_j(self) -> int:
        return self.amplitudes.size - 1

    @property
    def m0(self) -> float:
        return self.two_m0 / 2

    @property
    def state(self) -> TwoModeState:
        return TwoModeState.irrep(self.amplitudes, self.two_j)

    def residual(self) -> float:
        jx, jy, _ = build_irrep_matrices(self.two_j / 2)
        op = self.eta * jx - 1j * jy
        v = self.amplitudes
        return float(np.linalg.norm(op @ v - self.eigenvalue * v))


def intelligent_operator(j, eta: float) -> np.ndarray:
    jx, jy, _ = build_irrep_matrices(j)
    return eta * jx - 1j * jy


def _balancing(two_j: int, eta: float) -> np.ndarray:
    # eta*Jx - i*Jy = D^-1 (i sqrt(1-eta^2) Jx) D with D = diag((i rho)^k)
    rho = math.sqrt((1 - eta) / (1 + eta))
    k = np.arange(two_j + 1)
    return (1j) ** k * rho**k


def intelligent_spectrum(j, eta: float) -> np.ndarray:
    """Eigenvalues of ``eta Jx - i Jy`` ordered like ``m0 = j, ..., -j``.

    Computed through the exact diagonal similarity to ``i sqrt(1-eta^2) Jx``;
    a plain non-symmetric solver loses ~7 digits at ``eta = 0.9, j = 10``.
    """
    two_j = two_j_of(j)
    if abs(eta) >= 1:
        return np.zeros(two_j + 1, dtype=complex)
    jx, _, _ = build_irrep_matrices(j)
    mu = np.linalg.eigvalsh(jx)[::-1]
    return 1j * math.sqrt(1 - eta * eta) * mu


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    lead = v[np.flatnonzero(np.abs(v) > 1e-300)[0]]
    return v * (abs(lead) / lead)


def solve_intelligent_state(j, eta: float, m0) -> IntelligentStateSolution:
    """Eigenvector of ``eta Jx - i Jy`` with eigenvalue ``i m0 sqrt(1 - eta^2)``."""
    two_j = two_j_of(j)
    spec = Intelligent(two_j, float(eta), int(round(2 * float(m0))))
    if abs(2 * float(m0) - spec.two_m0) > 1e-12:
        raise ValueError(f"m0 must be an integer or half-integer, got {m0!r}")
    if eta == 0:
        raise DegenerateSpectrumError(
            "eta = 0 makes the eigenproblem degenerate; use the eta -> 0 closed form"
        )
    dim = two_j + 1
    if abs(eta) == 1:
        if spec.two_m0 != 0:
            raise DegenerateSpectrumError("|eta| = 1 collapses the spectrum to 0; only m0 = 0 exists")
        # eta = 1 gives J-, eta = -1 gives -J+; both annihilate an extremal state
        v = np.zeros(dim, dtype=complex)
        v[-1 if eta > 0 else 0] = 1.0
        return IntelligentStateSolution(0j, v, float(eta), 0)
    if abs(eta) < ETA_MIN:
        warnings.warn(f"|eta| = {abs(eta):g} is below {ETA_MIN:g}; the eigenvector is ill conditioned")
    jx, _, _ = build_irrep_matrices(j)
    mu, w = np.linalg.eigh(jx)
    k = int(np.argmin(np.abs(mu - spec.m0)))
    s = math.sqrt(1 - eta * eta)
    v = w[:, k] / _balancing(two_j, eta)
    v = _fix_phase(v)
    v.setflags(write=False)
    return IntelligentStateSolution(1j * spec.m0 * s, v, float(eta), spec.two_m0)


def intelligent_moments(solution: IntelligentStateSolution) -> MomentSet:
    """Moments implied by the eigen-relations; only ``<Jz>`` and ``<Jz^2>`` are read off the vector.

    ``eta <Jx> - i <Jy> = lambda`` fixes the means, and the saturated
    uncertainty product with ``|eta| = dJy/dJx`` fixes both variances.
    """
    m = IrrepLabel(solution.two_j).m_values()
    p = np.abs(solution.amplitudes) ** 2
    mean_jz = float(p @ m)
    var_jz = float(p @ m**2) - mean_jz**2
    eta = abs(solution.eta)
    lam = solution.eigenvalue
    j = solution.two_j / 2
    return MomentSet(
        mean_jx=0.0,
        mean_jy=-lam.imag,
        mean_jz=mean_jz,
        var_jx=abs(mean_jz) / (2 * eta),
        var_jy=eta * abs(mean_jz) / 2,
        var_jz=var_jz,
        nbar1=j + mean_jz, nbar2=j - mean_jz,
    )


def intelligent_limit_variance(j, m0) -> float:
    """``(2 dJx)^2`` for eta -> 0: ``2 (j^2 - m0^2 + j)``."""
    j = two_j_of(j) / 2
    return 2 * (j * j - float(m0) ** 2 + j)


# -- spec dispatch -------------------------------------------------------------

def spec_to_state(spec: InputStateSpec, n_max=None) -> TwoModeState:
    """Explicit normalized amplitudes for ``spec``.

    ``n_max`` overrides the Fock caps (int or ``(n1_max, n2_max)``) for the
    coherent and squeezed families; a cap that loses >= 1e-12 probability
    raises :class:`TruncationError`.
    """
    if isinstance(spec, Custom):
        return spec.state
    if isinstance(spec, TwinFock):
        return twin_fock_state(spec.n)
    if isinstance(spec, Intelligent):
        return solve_intelligent_state(spec.j, spec.eta, spec.m0).state
    caps = (None, None) if n_max is None else tuple(np.broadcast_to(n_max, (2,)))
    if isinstance(spec, CoherentVacuum):
        psi1 = coherent_state_single(spec.alpha, caps[0])
        psi2 = vacuum_single(1 if caps[1] is None else caps[1])
    elif isinstance(spec, CoherentSqueezed):
        psi1 = coherent_state_single(spec.alpha, caps[0])
        psi2 = squeezed_state_single(spec.r, spec.theta, caps[1])
    else:
        raise TypeError(f"not an input-state spec: {spec!r}")
    return TwoModeState.fock_product(psi1, psi2)


def analytic_moments(spec: InputStateSpec) -> MomentSet:
    if isinstance(spec, CoherentVacuum):
        return coherent_vacuum_moments(abs(spec.alpha) ** 2)
    if isinstance(spec, CoherentSqueezed):
        if spec.theta != 0 or complex(spec.alpha).imag != 0:
            raise ValueError("closed-form squeezed moments need theta = 0 and real alpha")
        return coherent_squeezed_moments(complex(spec.alpha).real, spec.r)
    if isinstance(spec, TwinFock):
        return twin_fock_moments(spec.n)
    if isinstance(spec, Intelligent):
        return intelligent_moments(solve_intelligent_state(spec.j, spec.eta, spec.m0))
    raise ValueError(f"no closed-form moments for family {spec.family!r}")


# -- random states for property checks -------------------------------------------

def random_amplitudes(size: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def random_irrep_state(two_j: int, rng: np.random.Generator) -> TwoModeState:
    return TwoModeState(Basis.IRREP, random_amplitudes(two_j + 1, rng), two_j=two_j)
