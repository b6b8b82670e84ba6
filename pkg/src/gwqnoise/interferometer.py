"""The lossless interferometer as an SU(2) rotation, and phase estimation.

The beam splitter acts as ``R_y(-pi/2)`` on the way in and ``R_y(pi/2)`` on
the way out; the arm phase is ``R_z(phi)``. Together they rotate
``J = (Jx, Jy, Jz)`` about x by ``phi``, realized on states by
``U(phi) = exp(-i phi Jx)`` so that

    Jz_out = U^dag Jz U = cos(phi) Jz + sin(phi) Jy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .detector import DetectorConfig
from .su2 import Basis, IrrepLabel, MomentSet, TwoModeState, build_irrep_matrices, moments_of

# phi is the phase of arm 2 relative to arm 1, matching z = z2 - z1
PHASE_SIGN = +1

FD_STEP = 1e-5
FD_STEP_2ND = 1e-3
SLOPE_TOL = 1e-12


class Observable(enum.Enum):
    PHOTON_DIFFERENCE = "qdiff"
    SQUARED_DIFFERENCE = "sqdiff"

    @property
    def dark_fringe(self) -> float:
        return math.pi / 2 if self is Observable.PHOTON_DIFFERENCE else 0.0


class VanishingDerivativeError(ValueError):
    pass


def rot_x(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rot_y(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def rot_z(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def interferometer_rotation(phi: float) -> np.ndarray:
    """Beam splitter, arm phase, beam splitter: ``R_y(pi/2) R_z(phi) R_y(-pi/2)``."""
    return rot_y(math.pi / 2) @ rot_z(PHASE_SIGN * phi) @ rot_y(-math.pi / 2)


@dataclass(frozen=True)
class RotatedMoments:
    """Output-port moments at phase ``phi`` and the photon-difference statistics."""

    phi: float
    moments: MomentSet
    q_mean: float
    q_var: float
    q_slope: float


def heisenberg_transform(moments: MomentSet, phi: float) -> RotatedMoments:
    r = interferometer_rotation(phi)
    means = r @ moments.means()
    cov = r @ moments.covariance_matrix() @ r.T
    # N is invariant and N1 - N2 = 2 Jz at the output ports
    half = moments.nbar / 2
    out = MomentSet.from_vectors(means, cov, half + means[2], half - means[2])
    # d/dphi of 2 <Jz_out> = 2 (cos phi <Jy> - sin phi <Jz>)
    slope = 2 * (math.cos(phi) * moments.mean_jy - math.sin(phi) * moments.mean_jz)
    return RotatedMoments(phi, out, 2 * out.mean_jz, 4 * out.var_jz, slope)


@lru_cache(maxsize=128)
def _jx_eigensystem(two_j: int):
    jx, _, _ = build_irrep_matrices(IrrepLabel(two_j))
    return np.linalg.eigh(jx)


def _evolve_irrep(vec: np.ndarray, two_j: int, phi: float) -> np.ndarray:
    mu, w = _jx_eigensystem(two_j)
    return w @ (np.exp(-1j * PHASE_SIGN * phi * mu) * (w.conj().T @ vec))


def rotation_unitary(j, phi: float) -> np.ndarray:
    """Dense ``exp(-i phi Jx)`` on the irrep ``j``."""
    label = IrrepLabel.from_j(j)
    mu, w = _jx_eigensystem(label.two_j)
    return (w * np.exp(-1j * PHASE_SIGN * phi * mu)) @ w.conj().T


def schroedinger_evolve(state: TwoModeState, phi: float) -> TwoModeState:
    """Apply ``exp(-i phi Jx)``.

    Fock states are evolved shell by shell; the result lives in a square
    box large enough for the highest occupied shell, since the rotation
    spreads each shell over all its ``n1``.
    """
    if state.basis is Basis.IRREP:
        out = _evolve_irrep(state.amplitudes, state.two_j, phi)
        return TwoModeState.irrep(out / np.linalg.norm(out), state.two_j)
    shells = state.shells()
    top = max(shells)
    n_max = tuple(max(top, c) for c in state.n_max)
    amps = np.zeros((n_max[0] + 1, n_max[1] + 1), dtype=complex)
    for total, vec in shells.items():
        n1 = total - np.arange(total + 1)
        amps[n1, total - n1] = _evolve_irrep(vec, total, phi)
    return TwoModeState.fock(amps / np.linalg.norm(amps))


def _s_statistics(state: TwoModeState, phi: float) -> tuple[float, float]:
    """Mean and variance of ``S = 4 Jz_out^2`` from the evolved state vector."""
    mean = second = 0.0
    for total, vec in state.shells().items():
        out = _evolve_irrep(vec, total, phi)
        m = total / 2 - np.arange(total + 1)
        p = np.abs(out) ** 2
        s = 4 * m**2
        mean += p @ s
        second += p @ s**2
    return float(mean), float(max(second - mean**2, 0.0))


def _richardson_slope(f, x: float, h: float) -> float:
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def _richardson_curvature(f, x: float, h: float) -> float:
    f0 = f(x)
    c1 = (f(x + h) - 2 * f0 + f(x - h)) / h**2
    c2 = (f(x + h / 2) - 2 * f0 + f(x - h / 2)) / (h / 2) ** 2
    return (4 * c2 - c1) / 3


@dataclass(frozen=True)
class PhaseUncertainty:
    value: float
    observable: Observable
    phi: float
    variance: float
    slope: float

    @property
    def squared(self) -> float:
        return self.value**2


def heisenberg_bound(j) -> float:
    """``[2 j (j+1)]^(-1/2)``."""
    j = float(j)
    return 1 / math.sqrt(2 * j * (j + 1))


def phase_uncertainty(source: Union[TwoModeState, MomentSet], observable: Observable | str,
                      phi: float) -> PhaseUncertainty:
    """Error-propagation phase uncertainty ``dO / |d<O>/dphi|`` at ``phi``.

    The photon difference works from moments with the exact slope. The
    squared difference needs fourth moments, so it takes a state and
    differentiates ``<S>`` by Richardson-extrapolated central differences.
    When both variance and slope vanish (twin Fock at ``phi = 0``) the
    limit ``var''/2 / <S>''^2`` is returned.
    """
    observable = Observable(observable)
    if observable is Observable.PHOTON_DIFFERENCE:
        moments = source if isinstance(source, MomentSet) else moments_of(source)
        rot = heisenberg_transform(moments, phi)
        scale = max(1.0, moments.nbar)
        if abs(rot.q_slope) < SLOPE_TOL * scale:
            raise VanishingDerivativeError(
                "d<q_out>/dphi vanishes; this state carries no phase information in the photon difference"
            )
        return PhaseUncertainty(math.sqrt(rot.q_var) / abs(rot.q_slope), observable, phi,
                                rot.q_var, rot.q_slope)

    if not isinstance(source, TwoModeState):
        raise TypeError("the squared difference needs a state vector (fourth moments)")
    mean_s = lambda x: _s_statistics(source, x)[0]  # noqa: E731
    var_s = lambda x: _s_statistics(source, x)[1]  # noqa: E731
    _, var = _s_statistics(source, phi)
    slope = _richardson_slope(mean_s, phi, FD_STEP)
    scale = (1.0 + max(source.shells()) / 2) ** 2
    # differences of <S> below this are roundoff, not signal
    fd_noise = 100 * np.finfo(float).eps * scale / FD_STEP
    if abs(slope) >= max(SLOPE_TOL * scale, fd_noise):
        return PhaseUncertainty(math.sqrt(var) / abs(slope), observable, phi, var, slope)
    if var > SLOPE_TOL * scale**2:
        raise VanishingDerivativeError(f"d<S>/dphi vanishes at phi = {phi} while var(S) = {var:.3e}")
    curv = _richardson_curvature(mean_s, phi, FD_STEP_2ND)
    var_curv = _richardson_curvature(var_s, phi, FD_STEP_2ND)
    if abs(curv) < max(SLOPE_TOL * scale, 100 * np.finfo(float).eps * scale / FD_STEP_2ND**2):
        raise VanishingDerivativeError(f"<S> is flat to second order at phi = {phi}")
    value = math.sqrt(max(var_curv, 0.0) / 2) / abs(curv)
    return PhaseUncertainty(value, observable, phi, var, slope)


def twin_fock_sqdiff_variance(j, phi: float) -> float:
    """``(d phi)^2 = tan^2 phi / 8 + (2 - tan^2 phi) / (4 j (j+1))``."""
    t2 = math.tan(phi) ** 2
    j = float(j)
    return t2 / 8 + (2 - t2) / (4 * j * (j + 1))


def phase_from_displacement(z: float, config: DetectorConfig) -> float:
    return config.phase_gain * z


def displacement_from_phase(phi: float, config: DetectorConfig) -> float:
    return phi / config.phase_gain
