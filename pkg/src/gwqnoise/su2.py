"""Schwinger su(2) operators on two boson modes.

Two representations are provided:

* the single irrep ``|j, m>`` with ``m = j, j-1, ..., -j`` (dense matrices),
* the truncated two-mode Fock space ``|n1, n2>`` ordered lexicographically
  in ``(n1, n2)``.

Fock-space operators are available as dense matrices for small truncations
(``build_fock_operators``), while ``moments_of`` applies the ladder
operators directly to the ``(n1+1, n2+1)`` amplitude array so that states
with a bright carrier (thousands of photons in one mode) stay cheap.

Truncation only corrupts matrix elements that would move amplitude past
the per-mode cap; states whose support stays below the cap are handled
exactly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10


class Basis(enum.Enum):
    FOCK = "fock"
    IRREP = "irrep"


def two_j_of(j) -> int:
    """Return ``2j`` as an int, rejecting negative or non half-integer labels."""
    twice = 2 * float(j)
    k = int(round(twice))
    if k < 0 or abs(twice - k) > 1e-12:
        raise ValueError(f"j must be a non-negative integer or half-integer, got {j!r}")
    return k


@dataclass(frozen=True)
class IrrepLabel:
    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 0:
            raise ValueError(f"2j must be a non-negative integer, got {self.two_j!r}")

    @classmethod
    def from_j(cls, j) -> "IrrepLabel":
        return cls(two_j_of(j))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (descending)."""
        return self.j - np.arange(self.dim)


def _check_hermitian(name: str, op: np.ndarray) -> None:
    err = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
    if err > HERMITIAN_TOL:
        raise ValueError(f"{name} is not Hermitian (max deviation {err:.3e})")


@lru_cache(maxsize=64)
def _irrep_matrices(two_j: int):
    label = IrrepLabel(two_j)
    m = label.m_values()
    j = label.j
    # <j, m+1| J+ |j, m> sits on the superdiagonal for descending m
    lower_m = m[1:]
    jplus = np.diag(np.sqrt(j * (j + 1) - lower_m * (lower_m + 1)), 1).astype(complex)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    jz = np.diag(m).astype(complex)
    for name, op in (("Jx", jx), ("Jy", jy), ("Jz", jz)):
        _check_hermitian(name, op)
        op.setflags(write=False)
    return jx, jy, jz


def build_irrep_matrices(label: IrrepLabel | float | int):
    """Return dense ``(Jx, Jy, Jz)`` on the ``2j+1`` dimensional irrep.

    ``label`` may be an :class:`IrrepLabel` or the spin ``j`` itself.
    """
    if not isinstance(label, IrrepLabel):
        label = IrrepLabel.from_j(label)
    return _irrep_matrices(label.two_j)


@dataclass(frozen=True)
class FockOperators:
    n_max: int
    a1: np.ndarray
    a2: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    n: np.ndarray

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def casimir(self) -> np.ndarray:
        return self.jx @ self.jx + self.jy @ self.jy + self.jz @ self.jz


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


@lru_cache(maxsize=16)
def _fock_operators(n_max: int) -> FockOperators:
    a = annihilation(n_max)
    eye = np.eye(n_max + 1)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    a1d, a2d = a1.conj().T, a2.conj().T
    jx = (a1d @ a2 + a2d @ a1) / 2
    jy = -1j * (a1d @ a2 - a2d @ a1) / 2
    jz = (a1d @ a1 - a2d @ a2) / 2
    n = a1d @ a1 + a2d @ a2
    for name, op in (("Jx", jx), ("Jy", jy), ("Jz", jz), ("N", n)):
        _check_hermitian(name, op)
    ops = FockOperators(n_max, a1, a2, jx, jy, jz, n)
    for op in (a1, a2, jx, jy, jz, n):
        op.setflags(write=False)
    return ops


def build_fock_operators(n_max: int) -> FockOperators:
    """Dense ladder and Schwinger operators on the ``(n_max+1)**2`` Fock space.

    Commutators are exact on every shell ``n1 + n2 < n_max``; only the top
    photon-number shell feels the truncation.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    return _fock_operators(int(n_max))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Normalized pure state of the two input modes.

    For ``Basis.FOCK`` the amplitudes are stored as a flat vector over
    ``|n1, n2>`` with index ``n1 * (n2_max + 1) + n2``; ``n_max`` holds the
    per-mode caps ``(n1_max, n2_max)``. For ``Basis.IRREP`` ``two_j`` fixes
    the irrep and amplitudes run over descending ``m``.
    """

    basis: Basis
    amplitudes: np.ndarray
    n_max: tuple[int, int] | None = None
    two_j: int | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if self.basis is Basis.FOCK:
            if self.n_max is None:
                raise ValueError("Fock-basis state needs n_max")
            caps = tuple(int(c) for c in np.broadcast_to(self.n_max, (2,)))
            if min(caps) < 0:
                raise ValueError(f"negative truncation {caps}")
            object.__setattr__(self, "n_max", caps)
            expected = (caps[0] + 1) * (caps[1] + 1)
        elif self.basis is Basis.IRREP:
            if self.two_j is None:
                raise ValueError("irrep-basis state needs two_j")
            object.__setattr__(self, "two_j", IrrepLabel(int(self.two_j)).two_j)
            expected = self.two_j + 1
        else:
            raise ValueError(f"unknown basis {self.basis!r}")
        if amps.size != expected:
            raise ValueError(f"expected {expected} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def fock(cls, amplitudes, n_max=None, normalize=False) -> "TwoModeState":
        """Build from a 2-D ``(n1, n2)`` array or a flat vector plus caps."""
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.ndim == 2:
            n_max = (amps.shape[0] - 1, amps.shape[1] - 1)
        elif n_max is None:
            raise ValueError("flat Fock amplitudes need n_max")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(Basis.FOCK, amps, n_max=n_max)

    @classmethod
    def irrep(cls, amplitudes, two_j=None, normalize=False) -> "TwoModeState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        if two_j is None:
            two_j = amps.size - 1
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(Basis.IRREP, amps, two_j=two_j)

    @classmethod
    def fock_product(cls, psi1, psi2, normalize=False) -> "TwoModeState":
        """Product state from two single-mode amplitude vectors."""
        return cls.fock(np.outer(psi1, psi2), normalize=normalize)

    @classmethod
    def fock_basis_state(cls, n1: int, n2: int, n_max=None) -> "TwoModeState":
        """``|n1, n2>``; the default box holds the whole ``n1 + n2`` shell so J acts exactly."""
        caps = (n1 + n2, n1 + n2) if n_max is None else tuple(np.broadcast_to(n_max, (2,)))
        if n1 > caps[0] or n2 > caps[1]:
            raise ValueError(f"|{n1}, {n2}> does not fit in caps {caps}")
        amps = np.zeros((caps[0] + 1, caps[1] + 1), dtype=complex)
        amps[n1, n2] = 1.0
        return cls.fock(amps)

    @classmethod
    def irrep_basis_state(cls, j, m) -> "TwoModeState":
        label = IrrepLabel.from_j(j)
        k = label.two_j / 2 - float(m)
        if abs(k - round(k)) > 1e-12 or not 0 <= round(k) <= label.two_j:
            raise ValueError(f"m={m} is not a basis index of j={label.j}")
        amps = np.zeros(label.dim, dtype=complex)
        amps[int(round(k))] = 1.0
        return cls(Basis.IRREP, amps, two_j=label.two_j)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def grid(self) -> np.ndarray:
        """Fock amplitudes as an ``(n1_max+1, n2_max+1)`` array."""
        if self.basis is not Basis.FOCK:
            raise ValueError("grid() is only defined for Fock-basis states")
        return self.amplitudes.reshape(self.n_max[0] + 1, self.n_max[1] + 1)

    def to_fock(self, n_max=None) -> "TwoModeState":
        """Embed an irrep state via ``|j, m> -> |j+m, j-m>``."""
        if self.basis is Basis.FOCK:
            return self
        caps = (self.two_j, self.two_j) if n_max is None else tuple(np.broadcast_to(n_max, (2,)))
        if min(caps) < self.two_j:
            raise ValueError(f"caps {caps} cannot hold 2j = {self.two_j} photons")
        amps = np.zeros((caps[0] + 1, caps[1] + 1), dtype=complex)
        n1 = self.two_j - np.arange(self.two_j + 1)
        amps[n1, self.two_j - n1] = self.amplitudes
        return TwoModeState.fock(amps)

    def shells(self) -> dict[int, np.ndarray]:
        """Split into fixed-photon-number components.

        Returns ``{2j: amplitudes over descending m}``; the components are
        unnormalized and include every shell with nonzero weight. Shells that
        the Fock box cuts off are padded with zeros.
        """
        if self.basis is Basis.IRREP:
            return {self.two_j: np.array(self.amplitudes)}
        g = self.grid()
        out = {}
        for total in range(sum(self.n_max) + 1):
            n1 = total - np.arange(total + 1)
            ok = (n1 <= self.n_max[0]) & (total - n1 <= self.n_max[1])
            vec = np.zeros(total + 1, dtype=complex)
            vec[ok] = g[n1[ok], total - n1[ok]]
            if np.any(vec):
                out[total] = vec
        return out

    def to_json(self) -> dict:
        d = {"basis": self.basis.value, "amplitudes": complex_pairs(self.amplitudes)}
        if self.basis is Basis.FOCK:
            d["n_max"] = list(self.n_max)
        else:
            d["two_j"] = self.two_j
        return d

    @classmethod
    def from_json(cls, d: dict) -> "TwoModeState":
        amps = np.array([complex(re, im) for re, im in d["amplitudes"]])
        basis = Basis(d["basis"])
        if basis is Basis.FOCK:
            return cls(basis, amps, n_max=tuple(d["n_max"]))
        return cls(basis, amps, two_j=d["two_j"])


def complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def operator_to_json(op: np.ndarray) -> str:
    """Debug dump of a dense operator as row-major ``[re, im]`` pairs."""
    op = np.asarray(op)
    return json.dumps({"dim": int(op.shape[0]), "entries": complex_pairs(op)})


def operator_from_json(text: str) -> np.ndarray:
    d = json.loads(text)
    n = d["dim"]
    return np.array([complex(re, im) for re, im in d["entries"]]).reshape(n, n)


# -- ladder action on Fock grids -------------------------------------------

def _lower(g: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(g)
    n = np.sqrt(np.arange(1, g.shape[axis]))
    if axis == 0:
        out[:-1] = n[:, None] * g[1:]
    else:
        out[:, :-1] = g[:, 1:] * n[None, :]
    return out


def _raise(g: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(g)
    n = np.sqrt(np.arange(1, g.shape[axis]))
    if axis == 0:
        out[1:] = n[:, None] * g[:-1]
    else:
        out[:, 1:] = g[:, :-1] * n[None, :]
    return out


def _fock_apply(g: np.ndarray, name: str) -> np.ndarray:
    if name == "n1":
        return g * np.arange(g.shape[0])[:, None]
    if name == "n2":
        return g * np.arange(g.shape[1])[None, :]
    if name == "jz":
        return (_fock_apply(g, "n1") - _fock_apply(g, "n2")) / 2
    # a1^dag a2 and its adjoint
    up = _raise(_lower(g, 1), 0)
    down = _raise(_lower(g, 0), 1)
    if name == "jx":
        return (up + down) / 2
    if name == "jy":
        return -0.5j * (up - down)
    raise KeyError(name)


def apply_operator(name: str, state: TwoModeState) -> np.ndarray:
    """Apply one of ``jx, jy, jz, n1, n2`` to ``state``; returns a flat vector."""
    if state.basis is Basis.FOCK:
        return _fock_apply(state.grid(), name).ravel()
    jx, jy, jz = _irrep_matrices(state.two_j)
    if name in ("jx", "jy", "jz"):
        op = {"jx": jx, "jy": jy, "jz": jz}[name]
        return op @ state.amplitudes
    m = IrrepLabel(state.two_j).m_values()
    occ = state.two_j / 2 + (m if name == "n1" else -m)
    return occ * state.amplitudes


def expectation(op: np.ndarray, state: TwoModeState, hermitian: bool = True):
    """``<psi|op|psi>``; real for Hermitian ``op`` after a residue check."""
    op = np.asarray(op)
    if op.shape != (state.dim, state.dim):
        raise ValueError(f"operator shape {op.shape} does not match state dimension {state.dim}")
    value = np.vdot(state.amplitudes, op @ state.amplitudes)
    if not hermitian:
        return complex(value)
    if abs(value.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(value.real)):
        raise ValueError(f"imaginary residue {value.imag:.3e} for a Hermitian operator")
    return float(value.real)


def variance(op: np.ndarray, state: TwoModeState) -> float:
    mean = expectation(op, state)
    return expectation(op @ op, state) - mean**2


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of ``Jx, Jy, Jz`` plus mean photon numbers.

    The covariances ``cov_ab = <{Ja, Jb}>/2 - <Ja><Jb>`` default to zero,
    which holds for every analytic family at matched phase.
    """

    mean_jx: float
    mean_jy: float
    mean_jz: float
    var_jx: float
    var_jy: float
    var_jz: float
    nbar1: float
    nbar2: float
    cov_xy: float = 0.0
    cov_yz: float = 0.0
    cov_xz: float = 0.0
    nbar: float = field(init=False)

    def __post_init__(self):
        for name in ("var_jx", "var_jy", "var_jz"):
            v = getattr(self, name)
            if v < 0:
                # roundoff on a vanishing variance
                scale = 1e-9 * max(1.0, self.nbar1 + self.nbar2) ** 2
                if v < -scale:
                    raise ValueError(f"{name} = {v!r} is negative")
                object.__setattr__(self, name, 0.0)
        object.__setattr__(self, "nbar", self.nbar1 + self.nbar2)

    def uncertainty_slack(self) -> float:
        """``var_jx * var_jy - mean_jz**2 / 4``; non-negative for physical states."""
        return self.var_jx * self.var_jy - self.mean_jz**2 / 4

    def covariance_matrix(self) -> np.ndarray:
        return np.array([
            [self.var_jx, self.cov_xy, self.cov_xz],
            [self.cov_xy, self.var_jy, self.cov_yz],
            [self.cov_xz, self.cov_yz, self.var_jz],
        ])

    def means(self) -> np.ndarray:
        return np.array([self.mean_jx, self.mean_jy, self.mean_jz])

    @classmethod
    def from_vectors(cls, means: np.ndarray, cov: np.ndarray, nbar1: float, nbar2: float) -> "MomentSet":
        return cls(
            mean_jx=float(means[0]), mean_jy=float(means[1]), mean_jz=float(means[2]),
            var_jx=float(cov[0, 0]), var_jy=float(cov[1, 1]), var_jz=float(cov[2, 2]),
            nbar1=float(nbar1), nbar2=float(nbar2),
            cov_xy=float(cov[0, 1]), cov_yz=float(cov[1, 2]), cov_xz=float(cov[0, 2]),
        )


def _raw_moments(state: TwoModeState):
    psi = state.amplitudes
    vecs = [apply_operator(k, state) for k in ("jx", "jy", "jz")]
    means = np.array([np.vdot(psi, v).real for v in vecs])
    second = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            # <{Ja, Jb}>/2 = Re <Ja psi|Jb psi> for Hermitian Ja, Jb
            second[a, b] = np.vdot(vecs[a], vecs[b]).real
    n1 = np.vdot(psi, apply_operator("n1", state)).real
    n2 = np.vdot(psi, apply_operator("n2", state)).real
    return means, second, n1, n2


def moments_of(state: TwoModeState) -> MomentSet:
    """Exact moments of a state vector; the brute-force oracle for every formula."""
    means, second, n1, n2 = _raw_moments(state)
    return MomentSet.from_vectors(means, second - np.outer(means, means), n1, n2)


def moments_of_mixture(states: Sequence[TwoModeState], weights: Sequence[float]) -> MomentSet:
    """Moments of the incoherent mixture ``sum_k w_k |psi_k><psi_k|``."""
    weights = np.asarray(weights, dtype=float)
    if len(states) != len(weights) or np.any(weights < 0):
        raise ValueError("need one non-negative weight per state")
    if abs(weights.sum() - 1) > 1e-12:
        raise ValueError(f"weights sum to {weights.sum()!r}, not 1")
    means = np.zeros(3)
    second = np.zeros((3, 3))
    n1 = n2 = 0.0
    for w, s in zip(weights, states):
        m, sec, a, b = _raw_moments(s)
        means += w * m
        second += w * sec
        n1 += w * a
        n2 += w * b
    return MomentSet.from_vectors(means, second - np.outer(means, means), n1, n2)
