"""Exact state-vector simulation of one qudit of prime dimension d.

The d bases of mutually unbiased vectors are

    |v_l^(j)> = d^{-1/2} sum_k w^{k(l + jk)} |k>,   w = exp(2 pi i / d),

and U_{x,y} = X^x Y^y is the diagonal unitary with entries w^{xk + yk^2}, which
maps |v_l^(j)> to |v_{l+x}^(j+y)> with no residual phase.  A two-qudit
(system, ancilla) register supports the controlled-shift eavesdropping model;
its amplitude for |k>|a> sits at flat index ``k * d + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from mubqss.errors import ParameterError, StateError
from mubqss.field import check_odd_prime

NORM_TOL = 1e-9


class MubLabel(NamedTuple):
    j: int  # basis index
    l: int  # vector index within basis j


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuditState:
    dim: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.dim,):
            raise StateError(f"expected {self.dim} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def allclose(self, other: "QuditState", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def to_pairs(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """System qudit tensored with an ancilla qudit, both of dimension ``dim``."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.dim * self.dim,):
            raise StateError(f"expected {self.dim ** 2} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``[k, a]`` (system index, ancilla index)."""
        return self.amplitudes.reshape(self.dim, self.dim)

    def allclose(self, other: "BipartiteState", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def to_pairs(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


def _check_normalized(amps: np.ndarray) -> None:
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise StateError(f"state is not normalized (|psi|^2 = {norm2!r})")


def omega_powers(d: int, exponents: np.ndarray) -> np.ndarray:
    """w^e for integer exponents, reduced mod d before taking the exponential."""
    e = np.mod(np.asarray(exponents, dtype=np.int64), d)
    return np.exp(2j * np.pi * e / d)


@lru_cache(maxsize=None)
def _basis_matrix(d: int, j: int) -> np.ndarray:
    k = np.arange(d, dtype=np.int64)
    l = np.arange(d, dtype=np.int64)[:, None]
    mat = omega_powers(d, k * (l + j * k)) / np.sqrt(d)
    mat.setflags(write=False)
    return mat


def mub_basis(d: int, j: int) -> np.ndarray:
    """Rows are the vectors |v_l^(j)>, l = 0..d-1."""
    check_odd_prime(d)
    return _basis_matrix(int(d), int(j) % d)


def mub_vector(d: int, label: MubLabel | tuple[int, int]) -> QuditState:
    j, l = label
    return QuditState(d, mub_basis(d, j)[int(l) % d])


def basis_state(d: int, k: int) -> QuditState:
    amps = np.zeros(d, dtype=np.complex128)
    amps[int(k) % d] = 1.0
    return QuditState(d, amps)


def inner_product(a: QuditState, b: QuditState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise ParameterError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def xy_phases(d: int, x: int, y: int) -> np.ndarray:
    k = np.arange(d, dtype=np.int64)
    return omega_powers(d, (x % d) * k + (y % d) * k * k)


def apply_xy(state: QuditState, x: int, y: int) -> QuditState:
    """Apply U_{x,y} = X^x Y^y."""
    return QuditState(state.dim, state.amplitudes * xy_phases(state.dim, x, y))


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), len(probs) - 1))


def mub_probabilities(state: QuditState, j: int) -> np.ndarray:
    """Outcome distribution of measuring ``state`` in basis j."""
    overlaps = mub_basis(state.dim, j).conj() @ state.amplitudes
    return np.abs(overlaps) ** 2


def measure_mub(state: QuditState, j: int, rng: np.random.Generator) -> tuple[int, QuditState]:
    """Projective measurement in basis j; returns (outcome l, |v_l^(j)>)."""
    _check_normalized(state.amplitudes)
    probs = mub_probabilities(state, j)
    l = _sample(probs, rng)
    return l, mub_vector(state.dim, (j, l))


def csum_entangle(state: QuditState) -> BipartiteState:
    """Attach ancilla |0> and apply |k>|a> -> |k>|a + k>."""
    _check_normalized(state.amplitudes)
    d = state.dim
    out = np.zeros(d * d, dtype=np.complex128)
    k = np.arange(d)
    out[k * d + k] = state.amplitudes
    return BipartiteState(d, out)


def product_state(system: QuditState, ancilla: QuditState) -> BipartiteState:
    return BipartiteState(system.dim, np.kron(system.amplitudes, ancilla.amplitudes))


def apply_xy_system(state: BipartiteState, x: int, y: int) -> BipartiteState:
    """U_{x,y} on the system half; ancilla untouched."""
    m = state.matrix() * xy_phases(state.dim, x, y)[:, None]
    return BipartiteState(state.dim, m.reshape(-1))


def mub_probabilities_system(state: BipartiteState, j: int) -> np.ndarray:
    projected = mub_basis(state.dim, j).conj() @ state.matrix()  # [l, a]
    return np.sum(np.abs(projected) ** 2, axis=1)


def measure_mub_system(state: BipartiteState, j: int, rng: np.random.Generator) -> tuple[int, BipartiteState]:
    """Measure the system register in basis j, collapsing it to |v_l^(j)>."""
    _check_normalized(state.amplitudes)
    basis = mub_basis(state.dim, j)
    projected = basis.conj() @ state.matrix()
    probs = np.sum(np.abs(projected) ** 2, axis=1)
    l = _sample(probs, rng)
    ancilla = projected[l] / np.sqrt(probs[l])
    return l, BipartiteState(state.dim, np.kron(basis[l], ancilla))


def measure_ancilla(state: BipartiteState, rng: np.random.Generator) -> tuple[int, BipartiteState]:
    """Measure the ancilla register in the computational basis."""
    _check_normalized(state.amplitudes)
    m = state.matrix()
    probs = np.sum(np.abs(m) ** 2, axis=0)
    a = _sample(probs, rng)
    post = np.zeros_like(m)
    post[:, a] = m[:, a] / np.sqrt(probs[a])
    return a, BipartiteState(state.dim, post.reshape(-1))


def verify_mub_family(d: int, tol: float = 1e-9) -> tuple[list[str], dict]:
    """Exhaustively check the d + 1 bases (computational plus the d bases above).

    Checks orthonormality within each basis, unbiasedness across every pair of
    bases and the shift law U_{x,y}|v_l^(j)> = |v_{l+x}^(j+y)>.  Returns
    ``(violations, summary)``; callers usually only report the first violation.
    """
    check_odd_prime(d)
    bases = [np.eye(d, dtype=np.complex128)] + [mub_basis(d, j) for j in range(d)]
    names = ["computational"] + [f"j={j}" for j in range(d)]
    violations: list[str] = []
    worst = {"orthonormality": 0.0, "unbiasedness": 0.0, "shift_law": 0.0}
    eye = np.eye(d)
    target = 1.0 / np.sqrt(d)
    for a, A in enumerate(bases):
        dev = float(np.max(np.abs(A.conj() @ A.T - eye)))
        worst["orthonormality"] = max(worst["orthonormality"], dev)
        if dev > tol:
            violations.append(f"basis {names[a]} not orthonormal (deviation {dev:.3e})")
        for b in range(a + 1, len(bases)):
            dev = float(np.max(np.abs(np.abs(A.conj() @ bases[b].T) - target)))
            worst["unbiasedness"] = max(worst["unbiasedness"], dev)
            if dev > tol:
                violations.append(f"bases {names[a]} and {names[b]} not unbiased (deviation {dev:.3e})")
    for x in range(d):
        for y in range(d):
            phases = xy_phases(d, x, y)
            for j in range(d):
                shifted = mub_basis(d, j) * phases
                expected = np.roll(mub_basis(d, j + y), -x, axis=0)  # row l holds v_{l+x}^(j+y)
                dev = float(np.max(np.abs(shifted - expected)))
                worst["shift_law"] = max(worst["shift_law"], dev)
                if dev > tol:
                    violations.append(f"shift law fails for x={x}, y={y}, j={j} (deviation {dev:.3e})")
    summary = {"d": d, "bases": len(bases), **{f"max_{k}_deviation": v for k, v in worst.items()}}
    return violations, summary
