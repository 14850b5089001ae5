"""Truncated bosonic Fock-space algebra.

Operators and states are dense numpy arrays tagged with per-mode truncation
dimensions.  Mode 0 is the leftmost Kronecker factor and therefore the
slowest-varying index of the flattened basis: the basis vector for occupation
numbers ``(n_0, ..., n_{k-1})`` sits at ``np.ravel_multi_index(ns, dims)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

__all__ = [
    "FockError",
    "InvalidDimensionError",
    "TruncationError",
    "TruncationWarning",
    "FockOperator",
    "QuantumState",
    "PhotonStatistics",
    "destroy",
    "create",
    "number",
    "identity",
    "projector",
    "coherent_state",
    "fock_state",
    "vacuum",
    "tensor",
    "embed",
    "partial_trace",
    "beamsplitter_unitary",
    "beamsplitter_map",
    "photon_statistics",
]


class FockError(ValueError):
    """Base class for invalid Fock-space arguments."""


class InvalidDimensionError(FockError):
    pass


class TruncationError(FockError):
    """Raised when a truncation is too small for the requested state."""

    def __init__(self, message: str, required_dim: int):
        super().__init__(message)
        self.required_dim = required_dim


class TruncationWarning(UserWarning):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise InvalidDimensionError("at least one mode is required")
    if any(d < 2 for d in dims):
        raise InvalidDimensionError(f"every mode dimension must be >= 2, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator on a tensor product of truncated modes."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        data = _frozen(self.data)
        side = math.prod(dims)
        if data.shape != (side, side):
            raise InvalidDimensionError(
                f"operator shape {data.shape} does not match dims {dims} (side {side})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def dag(self) -> "FockOperator":
        return FockOperator(self.data.conj().T, self.dims)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.data, self.data.conj().T, rtol=0, atol=atol))

    def expect(self, state: "QuantumState") -> complex:
        if state.dims != self.dims:
            raise InvalidDimensionError(f"dims mismatch: {self.dims} vs {state.dims}")
        if state.psi is not None:
            return complex(np.vdot(state.psi, self.data @ state.psi))
        # tr(O rho) without forming the product
        return complex(np.einsum("ij,ji->", self.data, state.rho))

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, FockOperator):
            if other.dims != self.dims:
                raise InvalidDimensionError(f"dims mismatch: {self.dims} vs {other.dims}")
            return other.data
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FockOperator(self.data + o, self.dims)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FockOperator(self.data - o, self.dims)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.data @ self._coerce(other), self.dims)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return FockOperator(self.data * scalar, self.dims)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if np.isscalar(scalar):
            return FockOperator(self.data / scalar, self.dims)
        return NotImplemented

    def __neg__(self):
        return FockOperator(-self.data, self.dims)

    def __pow__(self, k: int):
        return FockOperator(np.linalg.matrix_power(self.data, int(k)), self.dims)

    def __repr__(self):
        return f"FockOperator(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density matrix over truncated modes, optionally remembering a pure vector.

    ``leakage`` records probability weight discarded by truncation when the
    state was built (e.g. the Poisson tail of a coherent state).
    """

    rho: np.ndarray
    dims: tuple[int, ...]
    psi: np.ndarray | None = None
    leakage: float = 0.0
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        rho = _frozen(self.rho)
        side = math.prod(dims)
        if rho.shape != (side, side):
            raise InvalidDimensionError(f"rho shape {rho.shape} does not match dims {dims}")
        if self.validate:
            tr = np.trace(rho)
            if abs(tr - 1.0) > 1e-9:
                raise FockError(f"state trace {tr.real:.12g} differs from 1 by more than 1e-9")
            herm = np.max(np.abs(rho - rho.conj().T))
            if herm > 1e-12:
                raise FockError(f"density matrix is not hermitian (residual {herm:.3g})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "rho", rho)
        if self.psi is not None:
            object.__setattr__(self, "psi", _frozen(self.psi))

    @classmethod
    def from_vector(cls, psi, dims: Sequence[int], leakage: float = 0.0) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex).ravel()
        return cls(np.outer(psi, psi.conj()), tuple(dims), psi=psi, leakage=leakage)

    @classmethod
    def from_density(cls, rho, dims: Sequence[int], leakage: float = 0.0) -> "QuantumState":
        return cls(np.asarray(rho, dtype=complex), tuple(dims), leakage=leakage)

    @property
    def is_pure(self) -> bool:
        return self.psi is not None

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.rho, self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def check_positive(self, tol: float = 1e-9) -> bool:
        return self.min_eigenvalue() >= -tol

    def __repr__(self):
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState({kind}, dims={self.dims})"


# ---------------------------------------------------------------- operators

def destroy(dim: int) -> FockOperator:
    """Annihilation operator with ``a[n-1, n] = sqrt(n)``."""
    if int(dim) < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return FockOperator(np.diag(np.sqrt(np.arange(1, dim)), 1), (dim,))


def create(dim: int) -> FockOperator:
    return destroy(dim).dag()


def number(dim: int) -> FockOperator:
    if int(dim) < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return FockOperator(np.diag(np.arange(dim, dtype=float)), (dim,))


def identity(dim: int) -> FockOperator:
    if int(dim) < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return FockOperator(np.eye(dim), (dim,))


def projector(n: int, dim: int) -> FockOperator:
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside truncation {dim}")
    p = np.zeros((dim, dim))
    p[n, n] = 1.0
    return FockOperator(p, (dim,))


# ------------------------------------------------------------------- states

def fock_state(ns: int | Sequence[int], dims: int | Sequence[int]) -> QuantumState:
    ns = (ns,) if np.isscalar(ns) else tuple(ns)
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    if len(ns) != len(dims):
        raise InvalidDimensionError("occupation tuple and dims differ in length")
    dims = _check_dims(dims)
    if any(not 0 <= n < d for n, d in zip(ns, dims)):
        raise InvalidDimensionError(f"occupation {ns} outside truncation {dims}")
    psi = np.zeros(math.prod(dims), dtype=complex)
    psi[np.ravel_multi_index(ns, dims)] = 1.0
    return QuantumState.from_vector(psi, dims)


def vacuum(dims: int | Sequence[int]) -> QuantumState:
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    return fock_state((0,) * len(dims), dims)


def coherent_state(alpha: complex, dim: int) -> QuantumState:
    """Truncated, renormalized coherent state.

    Refuses truncations with ``dim < 4|alpha|^2``.  The discarded Poisson
    tail (before renormalization) is kept in ``state.leakage``.
    """
    dim = int(dim)
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    mean = abs(alpha) ** 2
    if mean > dim / 4:
        required = max(int(math.ceil(4 * mean)), 2)
        raise TruncationError(
            f"|alpha|^2 = {mean:.6g} needs dim >= {required}, got {dim}", required)
    n = np.arange(dim)
    # log-space amplitudes avoid overflow in alpha**n / sqrt(n!)
    if alpha == 0:
        c = np.zeros(dim, dtype=complex)
        c[0] = 1.0
    else:
        from scipy.special import gammaln
        logmag = -mean / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        c = np.exp(logmag) * np.exp(1j * np.angle(alpha) * n)
    norm2 = float(np.sum(np.abs(c) ** 2))
    leakage = max(0.0, 1.0 - norm2)
    return QuantumState.from_vector(c / math.sqrt(norm2), (dim,), leakage=leakage)


# -------------------------------------------------------------- composition

def tensor(items: Sequence[FockOperator | QuantumState]):
    """Kronecker product in the given mode order."""
    items = list(items)
    if not items:
        raise ValueError("tensor() needs at least one operand")
    dims = tuple(d for it in items for d in it.dims)
    if all(isinstance(it, FockOperator) for it in items):
        return FockOperator(reduce(np.kron, [it.data for it in items]), dims)
    if all(isinstance(it, QuantumState) for it in items):
        leakage = 1.0 - math.prod(1.0 - it.leakage for it in items)
        if all(it.is_pure for it in items):
            return QuantumState.from_vector(reduce(np.kron, [it.psi for it in items]),
                                            dims, leakage=leakage)
        return QuantumState(reduce(np.kron, [it.rho for it in items]), dims, leakage=leakage)
    raise TypeError("tensor() operands must be all operators or all states")


def embed(op: FockOperator, mode_index: int, dims: Sequence[int]) -> FockOperator:
    """Place a single-mode operator on ``mode_index`` of a multi-mode space."""
    dims = _check_dims(dims)
    if len(op.dims) != 1:
        raise InvalidDimensionError("embed() expects a single-mode operator")
    if not 0 <= mode_index < len(dims):
        raise IndexError(f"mode index {mode_index} out of range for {len(dims)} modes")
    if op.dims[0] != dims[mode_index]:
        raise InvalidDimensionError(
            f"operator dim {op.dims[0]} != dims[{mode_index}] = {dims[mode_index]}")
    left = math.prod(dims[:mode_index])
    right = math.prod(dims[mode_index + 1:])
    data = np.kron(np.kron(np.eye(left), op.data), np.eye(right))
    return FockOperator(data, dims)


def partial_trace(state: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduced state on the modes in ``keep`` (in the order given)."""
    keep = [int(k) for k in keep]
    n = len(state.dims)
    if not keep:
        raise ValueError("keep must name at least one mode")
    if len(set(keep)) != len(keep) or any(not 0 <= k < n for k in keep):
        raise IndexError(f"invalid mode indices {keep} for {n} modes")
    dims = state.dims
    traced = [i for i in range(n) if i not in keep]
    t = state.rho.reshape(dims + dims)
    # einsum subscripts: row index i, column index n+i; traced modes share a letter
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    for i in traced:
        letters[n + i] = letters[i]
    out = [letters[k] for k in keep] + [letters[n + k] for k in keep]
    reduced = np.einsum("".join(letters) + "->" + "".join(out), t)
    kd = tuple(dims[k] for k in keep)
    side = math.prod(kd)
    return QuantumState(reduced.reshape(side, side), kd, leakage=state.leakage,
                        validate=state.validate)


# -------------------------------------------------------------- beamsplitter

def beamsplitter_unitary(dim: int, mixing_angle: float = math.pi / 4) -> FockOperator:
    """Two-mode beamsplitter ``exp(theta (a1^dag a2 - a2^dag a1))`` on ``dim x dim``.

    Output ports obey ``c1 = cos(theta) a1 + sin(theta) a2`` and
    ``c2 = -sin(theta) a1 + cos(theta) a2``, so at ``theta = pi/4`` port 1
    carries the symmetric mode ``(a1 + a2)/sqrt(2)``.  The generator conserves
    total photon number, so the result is exact on every sector with
    ``n1 + n2 <= dim - 1``.
    """
    a = destroy(dim).data
    eye = np.eye(dim)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    gen = a1.conj().T @ a2 - a2.conj().T @ a1
    return FockOperator(expm(mixing_angle * gen), (dim, dim))


def _sector_leakage(rho: np.ndarray, dims: tuple[int, ...], modes: tuple[int, int]) -> float:
    pops = np.real(np.diag(rho)).reshape(dims)
    grids = np.indices(dims)
    total = grids[modes[0]] + grids[modes[1]]
    return float(pops[total > dims[modes[0]] - 1].sum())


def beamsplitter_map(state: QuantumState, modes: tuple[int, int] = (0, 1),
                     mixing_angle: float = math.pi / 4) -> QuantumState:
    """Apply a beamsplitter between two equal-dimension modes of ``state``.

    Probability in photon-number sectors that the truncation cannot hold
    completely is reported through a :class:`TruncationWarning`.
    """
    i, j = (int(m) for m in modes)
    dims = state.dims
    if i == j or not (0 <= i < len(dims) and 0 <= j < len(dims)):
        raise IndexError(f"invalid mode pair {modes}")
    if dims[i] != dims[j]:
        raise InvalidDimensionError("beamsplitter modes must have equal dimensions")
    leaked = _sector_leakage(state.rho, dims, (i, j))
    if leaked > 1e-12:
        warnings.warn(f"beamsplitter input has probability {leaked:.3g} in sectors "
                      "above the truncation", TruncationWarning, stacklevel=2)

    d = dims[i]
    u2 = beamsplitter_unitary(d, mixing_angle).data.reshape(d, d, d, d)
    # contract the 2-mode unitary into the target axes of the state tensor
    n = len(dims)
    if state.is_pure:
        psi = state.psi.reshape(dims)
        psi = np.tensordot(u2, psi, axes=([2, 3], [i, j]))
        psi = np.moveaxis(psi, [0, 1], [i, j]).ravel()
        return QuantumState.from_vector(psi, dims, leakage=state.leakage + leaked)
    rho = state.rho.reshape(dims + dims)
    rho = np.tensordot(u2, rho, axes=([2, 3], [i, j]))
    rho = np.moveaxis(rho, [0, 1], [i, j])
    rho = np.tensordot(rho, u2.conj(), axes=([n + i, n + j], [2, 3]))
    rho = np.moveaxis(rho, [2 * n - 2, 2 * n - 1], [n + i, n + j])
    side = math.prod(dims)
    rho = rho.reshape(side, side)
    return QuantumState(0.5 * (rho + rho.conj().T), dims, leakage=state.leakage + leaked)


# ------------------------------------------------------------ statistics

@dataclass(frozen=True, eq=False)
class PhotonStatistics:
    """Joint photon-number distribution and per-mode marginals."""

    joint: np.ndarray
    dims: tuple[int, ...]
    leakage: float
    truncation_leakage: float
    edge_population: tuple[float, ...]

    @property
    def marginals(self) -> list[np.ndarray]:
        n = len(self.dims)
        return [self.joint.sum(axis=tuple(k for k in range(n) if k != m)) for m in range(n)]

    def probability(self, *ns: int) -> float:
        if len(ns) != len(self.dims):
            raise ValueError(f"expected {len(self.dims)} occupation numbers")
        if any(not 0 <= n < d for n, d in zip(ns, self.dims)):
            return 0.0
        return float(self.joint[tuple(ns)])

    @property
    def probabilities(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(k) for k in idx): float(p) for idx, p in np.ndenumerate(self.joint)}

    def mean(self, mode: int) -> float:
        m = self.marginals[mode]
        return float(np.dot(np.arange(len(m)), m))


def photon_statistics(state: QuantumState) -> PhotonStatistics:
    """Fock-basis populations ``P(n_0, ..., n_k) = <n|rho|n>``.

    ``leakage`` is the deficit ``1 - sum(P)``; ``truncation_leakage`` is the
    weight discarded when the state was built; ``edge_population`` gives, per
    mode, the weight in the highest retained level (a truncation-health check).
    """
    joint = np.real(np.diag(state.rho)).reshape(state.dims).copy()
    joint.setflags(write=False)
    deficit = 1.0 - float(joint.sum())
    n = len(state.dims)
    edge = []
    for m in range(n):
        marg = joint.sum(axis=tuple(k for k in range(n) if k != m))
        edge.append(float(marg[-1]))
    return PhotonStatistics(joint, state.dims, deficit, state.leakage, tuple(edge))
