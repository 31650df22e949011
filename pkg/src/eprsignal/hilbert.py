"""
Finite-dimensional state and operator algebra for two-party systems.

All composite indices are A-major: the basis element ``(a, b)`` of an
``A (x) B`` space sits at position ``a * dim_B + b``. Every other module
relies on this ordering.

Values are immutable; the underlying arrays are flagged read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
POSITIVITY_TOL = 1e-10
IMAG_RESIDUE_TOL = 1e-8


class DimensionMismatchError(ValueError):
    """Operands live in incompatible spaces."""


class ZeroNormError(ValueError):
    """A zero vector cannot be normalized."""


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over a labelled basis.

    States are not forced to unit norm: the truncated field state is
    deliberately unnormalized. Use :func:`normalize` when a unit vector is
    needed.
    """

    amplitudes: np.ndarray
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        labels = tuple(self.basis_labels) or tuple(str(i) for i in range(amps.size))
        if len(labels) != amps.size:
            raise DimensionMismatchError(
                f"{len(labels)} labels for {amps.size} amplitudes")
        if amps.size == 0:
            raise DimensionMismatchError("empty state")
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        mags = np.abs(self.amplitudes)
        top = float(mags.max())
        if top == 0.0 or not math.isfinite(top):
            return top
        # scaled so tiny amplitudes do not underflow when squared
        return top * float(np.sqrt(np.sum((mags / top) ** 2)))

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis_labels.index(label)])

    @classmethod
    def basis(cls, labels: Sequence[str], which: str) -> "StateVector":
        amps = np.zeros(len(labels), dtype=complex)
        amps[list(labels).index(which)] = 1.0
        return cls(amps, tuple(labels))

    def __repr__(self):
        terms = ", ".join(f"{l}: {a:.6g}" for l, a in zip(self.basis_labels, self.amplitudes))
        return f"StateVector({terms})"


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian operator meant to hold a (possibly unnormalized) state."""

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > ALGEBRA_TOL * scale:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        a = psi.amplitudes
        return cls(np.outer(a, a.conj()))

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.entries)

    def is_positive(self, tol: float = POSITIVITY_TOL) -> bool:
        return bool(self.eigenvalues()[0] >= -tol)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True)
class HermitianOperator:
    entries: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > ALGEBRA_TOL * scale:
            raise ValueError(f"operator {self.name!r} is not Hermitian")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def projector(cls, vec, name: str = "") -> "HermitianOperator":
        """``|v><v|`` for a vector taken as given (no normalization)."""
        v = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()), name)

    @classmethod
    def identity(cls, dim: int, name: str = "I") -> "HermitianOperator":
        return cls(np.eye(dim, dtype=complex), name)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if other.dim != self.dim:
            raise DimensionMismatchError(f"{self.dim} vs {other.dim}")
        return HermitianOperator(self.entries + other.entries,
                                 f"{self.name}+{other.name}")


@dataclass(frozen=True)
class BipartiteLayout:
    dim_A: int
    dim_B: int

    def __post_init__(self):
        if self.dim_A < 1 or self.dim_B < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.dim_A * self.dim_B

    def index(self, a: int, b: int) -> int:
        return a * self.dim_B + b

    def check(self, dim: int) -> None:
        if dim != self.dim:
            raise DimensionMismatchError(
                f"layout {self.dim_A}x{self.dim_B} does not index a {dim}-dim space")


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    amps = np.kron(a.amplitudes, b.amplitudes)
    labels = tuple(la + lb for la in a.basis_labels for lb in b.basis_labels)
    return StateVector(amps, labels)


def normalize(psi: StateVector) -> StateVector:
    n = psi.norm
    if n == 0.0 or not math.isfinite(n):
        raise ZeroNormError("cannot normalize a zero (or non-finite) vector")
    return StateVector(psi.amplitudes / n, psi.basis_labels)


def expectation(op: HermitianOperator, psi: StateVector) -> float:
    """<psi|op|psi>; psi is used as given, normalized or not."""
    if op.dim != psi.dim:
        raise DimensionMismatchError(f"operator dim {op.dim}, state dim {psi.dim}")
    a = psi.amplitudes
    val = np.vdot(a, op.entries @ a)
    if abs(val.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def _as_matrix(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, (DensityMatrix, HermitianOperator)) else np.asarray(rho)


def partial_trace_A(rho: DensityMatrix, layout: BipartiteLayout) -> DensityMatrix:
    """Trace out subsystem A, leaving the ``dim_B x dim_B`` marginal of B."""
    layout.check(rho.dim)
    t = rho.entries.reshape(layout.dim_A, layout.dim_B, layout.dim_A, layout.dim_B)
    return DensityMatrix(np.einsum("aiaj->ij", t))


def partial_trace_B(rho: DensityMatrix, layout: BipartiteLayout) -> DensityMatrix:
    """Trace out subsystem B, leaving the marginal of A."""
    layout.check(rho.dim)
    t = rho.entries.reshape(layout.dim_A, layout.dim_B, layout.dim_A, layout.dim_B)
    return DensityMatrix(np.einsum("aibi->ab", t))


def bob_marginal_of(psi: StateVector, layout: BipartiteLayout) -> DensityMatrix:
    """Tr_A |psi><psi| without forming the full outer product."""
    layout.check(psi.dim)
    m = psi.amplitudes.reshape(layout.dim_A, layout.dim_B)
    return DensityMatrix(m.T @ m.conj())


# -- eigenvalues ------------------------------------------------------------

def _eigvals_2x2(m: np.ndarray) -> np.ndarray:
    a, d = m[0, 0].real, m[1, 1].real
    b = abs(m[0, 1])
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    return np.array([mean - rad, mean + rad])


def _eigvals_jacobi(m: np.ndarray, max_sweeps: int = 60) -> np.ndarray:
    # Cyclic Jacobi on a complex Hermitian matrix, in plain Python scalars:
    # for the small sizes used here that beats per-pivot numpy calls.
    # Symmetrize first: for near-zero inputs the non-Hermitian round-off is
    # as large as the entries and would stall the rotations.
    n = m.shape[0]
    a = (0.5 * (m + m.conj().T)).tolist()
    scale = sum(abs(x) ** 2 for row in a for x in row)
    if scale == 0.0:
        return np.zeros(n)
    # round-off keeps the off-diagonal mass near (n eps)^2 of the total
    floor = (n * np.finfo(float).eps) ** 2 * scale
    prev = math.inf
    for _ in range(max_sweeps):
        off = sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(i + 1, n))
        if off <= floor or off >= prev:
            break
        prev = off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phc = (apq / mag).conjugate()
                theta = 0.5 * math.atan2(2.0 * mag, a[q][q].real - a[p][p].real)
                c, s = math.cos(theta), math.sin(theta)
                # columns p, q times u = diag(1, phc) @ [[c, s], [-s, c]]
                u10, u11 = -s * phc, c * phc
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x + u10 * y
                    row[q] = s * x + u11 * y
                # rows p, q times u^H from the left
                rp, rq = a[p], a[q]
                v10, v11 = u10.conjugate(), u11.conjugate()
                for j in range(n):
                    x, y = rp[j], rq[j]
                    rp[j] = c * x + v10 * y
                    rq[j] = s * x + v11 * y
    return np.sort(np.array([a[i][i].real for i in range(n)]))


def eigvalsh(m) -> np.ndarray:
    """Ascending eigenvalues of a small Hermitian matrix.

    Closed form for 2x2; cyclic Jacobi otherwise. Meant for the handful of
    dimensions used here (up to 8), not as a general solver.
    """
    m = np.asarray(_as_matrix(m), dtype=complex)
    if m.shape == (1, 1):
        return np.array([m[0, 0].real])
    if m.shape == (2, 2):
        return _eigvals_2x2(m)
    return _eigvals_jacobi(m)


def trace_distance(r1: DensityMatrix, r2: DensityMatrix) -> float:
    if r1.dim != r2.dim:
        raise DimensionMismatchError(f"{r1.dim} vs {r2.dim}")
    ev = eigvalsh(r1.entries - r2.entries)
    return float(min(1.0, 0.5 * np.sum(np.abs(ev))))
