"""
Reduction rules for Alice's two-dimensional path space.

Three rules are supported:

* ``VonNeumannOffFocal``: the non-degenerate off-focal observable, with
  rank-one projectors ``P_l = |V><V|`` and ``P_m = |H><H|``.
* ``LuedersFocal``: the degenerate focal outcome treated the standard
  way, ``P_l + P_m = I``.
* ``CoherentFocal``: the degenerate amplitudes superpose, giving the
  operator ``(|H> + |V>)(<H| + <V|)``. This operator squares to twice
  itself, so it is not a projector. Its raw weight is reported alongside
  the renormalized probability.

Alice's basis is ordered ``(H, V)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .hilbert import (
    ALGEBRA_TOL,
    BipartiteLayout,
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    StateVector,
    bob_marginal_of,
    trace_distance,
)

_H = np.array([1, 0], dtype=complex)
_V = np.array([0, 1], dtype=complex)


class MeasurementRule(str, Enum):
    VON_NEUMANN_OFF_FOCAL = "VonNeumannOffFocal"
    LUEDERS_FOCAL = "LuedersFocal"
    COHERENT_FOCAL = "CoherentFocal"

    @property
    def focal(self) -> bool:
        return self is not MeasurementRule.VON_NEUMANN_OFF_FOCAL


@dataclass(frozen=True)
class ProjectorFamily:
    """Alice-side operators for one rule, plus computed algebraic flags."""

    projectors: tuple[HermitianOperator, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.projectors) != len(self.labels) or not self.projectors:
            raise ValueError("need one label per operator and at least one operator")
        dims = {p.dim for p in self.projectors}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed operator dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    @property
    def complete(self) -> bool:
        total = sum(p.entries for p in self.projectors)
        return bool(np.allclose(total, np.eye(self.dim), rtol=0, atol=ALGEBRA_TOL))

    @property
    def orthogonal(self) -> bool:
        for i, p in enumerate(self.projectors):
            for j, q in enumerate(self.projectors):
                target = p.entries if i == j else np.zeros_like(p.entries)
                if not np.allclose(p.entries @ q.entries, target, rtol=0, atol=ALGEBRA_TOL):
                    return False
        return True

    @property
    def idempotent_scale(self) -> tuple[float, ...]:
        """``c`` with ``P @ P == c * P`` for each member, NaN if no such c."""
        out = []
        for p in self.projectors:
            m = p.entries
            sq = m @ m
            tr = np.trace(m).real
            c = np.trace(sq).real / tr if tr != 0 else float("nan")
            ok = np.allclose(sq, c * m, rtol=0, atol=ALGEBRA_TOL)
            out.append(float(c) if ok else float("nan"))
        return tuple(out)


def build_family(rule: MeasurementRule) -> ProjectorFamily:
    rule = MeasurementRule(rule)
    if rule is MeasurementRule.VON_NEUMANN_OFF_FOCAL:
        return ProjectorFamily((HermitianOperator.projector(_V, "P_l"),
                                HermitianOperator.projector(_H, "P_m")), ("l", "m"))
    if rule is MeasurementRule.LUEDERS_FOCAL:
        return ProjectorFamily((HermitianOperator.projector(_V, "P_l")
                                + HermitianOperator.projector(_H, "P_m"),), ("k",))
    return ProjectorFamily((HermitianOperator.projector(_H + _V, "P_l+m"),), ("k",))


def joint_expectation(pA: HermitianOperator, pB: HermitianOperator,
                      psi: StateVector, layout: BipartiteLayout) -> float:
    """``<psi| pA (x) pB |psi>`` without forming the Kronecker product."""
    layout.check(psi.dim)
    if pA.dim != layout.dim_A or pB.dim != layout.dim_B:
        raise DimensionMismatchError(
            f"operators {pA.dim}x{pB.dim} for layout {layout.dim_A}x{layout.dim_B}")
    m = psi.amplitudes.reshape(layout.dim_A, layout.dim_B)
    val = np.sum(m.conj() * (pA.entries @ m @ pB.entries.T))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"joint expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def screen_distribution(pA: HermitianOperator, psi: StateVector,
                        layout: BipartiteLayout) -> np.ndarray:
    """``<psi| pA (x) |b><b| |psi>`` for every Bob basis state ``b`` at once."""
    layout.check(psi.dim)
    m = psi.amplitudes.reshape(layout.dim_A, layout.dim_B)
    return np.real(np.sum(m.conj() * (pA.entries @ m), axis=0))


@dataclass(frozen=True)
class MeasurementOutcome:
    """One outcome of Alice's measurement and what it leaves Bob holding.

    ``bob_state`` is the normalized conditional pure state when there is
    one; it is ``None`` for a mixed conditional state (the Lueders rule on
    an entangled input) and for zero-weight outcomes, where ``defined`` is
    False.
    """

    label: str
    probability: float
    raw_weight: float
    bob_state: StateVector | None
    bob_density: DensityMatrix | None

    @property
    def defined(self) -> bool:
        return self.bob_density is not None


_ZERO_WEIGHT = 1e-15


def _check_normalized(psi: StateVector) -> None:
    if abs(psi.norm - 1.0) > 1e-10:
        raise ValueError(f"measure expects a normalized state, norm is {psi.norm:.12g}")


def _bob_labels(psi: StateVector, layout: BipartiteLayout) -> tuple[str, ...]:
    # strip Alice's label prefix when every label has the expected shape
    first = psi.basis_labels[: layout.dim_B]
    return tuple(l[1:] if len(l) > 1 else str(i) for i, l in enumerate(first))


def _from_bra(label, bra, psi, layout):
    m = psi.amplitudes.reshape(layout.dim_A, layout.dim_B)
    vec = bra.conj() @ m
    w = float(np.sum(np.abs(vec) ** 2))
    if w <= _ZERO_WEIGHT:
        return label, w, None, None
    b = StateVector(vec / np.sqrt(w), _bob_labels(psi, layout))
    return label, w, b, DensityMatrix.from_state(b)


def _from_projector(label, proj, psi, layout):
    m = psi.amplitudes.reshape(layout.dim_A, layout.dim_B)
    post = StateVector((proj.entries @ m).reshape(-1))
    w = float(np.sum(np.abs(post.amplitudes) ** 2))
    if w <= _ZERO_WEIGHT:
        return label, w, None, None
    rho = DensityMatrix(bob_marginal_of(post, layout).entries / w)
    return label, w, None, rho


def _finish(raw) -> list[MeasurementOutcome]:
    total = sum(w for _, w, _, _ in raw)
    if total <= 0:
        raise ValueError("every outcome has zero weight")
    return [MeasurementOutcome(label, w / total if rho is not None else 0.0, w, b, rho)
            for label, w, b, rho in raw]


def measure(rule: MeasurementRule, psi: StateVector,
            layout: BipartiteLayout) -> list[MeasurementOutcome]:
    """Outcome probabilities and Bob's conditional states under ``rule``.

    Probabilities are raw weights renormalized over the family. For the
    von Neumann and Lueders rules the raw weights already sum to one.
    """
    rule = MeasurementRule(rule)
    layout.check(psi.dim)
    if layout.dim_A != 2:
        raise DimensionMismatchError("Alice's space must be two-dimensional")
    _check_normalized(psi)
    if rule is MeasurementRule.VON_NEUMANN_OFF_FOCAL:
        raw = [_from_bra("l", _V, psi, layout), _from_bra("m", _H, psi, layout)]
    elif rule is MeasurementRule.COHERENT_FOCAL:
        # unnormalized bra on purpose: <H| + <V|
        raw = [_from_bra("k", _H + _V, psi, layout)]
    else:
        raw = [_from_projector("k", build_family(rule).projectors[0], psi, layout)]
    return _finish(raw)


def measure_family(family: ProjectorFamily, psi: StateVector,
                   layout: BipartiteLayout) -> list[MeasurementOutcome]:
    """Lueders-style measurement with an arbitrary projector family on A."""
    layout.check(psi.dim)
    if family.dim != layout.dim_A:
        raise DimensionMismatchError(f"family acts on {family.dim}, Alice has {layout.dim_A}")
    _check_normalized(psi)
    return _finish([_from_projector(l, p, psi, layout)
                    for l, p in zip(family.labels, family.projectors)])


def mixture(outcomes: Sequence[MeasurementOutcome]) -> DensityMatrix:
    rhos = [o.probability * o.bob_density.entries for o in outcomes if o.defined]
    return DensityMatrix(sum(rhos))


def bob_marginal(rule: MeasurementRule, psi: StateVector,
                 layout: BipartiteLayout) -> DensityMatrix:
    """Bob's state averaged over Alice's outcomes (he cannot see which)."""
    return mixture(measure(rule, psi, layout))


@dataclass(frozen=True)
class SignalStrength:
    trace_dist: float
    helstrom_success: float


def signal_strength(psi: StateVector, layout: BipartiteLayout,
                    focal_rule: MeasurementRule = MeasurementRule.COHERENT_FOCAL
                    ) -> SignalStrength:
    """How well Bob can tell Alice's focal setting from the off-focal one.

    ``helstrom_success`` is the best single-copy guessing probability
    for equal priors.
    """
    d = trace_distance(bob_marginal(focal_rule, psi, layout),
                       bob_marginal(MeasurementRule.VON_NEUMANN_OFF_FOCAL, psi, layout))
    return SignalStrength(d, 0.5 * (1.0 + d))
