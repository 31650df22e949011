"""
No-signaling for ordinary measurements
======================================

For any pure bipartite state and any complete set of orthogonal
projectors on Alice's side, Bob's outcome-averaged state equals his
partial trace.
"""

import numpy as np

from eprsignal import BipartiteLayout, DensityMatrix, HermitianOperator, StateVector
from eprsignal.hilbert import partial_trace_A, trace_distance
from eprsignal.measurement import ProjectorFamily, measure_family, mixture

rng = np.random.default_rng(0)


def random_family(dim):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return ProjectorFamily(tuple(HermitianOperator(np.outer(c, c.conj())) for c in q.T),
                           tuple(str(i) for i in range(dim)))


worst = 0.0
for _ in range(200):
    layout = BipartiteLayout(3, 3)
    v = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi = StateVector(v / np.linalg.norm(v))
    ref = partial_trace_A(DensityMatrix.from_state(psi), layout)
    d = trace_distance(mixture(measure_family(random_family(3), psi, layout)), ref)
    worst = max(worst, d)
print("worst trace distance over 200 cases:", worst)

# The coherent focal operator is not a projector: it squares to twice itself.
from eprsignal import MeasurementRule, build_family

fam = build_family(MeasurementRule.COHERENT_FOCAL)
print("complete:", fam.complete, " P^2 = c P with c =", fam.idempotent_scale)
