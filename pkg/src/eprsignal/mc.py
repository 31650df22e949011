"""
Seeded Monte Carlo detection events and Bob's one-bit decoder.

Random numbers come from numpy's PCG64 (PCG XSL RR 128/64) seeded through
``SeedSequence(seed, spawn_key=(trial,))``, one independent stream per
trial. Uniforms are formed directly from the raw 64-bit outputs as
``((x >> 11) + 1) * 2**-53``, which lies in (0, 1]. This avoids any
dependence on numpy's distribution code, so event logs are identical
across platforms and numpy releases that keep PCG64 stable.

Each emitted pair consumes exactly four raw draws, in this order:
background, detector efficiency, Alice outcome, Bob bin.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .experiment import Geometry, Pattern, phase_evolved_state, screen_layout
from .hilbert import StateVector
from .measurement import MeasurementRule, build_family, measure, screen_distribution

DRAWS_PER_EVENT = 4
BACKGROUND_LABEL = "-"
SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class RunConfig:
    n_events: int
    seed: int
    rule: MeasurementRule
    geometry: Geometry = field(default_factory=Geometry)
    background_rate: float = 0.0
    efficiency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rule", MeasurementRule(self.rule))
        if isinstance(self.n_events, bool) or int(self.n_events) != self.n_events or self.n_events < 1:
            raise ValueError(f"n_events must be a positive integer, got {self.n_events!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < SEED_LIMIT:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 0.0 <= self.background_rate < 1.0:
            raise ValueError("background_rate must lie in [0, 1)")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.geometry.n_bins < 2:
            raise ValueError("Monte Carlo runs need n_bins >= 2")


@dataclass(frozen=True)
class EventRecord:
    index: int
    alice_outcome: str
    bob_bin: int
    is_background: bool


def _stream(seed: int, trial: int) -> np.random.PCG64:
    return np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def uniforms(seed: int, trial: int, n: int) -> np.ndarray:
    raw = _stream(seed, trial).random_raw(n).astype(np.uint64)
    return ((raw >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0 ** -53


def _cdf(weights: np.ndarray) -> np.ndarray:
    c = np.cumsum(weights, dtype=float)
    c /= c[-1]
    c[-1] = 1.0
    return c


def inverse_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Smallest index with ``cdf[i] >= u``; zero-weight bins are never hit for u > 0."""
    return np.searchsorted(cdf, u, side="left")


@lru_cache(maxsize=32)
def conditional_patterns(rule: MeasurementRule, geo: Geometry):
    """Alice's outcome labels, their probabilities and Bob's screen pattern for each.

    Obtained by measuring the screen-propagated pair state with ``rule``;
    the focal rules use the focal-plane path phases.
    """
    rule = MeasurementRule(rule)
    z = geo.z_grid()
    layout = screen_layout(z.size)
    psi = phase_evolved_state(geo, "focal" if rule.focal else "offfocal", z)
    outcomes = measure(rule, psi, layout)
    labels, probs, rows = [], [], []
    family = build_family(rule)
    for o, op in zip(outcomes, family.projectors):
        labels.append(o.label)
        probs.append(o.probability)
        rows.append(np.clip(screen_distribution(op, psi, layout), 0.0, None))
    return tuple(labels), np.array(probs), np.array(rows)


def simulate_run(cfg: RunConfig, trial: int = 0) -> list[EventRecord]:
    """Generate ``cfg.n_events`` emitted pairs and return the detected ones.

    Background events replace the pair with a uniformly placed click on
    Bob's screen. Pairs lost to detector efficiency leave no record, so the
    log can be shorter than ``n_events``; indices always count emissions.
    """
    n_bins = cfg.geometry.n_bins
    labels, probs, rows = conditional_patterns(cfg.rule, cfg.geometry)
    u = uniforms(cfg.seed, trial, DRAWS_PER_EVENT * cfg.n_events).reshape(-1, DRAWS_PER_EVENT)
    is_bg = u[:, 0] <= cfg.background_rate
    kept = u[:, 1] <= cfg.efficiency
    alice = inverse_cdf(_cdf(probs), u[:, 2])
    bins = np.empty(cfg.n_events, dtype=np.int64)
    for i in range(len(labels)):
        sel = alice == i
        bins[sel] = inverse_cdf(_cdf(rows[i]), u[sel, 3])
    bins[is_bg] = np.minimum((u[is_bg, 3] * n_bins).astype(np.int64), n_bins - 1)
    return [EventRecord(int(i), BACKGROUND_LABEL if is_bg[i] else labels[alice[i]],
                        int(bins[i]), bool(is_bg[i]))
            for i in np.flatnonzero(kept)]


def histogram(events: Sequence[EventRecord], n_bins: int, positions=None) -> Pattern:
    """Counts per Bob bin. Positions default to the bin indices."""
    counts = np.bincount([e.bob_bin for e in events], minlength=n_bins).astype(float)
    if counts.size > n_bins:
        raise ValueError(f"event bin outside [0, {n_bins})")
    pos = np.arange(n_bins, dtype=float) if positions is None else positions
    return Pattern(pos, counts, flags=() if events else ("empty",))


@dataclass(frozen=True)
class VisibilityEstimate:
    v: float
    std_error: float
    n_events_used: int


def visibility(p: Pattern, window: int = 3) -> VisibilityEstimate:
    """Fringe contrast ``(max - min) / (max + min)`` of a moving-average-smoothed pattern.

    The default three-bin window suppresses shot noise in count
    histograms. Noise-free analytic patterns should use ``window=1``:
    smoothing raises a true zero and lowers a true peak. The standard error
    treats the windowed sums at the extrema as binomial counts out of the
    pattern total, so it is only meaningful for count histograms.
    """
    vals = np.asarray(p.values, dtype=float)
    if vals.size == 0:
        raise ValueError("empty pattern")
    total = float(vals.sum())
    if not total > 0:
        raise ValueError("all-zero pattern has no visibility")
    w = max(1, min(int(window), vals.size))
    sums = np.convolve(vals, np.ones(w), mode="valid")
    hi, lo = float(sums.max()), float(sums.min())
    v = (hi - lo) / (hi + lo)
    var_hi = hi * max(0.0, 1.0 - hi / total)
    var_lo = lo * max(0.0, 1.0 - lo / total)
    err = 2.0 * math.sqrt(lo * lo * var_hi + hi * hi * var_lo) / (hi + lo) ** 2
    return VisibilityEstimate(min(1.0, max(0.0, v)), err, int(round(total)))


def rebin(counts: np.ndarray, n_coarse: int) -> np.ndarray:
    """Sum equal groups of adjacent bins; leftover bins are dropped evenly from both edges."""
    counts = np.asarray(counts)
    n_coarse = max(1, min(int(n_coarse), counts.size))
    width = counts.size // n_coarse
    used = n_coarse * width
    start = (counts.size - used) // 2
    return counts[start:start + used].reshape(n_coarse, width).sum(axis=1)


@dataclass(frozen=True)
class DecodeResult:
    bit: int
    v: VisibilityEstimate
    low_confidence: bool
    n_coarse: int


def decode_bit(events: Sequence[EventRecord], threshold_v: float, n_bins: int,
               window: int = 3, min_counts_per_bin: int = 50) -> DecodeResult:
    """Bob's guess of Alice's setting from his singles alone: 1 means focal.

    Only ``bob_bin`` is read. Counts are first grouped into coarse bins
    holding about ``min_counts_per_bin`` events each (never fewer than
    three bins, never more than ``n_bins``). Without that step, shot
    noise on a sparse fine histogram looks like fringes.
    """
    if not 0.0 < threshold_v < 1.0:
        raise ValueError("threshold_v must lie in (0, 1)")
    low = len(events) < 10 * n_bins
    hist = histogram(events, n_bins)
    if not events:
        return DecodeResult(0, VisibilityEstimate(0.0, 0.0, 0), True, 0)
    n_coarse = int(np.clip(len(events) // max(1, min_counts_per_bin), 3, n_bins))
    coarse = rebin(hist.values, n_coarse)
    est = visibility(Pattern(np.arange(coarse.size, dtype=float), coarse), window)
    return DecodeResult(int(est.v > threshold_v), est, low, n_coarse)


# -- event logs ---------------------------------------------------------------

LOG_COLUMNS = "index,alice_outcome,bob_bin,is_background"


def format_event_log(events: Iterable[EventRecord], cfg: RunConfig, trial: int = 0) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={cfg.seed}\n# trial={trial}\n# rule={cfg.rule.value}\n"
              f"# n_events={cfg.n_events}\n# geometry_hash={cfg.geometry.hash()}\n"
              f"# background_rate={cfg.background_rate!r}\n# efficiency={cfg.efficiency!r}\n"
              f"# {LOG_COLUMNS}\n")
    for e in events:
        buf.write(f"{e.index},{e.alice_outcome},{e.bob_bin},{int(e.is_background)}\n")
    return buf.getvalue()


def write_event_log(path, events, cfg: RunConfig, trial: int = 0) -> None:
    Path(path).write_text(format_event_log(events, cfg, trial))


def read_event_log(path) -> tuple[dict, list[EventRecord]]:
    header: dict = {}
    events = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                header[k.strip()] = v.strip()
            continue
        if not line.strip():
            continue
        idx, lab, b, bg = line.split(",")
        events.append(EventRecord(int(idx), lab, int(b), bg == "1"))
    return header, events
