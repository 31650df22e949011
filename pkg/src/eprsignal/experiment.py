"""
Geometry, truncated down-conversion field, field operators and the
second-order correlation that gives coincidence rates on Bob's screen.

Field state modes are ordered ``(h_A, v_A, h_B, v_B)``: the ``|hv>`` pair
term carries Alice's photon in the h arm and Bob's in the v arm.

Phases are built as products of per-path factors rather than from summed
path lengths. Bob's two slit paths are split into a common mean and a
half-difference, so fringe contrast stays accurate even when the absolute
path constants are large.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .hilbert import BipartiteLayout, StateVector, normalize

EPSILON_MAX = 0.3


class GeometryWarning(UserWarning):
    """Configuration violates the slow-divergence interference condition."""


class ConfigError(ValueError):
    """Configuration file could not be parsed."""


class PathModel(str, Enum):
    EXACT = "exact"
    PARAXIAL = "paraxial"


class AliceSetting(str, Enum):
    FOCAL = "focal"
    OFFFOCAL_L = "offfocal_l"
    OFFFOCAL_M = "offfocal_m"
    OFFFOCAL_SUM = "offfocal_sum"


_LENGTHS = ("wavelength", "focal_length", "focal_offset", "source_to_slits",
            "slit_separation", "slit_width", "slits_to_screen", "screen_halfwidth")
_PATH_CONSTANTS = ("path_r_D", "path_r_K", "path_r_L", "path_r_M")


@dataclass(frozen=True)
class Geometry:
    """Lengths in metres, angles in radians.

    The path constants ``path_r_*`` only enter as phases, so they may be
    zero; only their differences are observable.
    """

    wavelength: float = 790e-9
    focal_length: float = 0.1
    focal_offset: float = 0.02
    source_to_slits: float = 1.0
    slit_separation: float = 200e-6
    slit_width: float = 20e-6
    slits_to_screen: float = 1.0
    beam_divergence: float = 1e-3
    path_r_D: float = 0.0
    path_r_K: float = 0.0
    path_r_L: float = 0.0
    path_r_M: float = 0.0
    screen_halfwidth: float = 5e-3
    n_bins: int = 201
    path_model: PathModel = PathModel.EXACT

    def __post_init__(self):
        object.__setattr__(self, "path_model", PathModel(self.path_model))
        for name in _LENGTHS:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite length, got {v!r}")
        for name in _PATH_CONSTANTS:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a non-negative finite length, got {v!r}")
        if not (math.isfinite(self.beam_divergence) and self.beam_divergence >= 0):
            raise ValueError("beam_divergence must be non-negative")
        if self.focal_offset >= self.focal_length:
            raise ValueError("focal_offset must be smaller than focal_length")
        if self.path_r_L != self.path_r_M:
            raise ValueError("path_r_L and path_r_M must be equal")
        if isinstance(self.n_bins, bool) or int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise ValueError(f"n_bins must be a positive integer, got {self.n_bins!r}")
        object.__setattr__(self, "n_bins", int(self.n_bins))
        if not self.interference_ok:
            warnings.warn(
                f"slit_width*beam_divergence = {self.slit_width * self.beam_divergence:.3g} m "
                f"is not below the wavelength {self.wavelength:.3g} m; "
                "fringes would wash out in a real beam",
                GeometryWarning, stacklevel=3)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def interference_ok(self) -> bool:
        return self.slit_width * self.beam_divergence < self.wavelength

    @property
    def fringe_period(self) -> float:
        """Paraxial fringe spacing on the screen."""
        return self.wavelength * self.slits_to_screen / self.slit_separation

    def z_grid(self) -> np.ndarray:
        if self.n_bins == 1:
            return np.zeros(1)
        return np.linspace(-self.screen_halfwidth, self.screen_halfwidth, self.n_bins)

    def replace(self, **changes) -> "Geometry":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["path_model"] = self.path_model.value
        return d

    def to_config(self) -> str:
        lines = [f"{k} = {_fmt(v)}" for k, v in self.as_dict().items()]
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.to_config().encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(Geometry)}


def parse_geometry(text: str, source: str = "<config>") -> Geometry:
    """Parse a flat ``key = value`` configuration.

    Unknown keys, duplicate keys and unparsable values raise ``ConfigError``.
    Out-of-range values raise the plain ``ValueError`` from ``Geometry``.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            if key == "n_bins":
                values[key] = int(val)
            elif key == "path_model":
                values[key] = PathModel(val)
            else:
                values[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {val!r}") from exc
    return Geometry(**values)


def load_geometry(path) -> Geometry:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_geometry(text, str(path))


# -- field state -------------------------------------------------------------

MODES = ("h_A", "v_A", "h_B", "v_B")
_OCCUPATION = {
    "vac": (0, 0, 0, 0),
    "hv": (1, 0, 0, 1),
    "vh": (0, 1, 1, 0),
}


@dataclass(frozen=True)
class SpdcState:
    """Vacuum plus one down-converted pair, left unnormalized.

    ``|Psi> = |vac> + eps (|hv> - |vh>)``. Truncating at one pair is exact
    for second-order correlations.
    """

    epsilon: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.epsilon < EPSILON_MAX):
            raise ValueError(f"epsilon must lie in (0, {EPSILON_MAX}), got {self.epsilon!r}")

    @property
    def vector(self) -> StateVector:
        e = self.epsilon
        return StateVector([1.0, e, -e], ("vac", "hv", "vh"))

    def fock(self) -> dict[tuple[int, ...], complex]:
        v = self.vector
        return {_OCCUPATION[l]: complex(a) for l, a in zip(v.basis_labels, v.amplitudes)}


@dataclass(frozen=True)
class FieldOperator:
    """Positive-frequency field ``coeff_h * h + coeff_v * v`` on one side."""

    coeff_h: complex
    coeff_v: complex
    description: str = ""

    def __post_init__(self):
        if self.coeff_h == 0 and self.coeff_v == 0:
            raise ValueError("field operator with both coefficients zero")


def _phase(k: float, r: float) -> complex:
    return complex(np.exp(1j * k * r))


def _split_paths(geo: Geometry, z: float) -> tuple[float, float]:
    """Return (mean, difference) of the two slit-to-screen paths."""
    L, a = geo.slits_to_screen, geo.slit_separation
    if geo.path_model is PathModel.PARAXIAL:
        return L, -z * a / L
    r1 = math.hypot(L, z - a / 2)
    r2 = math.hypot(L, z + a / 2)
    # r1^2 - r2^2 = -2 z a, so the difference needs no subtraction
    return 0.5 * (r1 + r2), -2.0 * z * a / (r1 + r2)


def _check_z(geo: Geometry, z: float) -> None:
    if abs(z) > geo.screen_halfwidth * (1 + 1e-12):
        raise ValueError(f"z = {z!r} m lies outside the screen (+-{geo.screen_halfwidth} m)")


def path_lengths(geo: Geometry, z: float) -> tuple[float, float]:
    """Distances from the upper and lower slit to screen position ``z``."""
    _check_z(geo, z)
    L, a = geo.slits_to_screen, geo.slit_separation
    if geo.path_model is PathModel.PARAXIAL:
        half = 0.5 * z * a / L
        return L - half, L + half
    return math.hypot(L, z - a / 2), math.hypot(L, z + a / 2)


def field_bob(geo: Geometry, z: float) -> FieldOperator:
    _check_z(geo, z)
    k = geo.wavenumber
    mean, diff = _split_paths(geo, z)
    common = _phase(k, geo.path_r_D) * _phase(k, mean)
    return FieldOperator(common * _phase(k, 0.5 * diff),
                         common * _phase(k, -0.5 * diff),
                         f"Bob screen z={z!r}")


def field_alice_offfocal(geo: Geometry, which: str) -> FieldOperator:
    k = geo.wavenumber
    if which == "l":
        return FieldOperator(0.0, _phase(k, geo.path_r_L), "Alice off-focal l")
    if which == "m":
        return FieldOperator(_phase(k, geo.path_r_M), 0.0, "Alice off-focal m")
    raise ValueError(f"off-focal point must be 'l' or 'm', got {which!r}")


def field_alice_focal(geo: Geometry) -> FieldOperator:
    c = _phase(geo.wavenumber, geo.path_r_K)
    return FieldOperator(c, c, "Alice focal k")


def _annihilate(state: dict, mode: int, coeff: complex) -> dict:
    out: dict = {}
    if coeff == 0:
        return out
    for occ, amp in state.items():
        n = occ[mode]
        if n == 0:
            continue
        lowered = occ[:mode] + (n - 1,) + occ[mode + 1:]
        out[lowered] = out.get(lowered, 0) + coeff * math.sqrt(n) * amp
    return out


def _apply_field(state: dict, f: FieldOperator, side: str) -> dict:
    h, v = (0, 1) if side == "A" else (2, 3)
    out = _annihilate(state, h, f.coeff_h)
    for occ, amp in _annihilate(state, v, f.coeff_v).items():
        out[occ] = out.get(occ, 0) + amp
    return out


def coincidence_rate(state: SpdcState, fa: FieldOperator, fb: FieldOperator) -> float:
    """``|<Psi| E_A E_B |Psi>|^2`` with Alice's field ``fa`` and Bob's ``fb``.

    No proportionality constant is applied, so rates come out in units
    of epsilon^2.
    """
    psi = state.fock()
    after = _apply_field(_apply_field(psi, fb, "B"), fa, "A")
    overlap = sum(np.conj(psi.get(occ, 0)) * amp for occ, amp in after.items())
    return float(abs(overlap) ** 2)


# -- patterns ---------------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    positions: np.ndarray
    values: np.ndarray
    normalization: str = "raw"
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        val = np.array(self.values, dtype=float)
        if pos.shape != val.shape or pos.ndim != 1:
            raise ValueError("positions and values must be 1-d and equally long")
        if np.any(val < 0):
            raise ValueError("pattern values must be non-negative")
        if self.normalization not in ("raw", "unit-integral"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        pos.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)

    def __len__(self):
        return self.values.size

    def integral(self) -> float:
        if self.values.size < 2:
            return float(self.values.sum())
        return float(np.trapezoid(self.values, self.positions))

    def unit_integral(self) -> "Pattern":
        total = self.integral()
        if not total > 0:
            raise ValueError("cannot normalize a pattern with zero integral")
        return Pattern(self.positions, self.values / total, "unit-integral", self.flags)


def _alice_field(geo: Geometry, alice: AliceSetting) -> list[FieldOperator]:
    if alice is AliceSetting.FOCAL:
        return [field_alice_focal(geo)]
    if alice is AliceSetting.OFFFOCAL_L:
        return [field_alice_offfocal(geo, "l")]
    if alice is AliceSetting.OFFFOCAL_M:
        return [field_alice_offfocal(geo, "m")]
    return [field_alice_offfocal(geo, "l"), field_alice_offfocal(geo, "m")]


def slit_envelope(geo: Geometry, z) -> np.ndarray:
    """Paraxial single-slit intensity envelope ``sinc^2``, peak 1 at z = 0.

    Not part of the two-mode rate formulas; applied only on request.
    """
    x = geo.slit_width * np.asarray(z, dtype=float) / (geo.wavelength * geo.slits_to_screen)
    return np.sinc(x) ** 2


def sweep_pattern(state: SpdcState, geo: Geometry, alice, envelope: bool = False) -> Pattern:
    """Coincidence rate at every screen bin for one of Alice's settings.

    ``offfocal_sum`` adds the l and m rates, which is what Bob's singles
    show when Alice measures off the focal plane.
    """
    alice = AliceSetting(alice)
    if geo.n_bins < 2:
        raise ValueError("a pattern sweep needs n_bins >= 2")
    z = geo.z_grid()
    fas = _alice_field(geo, alice)
    vals = np.array([sum(coincidence_rate(state, fa, field_bob(geo, zi)) for fa in fas)
                     for zi in z])
    if envelope:
        vals = vals * slit_envelope(geo, z)
    return Pattern(z, vals)


# -- Schroedinger-picture state ---------------------------------------------

ALICE_LABELS = ("H", "V")


def path_entangled_state(geo: Geometry | None = None, alice: str = "focal") -> StateVector:
    """Two-qubit path-entangled pair ``(|HV> - |VH>)/sqrt 2`` with path phases.

    Both terms travel the same total distance, so the phases are global;
    they are kept so that the state carries the configured geometry.
    """
    amps = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    if geo is not None:
        k = geo.wavenumber
        r_a = geo.path_r_K if alice == "focal" else geo.path_r_L
        amps = amps * _phase(k, r_a) * _phase(k, geo.path_r_D)
    return StateVector(amps, ("HH", "HV", "VH", "VV"))


def phase_evolved_state(geo: Geometry, alice: str, z_grid) -> StateVector:
    """Pair state propagated to Bob's screen, Alice's side left in {H, V}.

    ``sum_z |H z> e^{ik(r_A + r_D + r_2)} - |V z> e^{ik(r_A + r_D + r_1)}``,
    normalized, on a ``2 x len(z_grid)`` A-major layout.
    """
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=float))
    if z_grid.size == 0:
        raise ValueError("empty z grid")
    if alice not in ("focal", "offfocal"):
        raise ValueError(f"alice must be 'focal' or 'offfocal', got {alice!r}")
    k = geo.wavenumber
    r_a = geo.path_r_K if alice == "focal" else geo.path_r_L
    head = _phase(k, r_a) * _phase(k, geo.path_r_D)
    h_amp = np.empty(z_grid.size, dtype=complex)
    v_amp = np.empty(z_grid.size, dtype=complex)
    for i, z in enumerate(z_grid):
        _check_z(geo, z)
        mean, diff = _split_paths(geo, z)
        common = head * _phase(k, mean)
        h_amp[i] = common * _phase(k, -0.5 * diff)   # pairs with Bob's r_2 path
        v_amp[i] = -common * _phase(k, 0.5 * diff)   # pairs with Bob's r_1 path
    labels = tuple(f"{a}z{i}" for a in ALICE_LABELS for i in range(z_grid.size))
    return normalize(StateVector(np.concatenate([h_amp, v_amp]), labels))


def screen_layout(n_bins: int) -> BipartiteLayout:
    return BipartiteLayout(2, n_bins)
