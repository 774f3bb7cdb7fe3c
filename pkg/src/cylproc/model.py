"""Stationary Poisson cylinder process descriptions.

A process is fixed by the ambient dimension d, the flat dimension k of the
cylinder axes, the intensity (expected cylinders per unit (d-k)-volume of
position space), a directional law for the axes, and a base law for the
cross sections.  The directional law is stated on the vector identifying
the direction space: the axis direction when k = 1, the normal when
k = d - 1.  Base sets are centred so the circumcentre sits at the origin
of the canonical complement frame, and the base law does not depend on
the sampled direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .euclid import (
    NORM_TOL,
    ConvexPolygon,
    CrossSection,
    Direction,
    Disc,
    Segment,
    Subspace,
    _complement_frame,
)

__all__ = [
    "RadiusLaw",
    "Isotropic",
    "FixedAxes",
    "GirdleBand",
    "DeterministicBase",
    "DiscRadiusLaw",
    "MixtureBase",
    "ProcessSpec",
    "sample_shape",
    "mean_base_area",
    "mean_base_perimeter",
    "spec_to_dict",
    "spec_from_dict",
]


# ---------------------------------------------------------------------------
# radius law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusLaw:
    """Discrete law of a disc radius: atoms ((r_1, q_1), ...), q_i > 0, sum q_i = 1."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(r), float(q)) for r, q in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("radius law needs at least one atom")
        radii = [r for r, _ in atoms]
        if any(r < 0 for r in radii):
            raise ValueError("radii must be nonnegative")
        if len(set(radii)) != len(radii):
            raise ValueError("radii must be distinct")
        if any(q <= 0 for _, q in atoms):
            raise ValueError("weights must be positive")
        if abs(sum(q for _, q in atoms) - 1.0) > NORM_TOL:
            raise ValueError("weights must sum to 1 within 1e-12")

    @property
    def mean(self) -> float:
        return sum(r * q for r, q in self.atoms)

    @property
    def second_moment(self) -> float:
        return sum(r * r * q for r, q in self.atoms)

    @property
    def max_radius(self) -> float:
        return max(r for r, _ in self.atoms)

    @property
    def has_zero_atom(self) -> bool:
        return any(r == 0.0 for r, _ in self.atoms)


# ---------------------------------------------------------------------------
# directional distributions
# ---------------------------------------------------------------------------

def _canonicalize_rows(U: np.ndarray) -> np.ndarray:
    """Antipodal canonicalization, vectorized over rows."""
    sign = np.zeros(len(U))
    undecided = np.ones(len(U), dtype=bool)
    for j in range(U.shape[1]):
        col = U[:, j]
        pick = undecided & (np.abs(col) > NORM_TOL)
        sign[pick] = np.sign(col[pick])
        undecided[pick] = False
    sign[sign == 0.0] = 1.0
    return U * sign[:, None]


class Isotropic:
    """Haar-uniform directional law."""

    kind = "isotropic"

    def sample_vectors(self, d: int, rng: np.random.Generator, n: int) -> np.ndarray:
        if d == 2:
            phi = rng.uniform(0.0, math.pi, n)
            u = np.column_stack([np.cos(phi), np.sin(phi)])
        else:
            z = rng.uniform(-1.0, 1.0, n)
            phi = rng.uniform(0.0, 2.0 * math.pi, n)
            s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            u = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
        return _canonicalize_rows(u)

    def __eq__(self, other):
        return isinstance(other, Isotropic)

    def __hash__(self):
        return hash("Isotropic")

    def __repr__(self):
        return "Isotropic()"


class FixedAxes:
    """Discrete directional law on finitely many axes with positive weights."""

    kind = "fixed_axes"

    def __init__(self, axes):
        pairs = tuple((a if isinstance(a, Direction) else Direction(a), float(w)) for a, w in axes)
        if not pairs:
            raise ValueError("at least one axis required")
        dims = {a.dim for a, _ in pairs}
        if len(dims) != 1:
            raise ValueError("all axes must share one ambient dimension")
        if any(w <= 0 for _, w in pairs):
            raise ValueError("weights must be positive")
        if abs(sum(w for _, w in pairs) - 1.0) > NORM_TOL:
            raise ValueError("weights must sum to 1 within 1e-12")
        self.axes = pairs

    @property
    def dim(self) -> int:
        return self.axes[0][0].dim

    def sample_vectors(self, d: int, rng: np.random.Generator, n: int) -> np.ndarray:
        if d != self.dim:
            raise ValueError("dimension mismatch")
        weights = np.array([w for _, w in self.axes])
        idx = rng.choice(len(self.axes), size=n, p=weights)
        vecs = np.array([a.vec for a, _ in self.axes])
        return vecs[idx]

    def __repr__(self):
        return f"FixedAxes({[(a.vec.tolist(), w) for a, w in self.axes]})"


class GirdleBand:
    """Directions within latitude delta of the great circle orthogonal to ``axis``.

    Every sampled vector u satisfies |<u, axis>| <= sin(delta); the law is
    the Haar measure restricted to that band.
    """

    kind = "girdle"

    def __init__(self, axis, delta: float):
        self.axis = axis if isinstance(axis, Direction) else Direction(axis)
        if not 0.0 < delta <= 0.5 * math.pi:
            raise ValueError("band half-width delta must lie in (0, pi/2]")
        self.delta = float(delta)

    def sample_vectors(self, d: int, rng: np.random.Generator, n: int) -> np.ndarray:
        if d != self.axis.dim:
            raise ValueError("dimension mismatch")
        if d == 2:
            # angle to the axis within [pi/2 - delta, pi/2 + delta]
            psi = rng.uniform(0.5 * math.pi - self.delta, 0.5 * math.pi + self.delta, n)
            ax = self.axis.vec
            base = math.atan2(ax[1], ax[0])
            u = np.column_stack([np.cos(base + psi), np.sin(base + psi)])
        else:
            s = math.sin(self.delta)
            z = rng.uniform(-s, s, n)
            phi = rng.uniform(0.0, 2.0 * math.pi, n)
            f = _complement_frame(self.axis.vec[:, None])  # 3 x 2 frame of the girdle plane
            rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            u = (
                z[:, None] * self.axis.vec[None, :]
                + rad[:, None] * (np.cos(phi)[:, None] * f[:, 0] + np.sin(phi)[:, None] * f[:, 1])
            )
        return _canonicalize_rows(u)

    def __repr__(self):
        return f"GirdleBand(axis={self.axis.vec.tolist()}, delta={self.delta})"


DirectionalDistribution = Isotropic | FixedAxes | GirdleBand


# ---------------------------------------------------------------------------
# base distributions
# ---------------------------------------------------------------------------

class DeterministicBase:
    """Every cylinder carries the same cross section."""

    kind = "deterministic"

    def __init__(self, shape: CrossSection):
        self.shape = shape

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def mean_area(self) -> float:
        return self.shape.area

    @property
    def mean_boundary(self) -> float:
        return self.shape.boundary

    @property
    def max_circumradius(self) -> float:
        return self.shape.circumradius

    @property
    def has_zero_mass(self) -> bool:
        return False

    def atoms(self):
        return ((self.shape, 1.0),)

    def sample_shapes(self, rng: np.random.Generator, n: int):
        return [self.shape] * n

    def __repr__(self):
        return f"DeterministicBase({self.shape!r})"


class DiscRadiusLaw:
    """Disc bases whose radius follows a discrete law (atoms at radius 0 allowed).

    A radius-0 atom describes a cylinder that degenerates to its axis; it
    contributes nothing to volume but keeps its weight in the radius
    moments, which is exactly how the surface budget of the design problem
    accounts for it.
    """

    kind = "disc_radius_law"
    dim = 2

    def __init__(self, law: RadiusLaw):
        self.law = law
        self._shapes = tuple(Disc(r) if r > 0 else None for r, _ in law.atoms)
        self._weights = np.array([q for _, q in law.atoms])

    @property
    def mean_area(self) -> float:
        return math.pi * self.law.second_moment

    @property
    def mean_boundary(self) -> float:
        return 2.0 * math.pi * self.law.mean

    @property
    def max_circumradius(self) -> float:
        return self.law.max_radius

    @property
    def has_zero_mass(self) -> bool:
        return self.law.has_zero_atom

    def atoms(self):
        return tuple(zip(self._shapes, self._weights.tolist()))

    def sample_shapes(self, rng: np.random.Generator, n: int):
        idx = rng.choice(len(self._shapes), size=n, p=self._weights)
        return [self._shapes[i] for i in idx]

    def __repr__(self):
        return f"DiscRadiusLaw({self.law.atoms})"


class MixtureBase:
    """Finite mixture of fixed cross sections."""

    kind = "mixture"

    def __init__(self, components):
        comps = tuple((shape, float(w)) for shape, w in components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        dims = {shape.dim for shape, _ in comps}
        if len(dims) != 1:
            raise ValueError("mixture components must share one dimension")
        if any(w <= 0 for _, w in comps):
            raise ValueError("weights must be positive")
        if abs(sum(w for _, w in comps) - 1.0) > NORM_TOL:
            raise ValueError("weights must sum to 1 within 1e-12")
        self.components = comps
        self._weights = np.array([w for _, w in comps])

    @property
    def dim(self) -> int:
        return self.components[0][0].dim

    @property
    def mean_area(self) -> float:
        return sum(shape.area * w for shape, w in self.components)

    @property
    def mean_boundary(self) -> float:
        return sum(shape.boundary * w for shape, w in self.components)

    @property
    def max_circumradius(self) -> float:
        return max(shape.circumradius for shape, _ in self.components)

    @property
    def has_zero_mass(self) -> bool:
        return False

    def atoms(self):
        return self.components

    def sample_shapes(self, rng: np.random.Generator, n: int):
        idx = rng.choice(len(self.components), size=n, p=self._weights)
        return [self.components[i][0] for i in idx]

    def __repr__(self):
        return f"MixtureBase({self.components!r})"


BaseDistribution = DeterministicBase | DiscRadiusLaw | MixtureBase


# ---------------------------------------------------------------------------
# process spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessSpec:
    """A stationary Poisson cylinder process in R^d.

    intensity is the expected number of cylinders per unit (d-k)-volume of
    the position space.  alpha is the law of the identifying direction
    (axis for k = 1, normal for k = d - 1); base is the cross-section law
    in the canonical complement frame.
    """

    d: int
    k: int
    intensity: float
    alpha: DirectionalDistribution
    base: BaseDistribution

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("ambient dimension must be 2 or 3")
        if self.k not in (1, self.d - 1) or self.k >= self.d:
            raise ValueError("flat dimension must be 1 or d-1 and below d")
        if not (isinstance(self.intensity, (int, float)) and self.intensity >= 0 and math.isfinite(self.intensity)):
            raise ValueError("intensity must be a finite nonnegative number")
        m = self.d - self.k
        if self.base.dim != m:
            raise ValueError(f"base dimension {self.base.dim} does not match d-k = {m}")
        for shape, _ in self.base.atoms():
            if m == 1 and not (shape is None or isinstance(shape, Segment)):
                raise ValueError("bases must be segments when the complement is one-dimensional")
            if m == 2 and isinstance(shape, Segment):
                raise ValueError("segment bases need a one-dimensional complement")
        if isinstance(self.alpha, (FixedAxes, GirdleBand)):
            adim = self.alpha.dim if isinstance(self.alpha, FixedAxes) else self.alpha.axis.dim
            if adim != self.d:
                raise ValueError("directional law lives in the wrong dimension")

    def subspace_for(self, vec) -> Subspace:
        """Direction space determined by one sampled direction vector."""
        direction = vec if isinstance(vec, Direction) else Direction(vec)
        if self.k == 1:
            return Subspace.line(direction)
        return Subspace.plane_with_normal(direction)

    def require_positive_volume(self):
        """Enforce the standing assumption 0 < volume fraction < 1."""
        lam_a = self.intensity * self.base.mean_area
        if not lam_a > 0:
            raise ValueError("process is degenerate: intensity * mean base volume must be positive")


def mean_base_area(spec: ProcessSpec) -> float:
    """Exact mean cross-section volume under the base law."""
    return spec.base.mean_area


def mean_base_perimeter(spec: ProcessSpec) -> float:
    """Exact mean cross-section boundary measure under the base law.

    For disc bases in R^3 this is the mean perimeter 2 pi E[R]; for segment
    bases it is the two-endpoint counting measure, i.e. exactly 2.
    """
    return spec.base.mean_boundary


def sample_shape(spec: ProcessSpec, rng: np.random.Generator):
    """Draw one (direction space, cross section) pair from the shape law.

    The cross section is None when the base law puts mass on radius zero
    and that atom is drawn.
    """
    vec = spec.alpha.sample_vectors(spec.d, rng, 1)[0]
    shape = spec.base.sample_shapes(rng, 1)[0]
    return spec.subspace_for(vec), shape


# ---------------------------------------------------------------------------
# JSON-facing serialization (schema shared with the command line front end)
# ---------------------------------------------------------------------------

def _shape_to_dict(shape) -> dict:
    if isinstance(shape, Segment):
        return {"type": "segment", "half_length": shape.half_length}
    if isinstance(shape, Disc):
        return {"type": "disc", "radius": shape.radius}
    if isinstance(shape, ConvexPolygon):
        return {"type": "polygon", "vertices": shape.vertices.tolist()}
    raise TypeError(f"unknown shape {shape!r}")


def _shape_from_dict(doc: dict, path: str):
    kind = _take(doc, "type", path)
    if kind == "segment":
        out = Segment(_take(doc, "half_length", path))
    elif kind == "disc":
        out = Disc(_take(doc, "radius", path))
    elif kind == "polygon":
        out = ConvexPolygon(_take(doc, "vertices", path))
    else:
        raise ValueError(f"{path}.type: unknown shape type {kind!r}")
    _reject_unknown(doc, path)
    return out


def _take(doc: dict, key: str, path: str):
    if key not in doc:
        raise ValueError(f"{path}: missing required field '{key}'")
    return doc.pop(key)

def _reject_unknown(doc: dict, path: str):
    if doc:
        raise ValueError(f"{path}: unknown field '{sorted(doc)[0]}'")


def spec_to_dict(spec: ProcessSpec) -> dict:
    if isinstance(spec.alpha, Isotropic):
        alpha = {"type": "isotropic"}
    elif isinstance(spec.alpha, FixedAxes):
        alpha = {"type": "fixed_axes", "axes": [{"direction": a.vec.tolist(), "weight": w} for a, w in spec.alpha.axes]}
    else:
        alpha = {"type": "girdle", "axis": spec.alpha.axis.vec.tolist(), "delta": spec.alpha.delta}
    if isinstance(spec.base, DeterministicBase):
        base = _shape_to_dict(spec.base.shape)
    elif isinstance(spec.base, DiscRadiusLaw):
        base = {"type": "disc_radius_law", "atoms": [[r, q] for r, q in spec.base.law.atoms]}
    else:
        base = {
            "type": "mixture",
            "components": [{"weight": w, "shape": _shape_to_dict(s)} for s, w in spec.base.components],
        }
    return {"d": spec.d, "k": spec.k, "lambda": spec.intensity, "alpha": alpha, "base": base}


def spec_from_dict(doc: dict, path: str = "spec") -> ProcessSpec:
    """Parse a spec document, rejecting unknown fields with their paths."""
    doc = dict(doc)
    d = _take(doc, "d", path)
    k = _take(doc, "k", path)
    lam = _take(doc, "lambda", path)
    alpha_doc = dict(_take(doc, "alpha", path))
    base_doc = dict(_take(doc, "base", path))
    _reject_unknown(doc, path)

    akind = _take(alpha_doc, "type", f"{path}.alpha")
    if akind == "isotropic":
        alpha = Isotropic()
    elif akind == "fixed_axes":
        axes_doc = _take(alpha_doc, "axes", f"{path}.alpha")
        axes = []
        for i, ax in enumerate(axes_doc):
            ax = dict(ax)
            axes.append((Direction(_take(ax, "direction", f"{path}.alpha.axes[{i}]")),
                         _take(ax, "weight", f"{path}.alpha.axes[{i}]")))
            _reject_unknown(ax, f"{path}.alpha.axes[{i}]")
        alpha = FixedAxes(axes)
    elif akind == "girdle":
        alpha = GirdleBand(Direction(_take(alpha_doc, "axis", f"{path}.alpha")),
                           _take(alpha_doc, "delta", f"{path}.alpha"))
    else:
        raise ValueError(f"{path}.alpha.type: unknown directional law {akind!r}")
    _reject_unknown(alpha_doc, f"{path}.alpha")

    bkind = base_doc.get("type")
    if bkind in ("segment", "disc", "polygon"):
        base = DeterministicBase(_shape_from_dict(base_doc, f"{path}.base"))
    elif bkind == "disc_radius_law":
        base_doc.pop("type")
        atoms = _take(base_doc, "atoms", f"{path}.base")
        _reject_unknown(base_doc, f"{path}.base")
        base = DiscRadiusLaw(RadiusLaw(tuple((float(r), float(q)) for r, q in atoms)))
    elif bkind == "mixture":
        base_doc.pop("type")
        comp_doc = _take(base_doc, "components", f"{path}.base")
        _reject_unknown(base_doc, f"{path}.base")
        comps = []
        for i, comp in enumerate(comp_doc):
            comp = dict(comp)
            w = _take(comp, "weight", f"{path}.base.components[{i}]")
            shape = _shape_from_dict(dict(_take(comp, "shape", f"{path}.base.components[{i}]")),
                                     f"{path}.base.components[{i}].shape")
            _reject_unknown(comp, f"{path}.base.components[{i}]")
            comps.append((shape, w))
        base = MixtureBase(comps)
    else:
        raise ValueError(f"{path}.base.type: unknown base law {bkind!r}")

    return ProcessSpec(d=int(d), k=int(k), intensity=float(lam), alpha=alpha, base=base)
