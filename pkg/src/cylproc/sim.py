"""Exact sampling of the union set inside a bounded window, with queries.

A realization holds every cylinder of the process that hits the window,
obtained by superset-then-reject sampling: offsets are drawn on a disc (or
interval) of radius R_W + r_max in the position space, which covers the
hitting set of every shape in the base support, so the retained cylinders
are an exact sample.  Membership anywhere in the window is therefore
exact; distances are exact up to the erosion margin used by the callers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .euclid import (
    GEOM_TOL,
    ConvexPolygon,
    Direction,
    Disc,
    Segment,
    Subspace,
    convex_distance,
    convex_hull_ccw,
    convex_overlap,
)
from .model import ProcessSpec
from .rng import philox_stream

_TANGENT_TOL = 1e-12  # quadratic discriminants below this give no interval


# ---------------------------------------------------------------------------
# window
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Axis-aligned box [lo, hi] in R^2 or R^3."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lo)
        hi = tuple(float(x) for x in self.hi)
        if len(lo) != len(hi) or len(lo) not in (2, 3):
            raise ValueError("window must be a box in R^2 or R^3")
        if not all(h > l for l, h in zip(lo, hi)):
            raise ValueError("window must have positive extent in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lo) + np.array(self.hi))

    @property
    def circumradius(self) -> float:
        return 0.5 * float(np.linalg.norm(np.array(self.hi) - np.array(self.lo)))

    @property
    def min_side(self) -> float:
        return float(np.min(np.array(self.hi) - np.array(self.lo)))

    @property
    def volume(self) -> float:
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))

    @property
    def corners(self) -> np.ndarray:
        axes = [(l, h) for l, h in zip(self.lo, self.hi)]
        pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(self.dim, -1).T
        return pts

    def erode(self, margin) -> "Window":
        m = np.broadcast_to(np.asarray(margin, dtype=float), (self.dim,))
        lo = tuple(l + x for l, x in zip(self.lo, m))
        hi = tuple(h - x for h, x in zip(self.hi, m))
        return Window(lo, hi)

    def erode_for_lag(self, h) -> "Window":
        """Points x with both x and x + h inside the window."""
        h = np.asarray(h, dtype=float)
        lo = tuple(l + max(-x, 0.0) for l, x in zip(self.lo, h))
        hi = tuple(u - max(x, 0.0) for u, x in zip(self.hi, h))
        return Window(lo, hi)

    def uniform_points(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def contains_points(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.all((x >= np.array(self.lo) - GEOM_TOL) & (x <= np.array(self.hi) + GEOM_TOL), axis=1)


# ---------------------------------------------------------------------------
# placed cylinders and realizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlacedCylinder:
    """One cylinder: {y : Pr_L(y) in K + offset}, offset in the frame of L-perp."""

    subspace: Subspace
    base: object
    offset: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset, dtype=float).copy()
        off.flags.writeable = False
        object.__setattr__(self, "offset", off)

    @property
    def axis_vector(self) -> np.ndarray:
        """Identifying direction: axis for line cylinders, normal for slabs."""
        if self.subspace.dim == 1:
            return self.subspace.basis[:, 0]
        return self.subspace.frame[:, 0]


@dataclass(frozen=True)
class Realization:
    """All cylinders of one sample hitting the window; immutable, query-safe."""

    spec: ProcessSpec
    window: Window
    cylinders: tuple
    seed: int
    stream: int = 0

    def n_cylinders(self) -> int:
        return len(self.cylinders)


def sample_realization(spec: ProcessSpec, window: Window, seed: int, stream: int = 0) -> Realization:
    """Exact sample of the cylinders hitting the window.

    Draws a Poisson number of candidates on the covering disc/interval of
    radius R_W + r_max in position space and keeps exactly those hitting
    the window.  Radius-zero atoms of the base law carry no volume and are
    dropped; distance-based queries reject such realizations (see
    :func:`distance_to_union`).
    """
    if spec.d != window.dim:
        raise ValueError("spec and window dimensions differ")
    r_max = spec.base.max_circumradius
    if not math.isfinite(r_max):
        raise ValueError("base law must have bounded circumradius")
    rng = philox_stream(seed, stream)
    m = spec.d - spec.k
    rho = window.circumradius + r_max
    measure = 2.0 * rho if m == 1 else math.pi * rho * rho
    n = int(rng.poisson(spec.intensity * measure)) if spec.intensity > 0 else 0

    cylinders = []
    if n > 0:
        dirs = spec.alpha.sample_vectors(spec.d, rng, n)
        shapes = spec.base.sample_shapes(rng, n)
        if m == 1:
            offs = rng.uniform(-rho, rho, n)[:, None]
        else:
            rad = rho * np.sqrt(rng.uniform(0.0, 1.0, n))
            ang = rng.uniform(0.0, 2.0 * math.pi, n)
            offs = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        centre = window.center
        corners = window.corners
        for i in range(n):
            shape = shapes[i]
            if shape is None:
                continue
            L = spec.subspace_for(dirs[i])
            off = L.complement_coords(centre) + offs[i]
            if _hits_window(L, shape, off, corners):
                cylinders.append(PlacedCylinder(L, shape, off))
    return Realization(spec=spec, window=window, cylinders=tuple(cylinders), seed=seed, stream=stream)


def _hits_window(L: Subspace, shape, off: np.ndarray, corners: np.ndarray) -> bool:
    proj = corners @ L.frame
    if L.codim == 1:
        lo, hi = float(np.min(proj)), float(np.max(proj))
        a = shape.half_length
        return off[0] + a >= lo - GEOM_TOL and off[0] - a <= hi + GEOM_TOL
    shadow = convex_hull_ccw(proj)
    if isinstance(shape, Disc):
        return convex_distance(shadow, off) <= shape.radius + GEOM_TOL
    return convex_overlap(shadow, shape.vertices + off)


# ---------------------------------------------------------------------------
# point queries
# ---------------------------------------------------------------------------

def covered_mask(real: Realization, points: np.ndarray) -> np.ndarray:
    """Membership of each point in the union set (no window check; bulk path)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(len(pts), dtype=bool)
    for cyl in real.cylinders:
        u = pts @ cyl.subspace.frame - cyl.offset
        out |= cyl.base.contains(u)
    return out


def contains(real: Realization, x) -> bool:
    """Exact membership of a single point of the window in the union set."""
    x = np.asarray(x, dtype=float)
    if not real.window.contains_points(x)[0]:
        raise ValueError("membership is only guaranteed inside the window")
    return bool(covered_mask(real, x[None, :])[0])


def distance_mask(real: Realization, points: np.ndarray) -> np.ndarray:
    """Distance from each point to the stored union (inf when empty; bulk path)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.full(len(pts), np.inf)
    for cyl in real.cylinders:
        u = pts @ cyl.subspace.frame - cyl.offset
        out = np.minimum(out, cyl.base.distance(u))
    return out


def distance_to_union(real: Realization, x, cap: float | None = None) -> float:
    """Euclidean distance from a window point to the union set.

    Exact for distances up to the erosion margin of the query point: a
    cylinder within distance r of x intersects the ball B(x, r), so it hits
    the window whenever that ball does.  ``cap`` censors the value at the
    given radius (the caller's guarantee horizon); distances beyond it are
    reported as the cap itself.  Realizations of base laws with radius-zero
    atoms are rejected because their axis lines are thinned out of the
    sample yet would be sensed by distance queries.
    """
    if real.spec.base.has_zero_mass:
        raise ValueError("distance queries are unsupported for base laws with "
                         "radius-zero atoms (their axis lines are not materialized)")
    x = np.asarray(x, dtype=float)
    if not real.window.contains_points(x)[0]:
        raise ValueError("distance queries must start inside the window")
    dist = float(distance_mask(real, x[None, :])[0])
    return dist if cap is None else min(dist, float(cap))


# ---------------------------------------------------------------------------
# ray queries
# ---------------------------------------------------------------------------

def _cylinder_ray_interval(cyl: PlacedCylinder, u0: np.ndarray, w: np.ndarray, length: float):
    """Intersection of {u0 + t w, t in [0, length]} with the base, in frame coords."""
    base = cyl.base
    if isinstance(base, Segment):
        a = base.half_length
        w0, p0 = float(w[0]), float(u0[0])
        if abs(w0) <= _TANGENT_TOL:
            return (0.0, length) if abs(p0) <= a else None
        t1, t2 = (-a - p0) / w0, (a - p0) / w0
        lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
    elif isinstance(base, Disc):
        a = base.radius
        ww = float(w @ w)
        if ww <= _TANGENT_TOL**2:
            return (0.0, length) if float(u0 @ u0) <= a * a else None
        b = float(u0 @ w)
        c = float(u0 @ u0) - a * a
        disc = b * b - ww * c
        if disc <= _TANGENT_TOL:
            return None
        root = math.sqrt(disc)
        lo, hi = (-b - root) / ww, (-b + root) / ww
    else:
        lo, hi = -np.inf, np.inf
        E = np.roll(base.vertices, -1, axis=0) - base.vertices
        normals = np.column_stack([E[:, 1], -E[:, 0]])
        for n_e, q in zip(normals, base.vertices):
            denom = float(n_e @ w)
            num = float(n_e @ (q - u0))
            if abs(denom) < _TANGENT_TOL:
                if num < -GEOM_TOL:
                    return None
                continue
            t = num / denom
            if denom > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
            if lo >= hi:
                return None
    lo, hi = max(lo, 0.0), min(hi, length)
    return (lo, hi) if hi - lo > 0.0 else None


def ray_intervals(real: Realization, origin, direction, length: float):
    """Sorted disjoint [t_in, t_out] intervals of the ray inside the union set.

    The probe segment {origin + t*direction, t in [0, length]} must stay in
    the window.  Tangential grazes produce no interval.
    """
    origin = np.asarray(origin, dtype=float)
    d_vec = direction.vec if isinstance(direction, Direction) else np.asarray(direction, dtype=float)
    n = float(np.linalg.norm(d_vec))
    if abs(n - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    endpoint = origin + length * d_vec
    inside = real.window.contains_points(np.stack([origin, endpoint]))
    if not bool(np.all(inside)):
        raise ValueError("the probe segment must stay inside the window")
    raw = []
    for cyl in real.cylinders:
        frame = cyl.subspace.frame
        seg = _cylinder_ray_interval(cyl, origin @ frame - cyl.offset, d_vec @ frame, length)
        if seg is not None:
            raw.append(seg)
    raw.sort()
    merged = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + _TANGENT_TOL:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def ray_interval_bulk(real: Realization, origins: np.ndarray, dirs: np.ndarray, length: float):
    """Per-cylinder clipped intervals for many probe segments at once.

    Returns flat arrays (ray_id, t_in, t_out) with t clipped to [0, length];
    an interval whose unclipped entry lies before 0 is reported with
    t_in == 0, which marks a component straddling the segment start.
    """
    ids_all, tin_all, tout_all = [], [], []
    n = len(origins)
    for cyl in real.cylinders:
        frame = cyl.subspace.frame
        u0 = origins @ frame - cyl.offset
        w = dirs @ frame
        base = cyl.base
        if isinstance(base, Segment):
            a = base.half_length
            w0, p0 = w[:, 0], u0[:, 0]
            par = np.abs(w0) <= _TANGENT_TOL
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (-a - p0) / w0
                t2 = (a - p0) / w0
            lo = np.minimum(t1, t2)
            hi = np.maximum(t1, t2)
            lo[par] = 0.0
            hi[par] = np.where(np.abs(p0[par]) <= a, length, -1.0)
        elif isinstance(base, Disc):
            a = base.radius
            ww = np.einsum("ij,ij->i", w, w)
            b = np.einsum("ij,ij->i", u0, w)
            c = np.einsum("ij,ij->i", u0, u0) - a * a
            par = ww <= _TANGENT_TOL**2
            disc = b * b - ww * c
            with np.errstate(divide="ignore", invalid="ignore"):
                root = np.sqrt(np.maximum(disc, 0.0))
                lo = (-b - root) / ww
                hi = (-b + root) / ww
            miss = disc <= _TANGENT_TOL
            lo[miss] = 0.0
            hi[miss] = -1.0
            lo[par] = 0.0
            hi[par] = np.where(c[par] <= 0.0, length, -1.0)
        else:
            E = np.roll(base.vertices, -1, axis=0) - base.vertices
            normals = np.column_stack([E[:, 1], -E[:, 0]])
            lo = np.full(n, -np.inf)
            hi = np.full(n, np.inf)
            ok = np.ones(n, dtype=bool)
            for n_e, q in zip(normals, base.vertices):
                denom = w @ n_e
                num = (q - u0) @ n_e
                par = np.abs(denom) < _TANGENT_TOL
                ok &= ~par | (num >= -GEOM_TOL)
                with np.errstate(divide="ignore", invalid="ignore"):
                    t = num / denom
                upper = denom > 0
                lower = (~par) & (~upper)
                hi = np.where(upper, np.minimum(hi, t), hi)
                lo = np.where(lower, np.maximum(lo, t), lo)
            bad = ~ok
            lo[bad] = 0.0
            hi[bad] = -1.0
        lo = np.maximum(lo, 0.0)
        hi = np.minimum(hi, length)
        keep = hi - lo > 0.0
        if np.any(keep):
            ids_all.append(np.nonzero(keep)[0])
            tin_all.append(lo[keep])
            tout_all.append(hi[keep])
    if not ids_all:
        empty = np.empty(0)
        return np.empty(0, dtype=np.int64), empty, empty
    return (
        np.concatenate(ids_all).astype(np.int64),
        np.concatenate(tin_all),
        np.concatenate(tout_all),
    )


def count_component_entries(ids, tins, touts, length: float) -> int:
    """Number of merged-component entry points strictly inside the probes.

    Probes are independent segments [0, length] indexed by ``ids``.  Each
    connected component of the union along a probe is counted through its
    entry endpoint; components straddling the probe start (t_in == 0) are
    dropped.
    """
    if len(ids) == 0:
        return 0
    shift = length * 1.25 + 1.0
    u = tins + ids * shift
    v = touts + ids * shift
    order = np.argsort(u, kind="stable")
    u, v, tin_sorted = u[order], v[order], tins[order]
    run = np.maximum.accumulate(v)
    prev = np.concatenate(([-np.inf], run[:-1]))
    starts = u > prev + _TANGENT_TOL
    return int(np.count_nonzero(starts & (tin_sorted > 1e-9)))


def covered_length(ids, tins, touts, length: float) -> float:
    """Total length of the union of intervals across all probes."""
    if len(ids) == 0:
        return 0.0
    shift = length * 1.25 + 1.0
    u = tins + ids * shift
    v = touts + ids * shift
    order = np.argsort(u, kind="stable")
    u, v = u[order], v[order]
    total = 0.0
    cur_lo, cur_hi = u[0], v[0]
    for lo, hi in zip(u[1:], v[1:]):
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)


def first_entry_times(real: Realization, origins: np.ndarray, direction_vec: np.ndarray, length: float):
    """Earliest hitting parameter per probe ray (inf when the ray misses)."""
    n = len(origins)
    dirs = np.broadcast_to(direction_vec, (n, real.spec.d))
    ids, tins, _ = ray_interval_bulk(real, origins, dirs, length)
    out = np.full(n, np.inf)
    np.minimum.at(out, ids, tins)
    return out


# ---------------------------------------------------------------------------
# CSV export / import
# ---------------------------------------------------------------------------

def export_realization_csv(real: Realization, path) -> None:
    """Write cylinders as CSV.

    Header: cyl_id, axis components, offset coordinates in the canonical
    complement frame, shape tag, then shape parameters (half-length or
    radius, or the flattened polygon vertex list).  2-D realizations drop
    the z and v columns.
    """
    d = real.spec.d
    m = d - real.spec.k
    axis_cols = ["axis_x", "axis_y"] + (["axis_z"] if d == 3 else [])
    off_cols = ["offset_u"] + (["offset_v"] if d == 3 else [])
    max_params = 1
    for cyl in real.cylinders:
        if isinstance(cyl.base, ConvexPolygon):
            max_params = max(max_params, 2 * len(cyl.base.vertices))
    header = ["cyl_id", *axis_cols, *off_cols, "shape"] + [f"param{i}" for i in range(max_params)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, cyl in enumerate(real.cylinders):
            axis = [f"{x:.17g}" for x in cyl.axis_vector]
            offs = [f"{x:.17g}" for x in cyl.offset]
            if d == 3 and m == 1:
                offs = offs + [""]
            if isinstance(cyl.base, Segment):
                tag, params = "segment", [f"{cyl.base.half_length:.17g}"]
            elif isinstance(cyl.base, Disc):
                tag, params = "disc", [f"{cyl.base.radius:.17g}"]
            else:
                tag = "polygon"
                params = [f"{x:.17g}" for x in cyl.base.vertices.reshape(-1)]
            params += [""] * (max_params - len(params))
            writer.writerow([i, *axis, *offs, tag, *params])


def import_realization_csv(path, spec: ProcessSpec, window: Window, seed: int = 0, stream: int = 0) -> Realization:
    """Rebuild a realization from :func:`export_realization_csv` output."""
    cylinders = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = 3 if "axis_z" in header else 2
        if d != spec.d:
            raise ValueError("CSV dimension does not match the spec")
        for row in reader:
            vals = dict(zip(header, row))
            axis = [float(vals["axis_x"]), float(vals["axis_y"])]
            if d == 3:
                axis.append(float(vals["axis_z"]))
            offs = [float(vals["offset_u"])]
            if d == 3 and vals.get("offset_v", ""):
                offs.append(float(vals["offset_v"]))
            params = []
            for i in range(len(header)):
                key = f"param{i}"
                if key in vals and vals[key] != "":
                    params.append(float(vals[key]))
            tag = vals["shape"]
            if tag == "segment":
                base = Segment(params[0])
            elif tag == "disc":
                base = Disc(params[0])
            elif tag == "polygon":
                base = ConvexPolygon(np.asarray(params).reshape(-1, 2))
            else:
                raise ValueError(f"unknown shape tag {tag!r}")
            L = spec.subspace_for(Direction(axis))
            cylinders.append(PlacedCylinder(L, base, np.asarray(offs)))
    return Realization(spec=spec, window=window, cylinders=tuple(cylinders), seed=seed, stream=stream)
