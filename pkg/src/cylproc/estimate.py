"""Monte Carlo estimators for every analytic characteristic.

Each estimator runs independent replicates (fresh realization per
replicate, one random stream per replicate) and reports the mean of the
replicate values together with the standard error across replicates.
Points inside one realization are dependent, so replicate-level resampling
is the honest uncertainty for z-tests against the analytic values.

Streams are addressed as (seed, 2*rep) for the realization and
(seed, 2*rep + 1) for the query randomness, so results depend only on
(seed, replicate index), never on worker count or scheduling order.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic
from .euclid import Direction, ball_constants
from .model import ProcessSpec
from .rng import philox_stream
from .sim import (
    Realization,
    Window,
    count_component_entries,
    covered_mask,
    distance_mask,
    first_entry_times,
    ray_interval_bulk,
    sample_realization,
)

DEFAULT_LAG_FRACTION = 0.25  # lags and probe radii are capped at this fraction of the min side

__all__ = [
    "EstimateReport",
    "est_volume_fraction",
    "est_covariance",
    "est_spherical_cdf",
    "est_linear_cdf",
    "est_specific_surface_linescan",
    "est_specific_surface_covderiv",
    "reports_to_csv",
    "reports_to_json",
]


@dataclass(frozen=True)
class EstimateReport:
    name: str
    estimate: float
    std_error: float
    n_samples: int
    n_replicates: int
    seed: int
    analytic: float | None = None
    z_score: float | None = None

    @staticmethod
    def from_replicates(name, values, n_samples, seed, analytic=None) -> "EstimateReport":
        values = np.asarray(values, dtype=float)
        n = len(values)
        est = float(np.mean(values))
        se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        z = None
        if analytic is not None:
            diff = est - analytic
            z = diff / se if se > 0 else (0.0 if diff == 0.0 else math.copysign(math.inf, diff))
        return EstimateReport(name, est, se, int(n_samples), n, int(seed), analytic, z)


def _run_replicates(n_reps: int, fn, workers: int):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(fn, range(n_reps)))
    else:
        values = [fn(r) for r in range(n_reps)]
    return np.asarray(values, dtype=float)


def _rep_streams(spec, window, seed, rep):
    real = sample_realization(spec, window, seed, stream=2 * rep)
    gen = philox_stream(seed, 2 * rep + 1)
    return real, gen


# ---------------------------------------------------------------------------
# volume fraction and covariance
# ---------------------------------------------------------------------------

def est_volume_fraction(spec: ProcessSpec, window: Window, n_points: int, n_reps: int,
                        seed: int, workers: int = 1) -> EstimateReport:
    """Fraction of uniform window points covered by the union set."""

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        pts = window.uniform_points(gen, n_points)
        return float(np.mean(covered_mask(real, pts)))

    values = _run_replicates(n_reps, one, workers)
    return EstimateReport.from_replicates(
        "volume_fraction", values, n_points * n_reps, seed, analytic=analytic.volume_fraction(spec)
    )


def est_covariance(spec: ProcessSpec, window: Window, lags, n_points: int, n_reps: int,
                   seed: int, workers: int = 1) -> list[EstimateReport]:
    """Two-point coverage frequency at each lag, on the lag-eroded window."""
    lags = [np.asarray(h, dtype=float) for h in lags]
    cap = DEFAULT_LAG_FRACTION * window.min_side
    for h in lags:
        if float(np.linalg.norm(h)) >= cap:
            raise ValueError(f"lag {h} exceeds the {DEFAULT_LAG_FRACTION:g} * min-side cap {cap:g}")

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        vals = []
        for h in lags:
            sub = window.erode_for_lag(h)
            pts = sub.uniform_points(gen, n_points)
            hit = covered_mask(real, pts)
            if float(np.linalg.norm(h)) > 0.0:
                hit = hit & covered_mask(real, pts + h)
            vals.append(float(np.mean(hit)))
        return vals

    values = _run_replicates(n_reps, one, workers)
    return [
        EstimateReport.from_replicates(
            f"covariance[{np.array2string(h, separator=',')}]",
            values[:, j],
            n_points * n_reps,
            seed,
            analytic=analytic.covariance(spec, h),
        )
        for j, h in enumerate(lags)
    ]


# ---------------------------------------------------------------------------
# contact distributions
# ---------------------------------------------------------------------------

def _uncovered_points(real: Realization, gen, region: Window, n_points: int, p_hint: float):
    """Uniform points of the region conditioned on not being covered."""
    out = []
    have = 0
    guard = 0
    while have < n_points:
        guard += 1
        if guard > 200:
            raise RuntimeError("rejection sampling failed to find uncovered points")
        need = n_points - have
        batch = max(int(need / max(1.0 - p_hint, 1e-3) * 1.25), 256)
        pts = region.uniform_points(gen, batch)
        keep = pts[~covered_mask(real, pts)]
        out.append(keep[:need])
        have += len(out[-1])
    return np.vstack(out)


def est_spherical_cdf(spec: ProcessSpec, window: Window, radii, n_points: int, n_reps: int,
                      seed: int, workers: int = 1) -> list[EstimateReport]:
    """Empirical distance distribution from uncovered points to the union."""
    radii = [float(r) for r in radii]
    if min(radii) < 0:
        raise ValueError("radii must be nonnegative")
    r_max = max(radii)
    cap = DEFAULT_LAG_FRACTION * window.min_side
    if r_max > cap:
        raise ValueError(f"max radius {r_max} exceeds the distance cap {cap:g}")
    if spec.base.has_zero_mass:
        raise ValueError("spherical contact estimation is unsupported for base laws "
                         "with radius-zero atoms")
    p = analytic.volume_fraction(spec)
    if p > 0.999:
        raise ValueError("complement is too thin for rejection sampling (p > 0.999)")
    region = window.erode(r_max)

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        pts = _uncovered_points(real, gen, region, n_points, p)
        dist = distance_mask(real, pts)
        return [float(np.mean(dist <= r)) for r in radii]

    values = _run_replicates(n_reps, one, workers)
    return [
        EstimateReport.from_replicates(
            f"spherical_cdf[r={r:g}]", values[:, j], n_points * n_reps, seed,
            analytic=analytic.spherical_cdf(spec, r),
        )
        for j, r in enumerate(radii)
    ]


def est_linear_cdf(spec: ProcessSpec, window: Window, eta: Direction, radii, n_rays: int,
                   n_reps: int, seed: int, workers: int = 1) -> list[EstimateReport]:
    """Empirical first-contact distribution along rays in direction eta."""
    radii = [float(r) for r in radii]
    if min(radii) < 0:
        raise ValueError("radii must be nonnegative")
    r_max = max(radii)
    eta_vec = eta.vec if isinstance(eta, Direction) else Direction(eta).vec
    region = window.erode_for_lag(r_max * eta_vec)
    p = analytic.volume_fraction(spec)
    if p > 0.999:
        raise ValueError("complement is too thin for rejection sampling (p > 0.999)")

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        pts = _uncovered_points(real, gen, region, n_rays, p)
        t_first = first_entry_times(real, pts, eta_vec, r_max)
        return [float(np.mean(t_first <= r)) for r in radii]

    values = _run_replicates(n_reps, one, workers)
    return [
        EstimateReport.from_replicates(
            f"linear_cdf[r={r:g}]", values[:, j], n_rays * n_reps, seed,
            analytic=analytic.linear_cdf(spec, eta, r),
        )
        for j, r in enumerate(radii)
    ]


# ---------------------------------------------------------------------------
# specific surface
# ---------------------------------------------------------------------------

def _haar_directions(d: int, gen, n: int) -> np.ndarray:
    if d == 2:
        phi = gen.uniform(0.0, math.pi, n)
        return np.column_stack([np.cos(phi), np.sin(phi)])
    z = gen.uniform(-1.0, 1.0, n)
    phi = gen.uniform(0.0, 2.0 * math.pi, n)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def _crofton_factor(d: int) -> float:
    return d * ball_constants(d)[0] / ball_constants(d - 1)[0]


def est_specific_surface_linescan(spec: ProcessSpec, window: Window, n_lines: int, n_reps: int,
                                  seed: int, workers: int = 1,
                                  probe_length: float | None = None) -> EstimateReport:
    """Line-intercept estimator of the specific surface area.

    Probe segments of a fixed length are placed with Haar-uniform direction
    and uniform midpoint in the accordingly eroded window, so every probe
    lies inside the window and component entry counts are exact.  Each
    entry endpoint strictly inside a probe marks one component; components
    straddling the probe start are dropped, which by stationarity keeps the
    count unbiased for intensity * length.
    """
    length = probe_length if probe_length is not None else 0.8 * window.min_side
    if not 0 < length < window.min_side:
        raise ValueError("probe length must be positive and below the window min side")
    factor = _crofton_factor(spec.d)
    inner = window.erode(0.5 * length)

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        dirs = _haar_directions(spec.d, gen, n_lines)
        mids = inner.uniform_points(gen, n_lines)
        origins = mids - 0.5 * length * dirs
        ids, tins, touts = ray_interval_bulk(real, origins, dirs, length)
        entries = count_component_entries(ids, tins, touts, length)
        return factor * entries / (n_lines * length)

    values = _run_replicates(n_reps, one, workers)
    return EstimateReport.from_replicates(
        "specific_surface_linescan", values, n_lines * n_reps, seed,
        analytic=analytic.specific_surface(spec),
    )


def est_specific_surface_covderiv(spec: ProcessSpec, window: Window, step: float, n_dirs: int,
                                  n_points: int, n_reps: int, seed: int,
                                  workers: int = 1, richardson: bool = False) -> EstimateReport:
    """Covariance-derivative estimator of the specific surface area.

    For Haar directions xi the one-sided derivative is approximated by
    (C(step xi) - p) / step on shared points, then averaged and scaled by
    the Crofton factor.  The finite difference has a documented O(step)
    bias, so comparisons carry a bias budget on top of the standard error.
    ``richardson`` extrapolates the differences at steps h and h/2
    (2 D(h/2) - D(h)), trading a little variance for the O(step) term.
    """
    cap = DEFAULT_LAG_FRACTION * window.min_side
    if not 0 < step < cap:
        raise ValueError(f"step must be in (0, {cap:g})")
    factor = _crofton_factor(spec.d)
    inner = window.erode(step)

    def one(rep):
        real, gen = _rep_streams(spec, window, seed, rep)
        pts = inner.uniform_points(gen, n_points)
        base = covered_mask(real, pts)
        p0 = float(np.mean(base))
        dirs = _haar_directions(spec.d, gen, n_dirs)
        acc = 0.0
        for xi in dirs:
            both = base & covered_mask(real, pts + step * xi)
            diff = (float(np.mean(both)) - p0) / step
            if richardson:
                half = base & covered_mask(real, pts + 0.5 * step * xi)
                diff = 2.0 * (float(np.mean(half)) - p0) / (0.5 * step) - diff
            acc += diff
        return -factor * acc / n_dirs

    values = _run_replicates(n_reps, one, workers)
    return EstimateReport.from_replicates(
        "specific_surface_covderiv", values, n_points * n_dirs * n_reps, seed,
        analytic=analytic.specific_surface(spec),
    )


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

_CSV_FIELDS = ("name", "estimate", "std_error", "n_samples", "n_replicates", "seed", "analytic", "z_score")


def reports_to_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for rep in reports:
            row = []
            for f in _CSV_FIELDS:
                val = getattr(rep, f)
                if val is None:
                    row.append("")
                elif isinstance(val, float):
                    row.append(f"{val:.12g}")
                else:
                    row.append(val)
            writer.writerow(row)


def reports_to_json(reports) -> str:
    return json.dumps(
        {"reports": [{f: getattr(rep, f) for f in _CSV_FIELDS} for rep in reports]},
        indent=2, allow_nan=True, default=float,
    )
