"""Boundary sampling of polar bodies and minimal vanishing-degree fits.

The polar of a convex body C containing the origin is
C° = {c : <c, x> <= 1 for all x in C}.  When the support value
v(y) = max over C of <y, x> is positive, the scaled direction y / v(y)
lies on the boundary of C°, so seeded support solves produce a cloud of
boundary points.  Fitting then asks for the smallest total degree D such
that some polynomial of degree <= D vanishes on the whole cloud, detected
as a numerical kernel of the monomial evaluation matrix (a Veronese-style
interpolation).  That degree feeds the representation-size bound
sqrt(log2 d).

The fitted degree is an estimate with audit data (singular-value tails per
degree), not a certificate.  It also deliberately measures the boundary
itself: the critical-equation variety that vanishes on the boundary can
have extra components, and those must not inflate the answer.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .bounds import psd_rank_lower_bound
from .pencil import Pencil
from .sdp import STATUS_OPTIMAL, solve_sdp

EPS_VALUE = 1e-9  # support values below this are treated as degenerate
EPS_KERNEL = 1e-7  # relative singular-value threshold declaring a kernel
OVERSAMPLE = 3  # default directions per monomial at the largest degree


class AllSkippedError(RuntimeError):
    """No sampled direction produced a boundary point."""


class InsufficientSamplesError(ValueError):
    """Too few cloud points to test the requested degree."""


@dataclass
class BoundaryCloud:
    """Sampled points on the boundary of a polar body.

    ``points[i] = directions[i] / values[i]``; ``skipped`` records the
    directions that produced no point (solver status or near-zero value).
    """

    ambient_dim: int
    points: np.ndarray
    directions: np.ndarray
    values: np.ndarray
    skipped: list[dict] = field(default_factory=list)
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "points": self.points.tolist(),
            "directions": self.directions.tolist(),
            "values": self.values.tolist(),
            "skipped": self.skipped,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundaryCloud":
        return cls(
            ambient_dim=int(data["ambient_dim"]),
            points=np.asarray(data["points"], dtype=float).reshape(-1, int(data["ambient_dim"])),
            directions=np.asarray(data["directions"], dtype=float).reshape(
                -1, int(data["ambient_dim"])
            ),
            values=np.asarray(data["values"], dtype=float),
            skipped=list(data.get("skipped", [])),
            seed=data.get("seed"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def points_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([f"x{i+1}" for i in range(self.ambient_dim)])
        for p in self.points:
            writer.writerow([repr(float(v)) for v in p])
        return buf.getvalue()


def sample_polar_boundary(
    pencil: Pencil,
    num_dirs: int,
    seed: int,
    *,
    eps_value: float = EPS_VALUE,
    solver_kwargs: dict | None = None,
) -> BoundaryCloud:
    """Sample boundary points of the polar of the pencil's body.

    Directions are unit Gaussians in the image space (seeded); each is
    lifted through the projection adjoint when one is present, the support
    SDP is solved, and the direction divided by its support value is
    stored.  Unbounded or failed solves, and support values below
    ``eps_value``, land in ``skipped``.
    """
    if num_dirs < 1:
        raise ValueError(f"need at least one direction, got {num_dirs}")
    k = pencil.image_dim
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((num_dirs, k))
    kwargs = solver_kwargs or {}

    points = []
    directions = []
    values = []
    skipped: list[dict] = []
    for idx in range(num_dirs):
        y = raw[idx]
        norm = float(np.linalg.norm(y))
        if norm < 1e-12:
            skipped.append({"index": idx, "reason": "degenerate_direction"})
            continue
        y = y / norm
        sol = solve_sdp(pencil, pencil.lift_direction(y), **kwargs)
        if sol.status != STATUS_OPTIMAL:
            skipped.append({"index": idx, "reason": sol.status})
            continue
        if sol.value <= eps_value:
            skipped.append({"index": idx, "reason": "near_zero_value"})
            continue
        points.append(y / sol.value)
        directions.append(y)
        values.append(sol.value)

    if not points:
        raise AllSkippedError("every sampled direction was skipped")
    return BoundaryCloud(
        ambient_dim=k,
        points=np.asarray(points),
        directions=np.asarray(directions),
        values=np.asarray(values),
        skipped=skipped,
        seed=seed,
    )


def monomial_exponents(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all monomials with total degree <= degree.

    Graded order: total degree first, lexicographic within a degree.
    Includes the constant monomial.
    """
    monos: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(dim), total):
            e = [0] * dim
            for v in combo:
                e[v] += 1
            monos.append(tuple(e))
    return monos


def _eval_monomials(points: np.ndarray, monos: Sequence[tuple[int, ...]]) -> np.ndarray:
    cols = []
    for e in monos:
        col = np.ones(len(points))
        for var, exp in enumerate(e):
            if exp:
                col = col * points[:, var] ** exp
        cols.append(col)
    return np.column_stack(cols)


@dataclass
class DegreeFit:
    """Diagnostics of the kernel test at a single degree."""

    degree: int
    monomial_count: int
    sample_count: int
    sigma_max: float
    singular_tail: list[float]
    kernel_dim: int
    gap: float | None  # smallest non-kernel sigma over largest kernel sigma

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "monomial_count": self.monomial_count,
            "sample_count": self.sample_count,
            "sigma_max": self.sigma_max,
            "singular_tail": self.singular_tail,
            "kernel_dim": self.kernel_dim,
            "gap": self.gap,
        }


@dataclass
class DegreeFitReport:
    """Outcome of the minimal vanishing-degree search on a cloud."""

    ambient_dim: int
    degrees_tested: list[int]
    per_degree: list[DegreeFit]
    fitted_degree: int | None
    fitted_monomials: list[tuple[int, ...]] | None
    fitted_coefficients: np.ndarray | None
    max_abs_eval: float | None  # of the fitted polynomial over the whole cloud
    eps_kernel: float
    seed: int | None

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "degrees_tested": self.degrees_tested,
            "per_degree": [f.to_dict() for f in self.per_degree],
            "fitted_degree": self.fitted_degree,
            "fitted_monomials": (
                None
                if self.fitted_monomials is None
                else [list(e) for e in self.fitted_monomials]
            ),
            "fitted_coefficients": (
                None
                if self.fitted_coefficients is None
                else self.fitted_coefficients.tolist()
            ),
            "max_abs_eval": self.max_abs_eval,
            "eps_kernel": self.eps_kernel,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def evaluate_fit(report: DegreeFitReport, points: np.ndarray) -> np.ndarray:
    """Evaluate the fitted polynomial at the given points."""
    if report.fitted_degree is None:
        raise ValueError("report has no fitted polynomial")
    mat = _eval_monomials(np.asarray(points, dtype=float), report.fitted_monomials)
    return mat @ report.fitted_coefficients


def fit_min_vanishing_degree(
    cloud: BoundaryCloud,
    max_degree: int,
    *,
    eps_kernel: float = EPS_KERNEL,
    stop_at_first: bool = False,
) -> DegreeFitReport:
    """Smallest degree D <= max_degree of a polynomial vanishing on the cloud.

    For each degree the monomial evaluation matrix is assembled on points
    rescaled to unit RMS radius (Vandermonde conditioning) and a kernel is
    declared when the smallest singular value drops below ``eps_kernel``
    times the largest.  Needs at least 2 monomial_count points per tested
    degree and caps the rows at 3 monomial_count (evenly subsampled), so
    oversampling stabilizes the rank decision.  By default all degrees up
    to ``max_degree`` are tested so the report carries the full kernel
    profile; ``stop_at_first`` quits at the first kernel instead.
    """
    if max_degree < 1:
        raise ValueError(f"need max_degree >= 1, got {max_degree}")
    pts = np.asarray(cloud.points, dtype=float)
    if pts.size == 0:
        raise InsufficientSamplesError("empty cloud")
    npts = len(pts)
    dim = cloud.ambient_dim

    rms = float(np.sqrt(np.mean(np.sum(pts * pts, axis=1))))
    scale = rms if rms > 0 else 1.0
    scaled = pts / scale

    degrees_tested: list[int] = []
    per_degree: list[DegreeFit] = []
    fitted_degree: int | None = None
    fitted_monos: list[tuple[int, ...]] | None = None
    fitted_coeffs: np.ndarray | None = None

    for degree in range(1, max_degree + 1):
        monos = monomial_exponents(dim, degree)
        need = 2 * len(monos)
        if npts < need:
            if fitted_degree is not None:
                break
            raise InsufficientSamplesError(
                f"degree {degree} needs {need} points, cloud has {npts}"
            )
        rows = min(npts, OVERSAMPLE * len(monos))
        idx = np.floor(np.linspace(0, npts, rows, endpoint=False)).astype(int)
        mat = _eval_monomials(scaled[idx], monos)
        u, svals, vt = np.linalg.svd(mat, full_matrices=False)
        sigma_max = float(svals[0])
        kernel_dim = int(np.sum(svals <= eps_kernel * sigma_max))
        gap = None
        if kernel_dim >= 1:
            below = float(svals[-1])
            above = float(svals[len(svals) - kernel_dim - 1]) if kernel_dim < len(svals) else None
            if above is not None:
                gap = above / below if below > 0 else math.inf
        degrees_tested.append(degree)
        per_degree.append(
            DegreeFit(
                degree=degree,
                monomial_count=len(monos),
                sample_count=rows,
                sigma_max=sigma_max,
                singular_tail=[float(s) for s in svals[-min(6, len(svals)) :]],
                kernel_dim=kernel_dim,
                gap=gap,
            )
        )
        if kernel_dim >= 1 and fitted_degree is None:
            fitted_degree = degree
            raw_coeffs = vt[-1]
            # map back to original coordinates and renormalize
            back = np.array([c / scale ** sum(e) for c, e in zip(raw_coeffs, monos)])
            back /= float(np.linalg.norm(back))
            fitted_monos = monos
            fitted_coeffs = back
            if stop_at_first:
                break

    max_abs_eval = None
    if fitted_degree is not None:
        evals = _eval_monomials(pts, fitted_monos) @ fitted_coeffs
        max_abs_eval = float(np.max(np.abs(evals)))

    return DegreeFitReport(
        ambient_dim=dim,
        degrees_tested=degrees_tested,
        per_degree=per_degree,
        fitted_degree=fitted_degree,
        fitted_monomials=fitted_monos,
        fitted_coefficients=fitted_coeffs,
        max_abs_eval=max_abs_eval,
        eps_kernel=eps_kernel,
        seed=cloud.seed,
    )


def pentagon_fixture() -> Pencil:
    """The 4 x 4 pencil whose shadow on (x, y) is the regular pentagon.

    A(x, y, s, t) =
        [[1+s,   t, x+s, y-t],
         [  t, 1-s, -y-t, x-s],
         [x+s, -y-t, 1+x,  -y],
         [y-t, x-s,  -y, 1-x]]

    with projection (x, y, s, t) -> (x, y).  The shadow is the convex hull
    of (cos(2k pi/5), sin(2k pi/5)), k = 0..4; its polar is another regular
    pentagon, so the polar boundary is a degree-5 curve (five lines).
    """
    a0 = np.eye(4)
    ax = np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, -1.0],
        ]
    )
    ay = np.array(
        [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, -1.0],
            [1.0, 0.0, -1.0, 0.0],
        ]
    )
    a_s = np.array(
        [
            [1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]
    )
    a_t = np.array(
        [
            [0.0, 1.0, 0.0, -1.0],
            [1.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]
    )
    projection = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    return Pencil(mats=(a0, ax, ay, a_s, a_t), projection=projection)


def pentagon_vertices() -> np.ndarray:
    """Vertices (cos(2k pi/5), sin(2k pi/5)) of the pentagon shadow."""
    k = np.arange(5)
    ang = 2.0 * np.pi * k / 5.0
    return np.column_stack([np.cos(ang), np.sin(ang)])


def disk_fixture() -> Pencil:
    """2 x 2 pencil cutting out the closed unit disk in the plane."""
    return Pencil(
        mats=(
            np.eye(2),
            np.array([[1.0, 0.0], [0.0, -1.0]]),
            np.array([[0.0, 1.0], [1.0, 0.0]]),
        )
    )


def segment_fixture() -> Pencil:
    """1-variable pencil cutting out the segment [-1, 1]."""
    return Pencil(mats=(np.eye(2), np.array([[1.0, 0.0], [0.0, -1.0]])))


@dataclass
class PipelineResult:
    """Composition sample -> fit -> representation-size bound."""

    d_est: int | None
    conclusive: bool
    d_used: int  # degree fed into the bound (largest tested when inconclusive)
    psd_bound: float
    psd_bound_ceil: int
    cloud_size: int
    skipped: int
    report: DegreeFitReport

    def to_dict(self) -> dict:
        return {
            "d_est": self.d_est,
            "conclusive": self.conclusive,
            "d_used": self.d_used,
            "psd_bound": self.psd_bound,
            "psd_bound_ceil": self.psd_bound_ceil,
            "cloud_size": self.cloud_size,
            "skipped": self.skipped,
            "report": self.report.to_dict(),
        }


def bound_pipeline(
    pencil: Pencil,
    num_dirs: int,
    max_degree: int,
    seed: int,
    *,
    eps_kernel: float = EPS_KERNEL,
) -> PipelineResult:
    """Sample the polar boundary, fit the minimal degree, convert to a bound.

    When no vanishing polynomial of degree <= max_degree exists the result
    is inconclusive: the true degree exceeds max_degree, so the bound is
    still valid when computed from the largest tested degree, and is
    reported as such.
    """
    cloud = sample_polar_boundary(pencil, num_dirs, seed)
    report = fit_min_vanishing_degree(cloud, max_degree, eps_kernel=eps_kernel)
    if report.fitted_degree is not None:
        d_used = report.fitted_degree
        conclusive = True
    else:
        d_used = max_degree
        conclusive = False
    bound = psd_rank_lower_bound(d_used)
    return PipelineResult(
        d_est=report.fitted_degree,
        conclusive=conclusive,
        d_used=d_used,
        psd_bound=bound.bound,
        psd_bound_ceil=bound.ceiling,
        cloud_size=len(cloud),
        skipped=len(cloud.skipped),
        report=report,
    )
