"""Analytic qubit-qubit coupling law and its fitting / mapping tools.

The coupling of a pair is a cavity-mediated term plus the direct dipolar
term,

    J = g_a g_b d_a d_b / (2 Delta) * sin(phi_a) sin(phi_b)
        - J0 d_a d_b * (cos th - 3 cos th1 cos th2) / (r - r_m)^3

with g evaluated from a standing-wave profile at each site and r_m a
finite-antenna offset.  Signs follow the convention in which a parallel
side-by-side pair couples negatively and a collinear pair twice as
strongly with positive sign; the dipolar term then vanishes on the magic
angle arccos(1/sqrt(3)) ~ 54.74 deg.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .geometry import GeometryError, PairGeometry, QubitSite, pair_geometry

MAGIC_ANGLE = math.acos(1.0 / math.sqrt(3.0))


class CouplingError(ValueError):
    pass


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class CouplingModel:
    """Parameters of the analytic coupling law.

    J0 in 2*pi*MHz*mm^3 per unit antenna-length^2; r_m in mm; g_max and
    Delta in 2*pi*MHz.  Delta is the qubit-cavity detuning (positive for a
    cavity below the qubits, which is what makes the cavity term cancel the
    negative parallel-pair dipolar term at finite distance).  A cavity
    length of None means a uniform g(x) = g_max profile.
    """

    J0: float = 50.0
    r_m: float = 0.2
    g_max: float = 65.0
    Delta: float = 1500.0
    cavity_enabled: bool = True
    cavity_length: float | None = None
    mode_index: int = 1
    profile_phase: float = 0.0

    def __post_init__(self):
        if self.r_m < 0:
            raise CouplingError("r_m must be >= 0")
        if self.cavity_enabled and self.Delta == 0:
            raise CouplingError("Delta must be nonzero when the cavity term is enabled")

    def g_at(self, x_mm):
        """Qubit-cavity coupling at position x along the cavity axis."""
        if self.cavity_length is None:
            return self.g_max
        arg = self.mode_index * math.pi * x_mm / self.cavity_length + self.profile_phase
        return self.g_max * math.cos(arg)


def angular_factor(theta, theta1, theta2):
    """Dipolar angular dependence: cos(theta) - 3 cos(theta1) cos(theta2)."""
    return math.cos(theta) - 3.0 * math.cos(theta1) * math.cos(theta2)


def dipole_coupling(pg: PairGeometry, a: QubitSite, b: QubitSite, model: CouplingModel):
    """Pair coupling in 2*pi*MHz.  Rejects r <= r_m (the law is singular)."""
    if pg.r <= model.r_m:
        raise CouplingError(
            "pair distance %.4f mm is inside the finite-size offset r_m=%.4f mm" % (pg.r, model.r_m)
        )
    dd = a.antenna_length * b.antenna_length
    j = -model.J0 * dd * angular_factor(pg.theta, pg.theta1, pg.theta2) / (pg.r - model.r_m) ** 3
    if model.cavity_enabled:
        ga = model.g_at(a.position[0])
        gb = model.g_at(b.position[0])
        j += ga * gb * dd * math.sin(a.cavity_angle) * math.sin(b.cavity_angle) / (2.0 * model.Delta)
    return j


def coupling_matrix(geo, model: CouplingModel, max_range=None):
    """Symmetric zero-diagonal matrix of all pair couplings (2*pi*MHz).

    ``max_range`` optionally zeroes pairs beyond a distance cutoff, the
    effectively-local 1D approximation.
    """
    n = len(geo)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pg = pair_geometry(geo.sites[i], geo.sites[j])
            if max_range is not None and pg.r > max_range:
                continue
            mat[i, j] = mat[j, i] = dipole_coupling(pg, geo.sites[i], geo.sites[j], model)
    return mat


@dataclass(frozen=True)
class FitSample:
    """One sampled coupling: pair geometry, antenna/cavity factors, and J."""

    pair: PairGeometry
    J: float
    d_a: float = 1.0
    d_b: float = 1.0
    g_a: float = 0.0
    g_b: float = 0.0
    sin_phi_a: float = 1.0
    sin_phi_b: float = 1.0
    length_key: float = 1.0


def _fit_model_value(s: FitSample, J0, r_m, Delta):
    dd = s.d_a * s.d_b
    j = -J0 * dd * angular_factor(s.pair.theta, s.pair.theta1, s.pair.theta2) / (s.pair.r - r_m) ** 3
    if Delta:
        j += s.g_a * s.g_b * dd * s.sin_phi_a * s.sin_phi_b / (2.0 * Delta)
    return j


def fit_dipole_model(samples, Delta=0.0, max_iter=5000):
    """Least-squares fit of (J0, one r_m per antenna length) to sampled J's.

    The cavity factors (g's, Delta) are held fixed; J0 is shared across all
    antenna-length groups while each group carries its own finite-size
    offset r_m.  Returns (J0, {length_key: r_m}, relative residual).
    """
    samples = list(samples)
    if len(samples) < 3:
        raise FitError("need at least 3 samples, got %d" % len(samples))
    r_values = sorted({round(s.pair.r, 12) for s in samples})
    if len(r_values) < 2:
        raise FitError("degenerate sample set: all samples at one distance")
    groups = sorted({s.length_key for s in samples})
    r_min = min(s.pair.r for s in samples)

    def unpack(x):
        return x[0], dict(zip(groups, x[1:]))

    def residuals(x):
        j0, rms = unpack(x)
        return np.array([_fit_model_value(s, j0, rms[s.length_key], Delta) - s.J for s in samples])

    # J0 enters linearly at fixed r_m, so seed it from a linear solve at r_m=0.
    basis = np.array([_fit_model_value(s, 1.0, 0.0, 0.0) for s in samples])
    target = np.array(
        [s.J - (_fit_model_value(s, 0.0, 0.0, Delta) if Delta else 0.0) for s in samples]
    )
    denom = basis @ basis
    j0_init = float(basis @ target / denom) if denom > 0 else 1.0
    x0 = np.array([j0_init] + [0.0] * len(groups))
    lower = [-np.inf] + [0.0] * len(groups)
    upper = [np.inf] + [0.95 * r_min] * len(groups)

    result = least_squares(
        residuals, x0, bounds=(lower, upper), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter
    )
    if not result.success:
        raise FitError("fit did not converge: %s" % result.message)
    scale = float(np.linalg.norm([s.J for s in samples]))
    rel_residual = float(np.linalg.norm(result.fun)) / (scale if scale > 0 else 1.0)
    j0, rms = unpack(result.x)
    return float(j0), {k: float(v) for k, v in rms.items()}, rel_residual


def zero_coupling_distance(
    model: CouplingModel,
    theta1=math.pi / 2,
    theta2=math.pi / 2,
    theta=0.0,
    sin_phi_a=1.0,
    sin_phi_b=1.0,
    d_a=1.0,
    d_b=1.0,
    r_max=20.0,
    tol=1e-6,
):
    """Distance at which cavity and dipolar terms cancel, or None.

    Brackets a sign change of J(r) on (r_m, r_max] and bisects to ``tol``
    mm.  Without the cavity term the pure power law never crosses zero.
    """
    dd = d_a * d_b
    cav = 0.0
    if model.cavity_enabled:
        cav = model.g_max * model.g_max * dd * sin_phi_a * sin_phi_b / (2.0 * model.Delta)

    def j_of_r(r):
        return cav - model.J0 * dd * angular_factor(theta, theta1, theta2) / (r - model.r_m) ** 3

    rs = np.linspace(model.r_m + max(tol, 1e-4), r_max, 2048)
    vals = np.array([j_of_r(r) for r in rs])
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if sign_change.size == 0:
        return None
    lo, hi = rs[sign_change[0]], rs[sign_change[0] + 1]
    flo = j_of_r(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = j_of_r(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


@dataclass
class CouplingMap:
    """Coupling field of a probe qubit moved over a grid around a fixed one."""

    x: np.ndarray
    y: np.ndarray
    J: np.ndarray  # shape (ny, nx), NaN inside the exclusion disk
    contour: np.ndarray  # (n, 2) points on the J=0 locus


def _zero_contour(x, y, field):
    """Zero-level points by linear interpolation on sign-changing cell edges."""
    pts = []
    ny, nx = field.shape
    for iy in range(ny):
        for ix in range(nx - 1):
            a, b = field[iy, ix], field[iy, ix + 1]
            if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                t = a / (a - b)
                pts.append((x[ix] + t * (x[ix + 1] - x[ix]), y[iy]))
    for ix in range(nx):
        for iy in range(ny - 1):
            a, b = field[iy, ix], field[iy + 1, ix]
            if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                t = a / (a - b)
                pts.append((x[ix], y[iy] + t * (y[iy + 1] - y[iy])))
    return np.array(pts) if pts else np.zeros((0, 2))


def coupling_map(
    fixed_site: QubitSite,
    model: CouplingModel,
    x_range=(-4.0, 4.0),
    y_range=(-4.0, 4.0),
    resolution=81,
    probe_angle=None,
    probe_length=1.0,
    probe_cavity_angle=None,
    exclusion_radius=None,
):
    """Sample J(x, y) for a probe site on a rectangular grid.

    Cells closer to the fixed site than the exclusion radius (default:
    slightly beyond r_m) are NaN.  The zero contour is extracted by
    cell-edge sign scanning.
    """
    if probe_angle is None:
        probe_angle = fixed_site.dipole_angle
    if probe_cavity_angle is None:
        probe_cavity_angle = fixed_site.cavity_angle
    if exclusion_radius is None:
        exclusion_radius = max(1.25 * model.r_m, 0.25)

    xs = np.linspace(*x_range, resolution)
    ys = np.linspace(*y_range, resolution)
    field = np.full((ys.size, xs.size), np.nan)
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            dx = xv - fixed_site.position[0]
            dy = yv - fixed_site.position[1]
            if math.hypot(dx, dy) <= exclusion_radius:
                continue
            probe = QubitSite(
                position=(xv, yv),
                dipole_angle=probe_angle,
                antenna_length=probe_length,
                cavity_angle=probe_cavity_angle,
            )
            field[iy, ix] = dipole_coupling(
                pair_geometry(fixed_site, probe), fixed_site, probe, model
            )
    if not np.isfinite(field).any():
        raise CouplingError("grid lies entirely inside the exclusion disk")
    return CouplingMap(x=xs, y=ys, J=field, contour=_zero_contour(xs, ys, field))


def cut_sign_changes(map_or_field, y_value=None):
    """Count sign changes along a horizontal cut of a CouplingMap."""
    m = map_or_field
    iy = int(np.argmin(np.abs(m.y - y_value)))
    row = m.J[iy]
    row = row[np.isfinite(row)]
    signs = np.sign(row)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[:-1] * signs[1:] < 0))
