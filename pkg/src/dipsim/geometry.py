"""Qubit array geometry: site placement, dipole orientations, pair angles.

Geometries are planar (the qubits sit on one sapphire sheet); the cavity
axis only enters through each site's cavity angle phi.  Sites are indexed
from 0 and bond j connects sites (j, j+1), which fixes the staggering
conventions used by the observables and drive modules.
"""

import math
from dataclasses import dataclass, field

import numpy as np

TAU = 2.0 * math.pi


class GeometryError(ValueError):
    pass


def _reduce_angle(a):
    """Reduce an angle to [0, 2*pi)."""
    a = math.fmod(float(a), TAU)
    return a + TAU if a < 0 else a


@dataclass(frozen=True)
class QubitSite:
    """One qubit: position (mm), dipole axis angle, antenna length, cavity angle.

    ``antenna_length`` is the dimensionless normalized length entering the
    coupling law quadratically; ``cavity_angle`` is the dipole orientation
    relative to the cavity electric field.
    """

    position: tuple
    dipole_angle: float = 0.0
    antenna_length: float = 1.0
    cavity_angle: float = math.pi / 2.0

    def __post_init__(self):
        if self.antenna_length <= 0:
            raise GeometryError("antenna_length must be > 0, got %r" % (self.antenna_length,))
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "dipole_angle", _reduce_angle(self.dipole_angle))
        object.__setattr__(self, "cavity_angle", _reduce_angle(self.cavity_angle))

    @property
    def xy(self):
        return np.array(self.position, dtype=float)

    def axis(self):
        """Unit vector along the dipole axis."""
        return np.array([math.cos(self.dipole_angle), math.sin(self.dipole_angle)])

    def to_dict(self):
        return {
            "x_mm": self.position[0],
            "y_mm": self.position[1],
            "angle_deg": math.degrees(self.dipole_angle),
            "d_m": self.antenna_length,
            "phi_deg": math.degrees(self.cavity_angle),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            position=(d["x_mm"], d["y_mm"]),
            dipole_angle=math.radians(d.get("angle_deg", 0.0)),
            antenna_length=d.get("d_m", 1.0),
            cavity_angle=math.radians(d.get("phi_deg", 90.0)),
        )


@dataclass(frozen=True)
class QubitGeometry:
    """Ordered list of sites with a minimum-separation guarantee."""

    sites: tuple
    min_separation: float = 1e-3

    def __post_init__(self):
        sites = tuple(self.sites)
        if len(sites) < 1:
            raise GeometryError("geometry needs at least one site")
        if self.min_separation <= 0:
            raise GeometryError("min_separation must be > 0")
        object.__setattr__(self, "sites", sites)
        pos = np.array([s.position for s in sites])
        for i in range(len(sites)):
            d = np.hypot(*(pos[i + 1 :] - pos[i]).T) if i + 1 < len(sites) else np.array([])
            if d.size and d.min() < self.min_separation - 1e-12:
                j = i + 1 + int(np.argmin(d))
                raise GeometryError(
                    "sites %d and %d are %.4f mm apart, below min_separation %.4f mm"
                    % (i, j, d.min(), self.min_separation)
                )

    def __len__(self):
        return len(self.sites)

    def positions(self):
        return np.array([s.position for s in self.sites])

    def to_dicts(self):
        return [s.to_dict() for s in self.sites]

    @classmethod
    def from_dicts(cls, rows, min_separation=1e-3):
        return cls(tuple(QubitSite.from_dict(r) for r in rows), min_separation)


@dataclass(frozen=True)
class PairGeometry:
    """Distance and angles of one qubit pair.

    theta1/theta2 are the (unoriented, [0, pi/2]) angles between each dipole
    axis and the line connecting the centers; theta is the angle between the
    two axes, same reduction.
    """

    r: float
    theta1: float
    theta2: float
    theta: float


def _axis_angle(cosine):
    # dipole axes are unoriented lines -> report angles in [0, pi/2]
    return math.acos(min(1.0, abs(cosine)))


def pair_geometry(a: QubitSite, b: QubitSite) -> PairGeometry:
    """Geometric quantities of the pair (a, b) entering the coupling law."""
    dvec = b.xy - a.xy
    r = float(np.hypot(*dvec))
    if r == 0.0:
        raise GeometryError("coincident sites have no pair geometry")
    u = dvec / r
    return PairGeometry(
        r=r,
        theta1=_axis_angle(float(a.axis() @ u)),
        theta2=_axis_angle(float(b.axis() @ u)),
        theta=_axis_angle(float(a.axis() @ b.axis())),
    )


def _per_site(value, n, name):
    """Expand a scalar / sequence / callable site rule to an n-vector."""
    if callable(value):
        return [float(value(i)) for i in range(n)]
    if np.isscalar(value):
        return [float(value)] * n
    vals = [float(v) for v in value]
    if len(vals) != n:
        raise GeometryError("%s rule has %d entries for %d sites" % (name, len(vals), n))
    return vals


def build_geometry(
    kind,
    n_sites,
    spacing,
    orientation_pattern=0.0,
    antenna_length=1.0,
    cavity_angle=math.pi / 2.0,
    min_separation=None,
):
    """Generate a chain, triangular ladder, or rectangular grid.

    The triangular ladder is numbered along the zigzag path, so bonds
    (j, j+1) are the rungs (NN, length = spacing) and (j, j+2) the legs
    (NNN, length = sqrt(3) * spacing for equilateral triangles).
    """
    if n_sites < 1:
        raise GeometryError("n_sites must be >= 1")
    if spacing <= 0:
        raise GeometryError("spacing must be > 0, got %r" % (spacing,))

    if kind == "chain":
        pos = [(i * spacing, 0.0) for i in range(n_sites)]
    elif kind == "triangular_ladder":
        dx, dy = spacing * math.sqrt(3.0) / 2.0, spacing / 2.0
        pos = [(i * dx, (i % 2) * dy) for i in range(n_sites)]
    elif kind == "rect_grid":
        cols = int(math.ceil(math.sqrt(n_sites)))
        pos = [((i % cols) * spacing, (i // cols) * spacing) for i in range(n_sites)]
    else:
        raise GeometryError("unknown geometry kind %r" % (kind,))

    angles = _per_site(orientation_pattern, n_sites, "orientation")
    lengths = _per_site(antenna_length, n_sites, "antenna_length")
    phis = _per_site(cavity_angle, n_sites, "cavity_angle")
    sites = tuple(
        QubitSite(position=p, dipole_angle=a, antenna_length=d, cavity_angle=phi)
        for p, a, d, phi in zip(pos, angles, lengths, phis)
    )
    if min_separation is None:
        min_separation = 0.5 * spacing
    return QubitGeometry(sites=sites, min_separation=min_separation)
