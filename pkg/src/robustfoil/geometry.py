"""Baseline NACA-0012 profile, Bernstein free-form deformation and shape metrics.

Points are stored as a closed counterclockwise loop without a repeated
closing point: trailing edge, upper surface to the leading edge, then the
lower surface back towards the trailing edge. Upper and lower surfaces share
the same chordwise stations and deformation only moves points vertically, so
station ``i`` of either surface keeps its ``x`` for every design.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

NACA0012_THICKNESS = 0.12
# Closed-trailing-edge variant of the 4-digit thickness polynomial.
_THICKNESS_COEFFS = (0.2969, -0.1260, -0.3516, 0.2843, -0.1036)

MIN_PANELS = 50
MIN_QUAD_NODES = 16


class DegenerateGeometryError(ValueError):
    """The upper surface touches or crosses below the lower surface."""

    def __init__(self, station: int, x: float, thickness: float):
        self.station = station
        self.x = x
        self.thickness = thickness
        super().__init__(
            f"self-intersecting airfoil: thickness {thickness:.3e} at x={x:.4f} (station {station})"
        )


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def naca_half_thickness(x, t: float = NACA0012_THICKNESS) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    a0, a1, a2, a3, a4 = _THICKNESS_COEFFS
    return 5.0 * t * (a0 * np.sqrt(x) + a1 * x + a2 * x**2 + a3 * x**3 + a4 * x**4)


def polygon_area(points: np.ndarray) -> float:
    """Signed shoelace area of a closed loop (positive when counterclockwise)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_perimeter(points: np.ndarray) -> float:
    d = np.roll(points, -1, axis=0) - points
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


@dataclass(frozen=True)
class AirfoilShape:
    points: np.ndarray
    area: float
    perimeter: float

    @classmethod
    def from_points(cls, points) -> "AirfoilShape":
        pts = _readonly(points)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] % 2:
            raise ValueError(f"expected an even number of (x, y) rows, got shape {pts.shape}")
        return cls(pts, polygon_area(pts), polygon_perimeter(pts))

    @property
    def n_per_surface(self) -> int:
        return self.points.shape[0] // 2

    @property
    def upper_index(self) -> np.ndarray:
        """Point index of the upper surface at stations 0 (LE) .. n (TE)."""
        n = self.n_per_surface
        return np.arange(n, -1, -1)

    @property
    def lower_index(self) -> np.ndarray:
        """Point index of the lower surface at stations 0 (LE) .. n (TE)."""
        n = self.n_per_surface
        idx = np.arange(n, 2 * n + 1)
        idx[-1] = 0
        return idx

    @property
    def stations(self) -> np.ndarray:
        return self.points[self.upper_index, 0]

    def surfaces(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(x, y_upper, y_lower)`` on the shared chordwise stations."""
        y = self.points[:, 1]
        return self.stations, y[self.upper_index], y[self.lower_index]

    def check_valid(self) -> None:
        x, yu, yl = self.surfaces()
        gap = (yu - yl)[1:-1]
        bad = np.flatnonzero(~(gap > 0.0))
        if bad.size:
            i = int(bad[np.argmin(gap[bad])]) + 1
            raise DegenerateGeometryError(i, float(x[i]), float(yu[i] - yl[i]))

    def to_dat(self, path) -> None:
        """Write the full closed loop (first point repeated) as two columns."""
        loop = np.vstack([self.points, self.points[:1]])
        Path(path).write_text("".join(f"{x:.17g} {y:.17g}\n" for x, y in loop))


def baseline_naca0012(n_per_surface: int = 200) -> AirfoilShape:
    """Sharp-trailing-edge NACA-0012 with cosine-clustered stations."""
    if n_per_surface < MIN_PANELS:
        raise ValueError(f"n_per_surface must be >= {MIN_PANELS}, got {n_per_surface}")
    n = int(n_per_surface)
    x = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n + 1)))
    x[0], x[-1] = 0.0, 1.0
    yt = naca_half_thickness(x)
    yt[0] = yt[-1] = 0.0

    upper = np.column_stack([x[::-1], yt[::-1]])
    lower = np.column_stack([x[1:-1], -yt[1:-1]])
    return AirfoilShape.from_points(np.vstack([upper, lower]))


def bernstein(degree: int, u) -> np.ndarray:
    """Bernstein basis of the given degree; returns shape ``(len(u), degree + 1)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    i = np.arange(degree + 1)
    binom = np.array([comb(degree, k) for k in i], dtype=float)
    return binom * u[:, None] ** i * (1.0 - u[:, None]) ** (degree - i)


@dataclass(frozen=True)
class FfdLattice:
    nx: int
    ny: int
    box: tuple[float, float, float, float]  # (x_min, x_max, y_min, y_max)
    locked_columns: frozenset[int]
    weights: np.ndarray = field(repr=False)  # (n_points, nx, ny)

    @property
    def free_nodes(self) -> list[tuple[int, int]]:
        """Free (column, row) nodes in design-vector order."""
        return [
            (i, j)
            for i in range(self.nx)
            if i not in self.locked_columns
            for j in range(self.ny)
        ]

    @property
    def n_free(self) -> int:
        return len(self.free_nodes)

    def free_weights(self) -> np.ndarray:
        """``(n_points, n_free)`` matrix mapping free-node ΔY to point Δy."""
        cols = [self.weights[:, i, j] for i, j in self.free_nodes]
        return _readonly(np.column_stack(cols))

    def metadata(self) -> dict:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "box": list(self.box),
            "locked_columns": sorted(self.locked_columns),
            "free_nodes": [list(node) for node in self.free_nodes],
        }


def build_lattice(
    baseline: AirfoilShape,
    nx: int = 10,
    ny: int = 2,
    margin: tuple[float, float] = (0.0, 0.02),
    locked_columns=None,
) -> FfdLattice:
    """Equidistant control lattice around ``baseline`` with precomputed weights.

    ``margin`` is ``(mx, my)`` in chord units. With ``mx = 0`` the leading
    and trailing edge sit on the end columns, whose Bernstein weights are
    exactly one there, so locking those columns pins both points.
    """
    if nx < 3 or ny < 2:
        raise ValueError(f"lattice needs nx >= 3 and ny >= 2, got nx={nx}, ny={ny}")
    mx, my = margin
    if mx < 0 or my <= 0:
        raise ValueError(f"margin must have mx >= 0 and my > 0, got {margin}")
    if locked_columns is None:
        locked_columns = {0, nx - 1}
    locked = frozenset(int(c) for c in locked_columns)
    if any(c < 0 or c >= nx for c in locked):
        raise ValueError(f"locked columns {sorted(locked)} out of range for nx={nx}")

    pts = baseline.points
    box = (
        0.0 - mx,
        1.0 + mx,
        float(pts[:, 1].min()) - my,
        float(pts[:, 1].max()) + my,
    )
    u = (pts[:, 0] - box[0]) / (box[1] - box[0])
    v = (pts[:, 1] - box[2]) / (box[3] - box[2])
    if np.any(u < 0) or np.any(u > 1) or np.any(v <= 0) or np.any(v >= 1):
        raise ValueError("baseline surface points fall outside the FFD box")

    w = bernstein(nx - 1, u)[:, :, None] * bernstein(ny - 1, v)[:, None, :]
    return FfdLattice(nx, ny, box, locked, _readonly(w))


@dataclass(frozen=True)
class DesignVector:
    ffd_dy: np.ndarray
    alpha_deg: float

    def __post_init__(self):
        object.__setattr__(self, "ffd_dy", _readonly(np.ravel(self.ffd_dy)))
        object.__setattr__(self, "alpha_deg", float(self.alpha_deg))

    @classmethod
    def zeros(cls, n_free: int = 16, alpha_deg: float = 0.0) -> "DesignVector":
        return cls(np.zeros(n_free), alpha_deg)

    @classmethod
    def from_theta(cls, theta) -> "DesignVector":
        theta = np.asarray(theta, dtype=float)
        return cls(theta[:-1], theta[-1])

    @property
    def theta(self) -> np.ndarray:
        return np.append(self.ffd_dy, self.alpha_deg)

    def validate(self, dy_max: float = 0.05, alpha_bounds=(-5.0, 10.0), n_free=None) -> None:
        theta = self.theta
        if not np.all(np.isfinite(theta)):
            raise ValueError("design vector has non-finite entries")
        if n_free is not None and self.ffd_dy.size != n_free:
            raise ValueError(f"expected {n_free} FFD displacements, got {self.ffd_dy.size}")
        if np.any(np.abs(self.ffd_dy) > dy_max):
            raise ValueError(f"|ffd_dy| exceeds dy_max={dy_max}")
        lo, hi = alpha_bounds
        if not lo <= self.alpha_deg <= hi:
            raise ValueError(f"alpha_deg={self.alpha_deg} outside [{lo}, {hi}]")


def deform(baseline: AirfoilShape, lattice: FfdLattice, design: DesignVector) -> AirfoilShape:
    """Move every surface point vertically by the lattice-weighted ΔY field."""
    w = lattice.free_weights()
    if design.ffd_dy.size != w.shape[1]:
        raise ValueError(f"expected {w.shape[1]} FFD displacements, got {design.ffd_dy.size}")
    pts = np.array(baseline.points)
    pts[:, 1] += w @ design.ffd_dy
    shape = AirfoilShape.from_points(pts)
    shape.check_valid()
    return shape


@dataclass(frozen=True)
class SensitivityTable:
    free_nodes: list[tuple[int, int]]
    dy_dffd: np.ndarray  # (n_points, n_free), design independent
    d_area: np.ndarray  # (n_free,)
    d_perimeter: np.ndarray  # (n_free,)


def area_gradient_y(points: np.ndarray) -> np.ndarray:
    """d(shoelace area)/dy_p for every point of a closed loop."""
    x = points[:, 0]
    return 0.5 * (np.roll(x, 1) - np.roll(x, -1))


def perimeter_gradient_y(points: np.ndarray) -> np.ndarray:
    d = np.roll(points, -1, axis=0) - points
    seg = np.hypot(d[:, 0], d[:, 1])
    dy_over = d[:, 1] / seg  # segment p -> p+1
    return np.roll(dy_over, 1) - dy_over


def shape_sensitivities(lattice: FfdLattice, shape: AirfoilShape) -> SensitivityTable:
    """Analytic sensitivities of point y, area and perimeter to the free ΔY.

    The area gradient is constant because the shoelace formula is linear in
    ``y`` at fixed ``x``; the perimeter gradient depends on ``shape``.
    """
    w = lattice.free_weights()
    return SensitivityTable(
        free_nodes=lattice.free_nodes,
        dy_dffd=w,
        d_area=_readonly(w.T @ area_gradient_y(shape.points)),
        d_perimeter=_readonly(w.T @ perimeter_gradient_y(shape.points)),
    )


def quadrature_nodes(n_quad: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes in the Glauert angle and their chordwise positions."""
    theta = (np.arange(n_quad) + 0.5) * np.pi / n_quad
    return theta, 0.5 * (1.0 - np.cos(theta))


def camber_slope_operator(stations: np.ndarray, n_quad: int) -> np.ndarray:
    """Matrix taking camber values at ``stations`` to slopes at the quadrature nodes.

    The camber line is interpolated linearly, so the slope at a node is the
    slope of the station segment containing it.
    """
    _, xq = quadrature_nodes(n_quad)
    seg = np.clip(np.searchsorted(stations, xq, side="right") - 1, 0, len(stations) - 2)
    h = stations[seg + 1] - stations[seg]
    op = np.zeros((n_quad, len(stations)))
    rows = np.arange(n_quad)
    op[rows, seg] = -1.0 / h
    op[rows, seg + 1] = 1.0 / h
    return op


@dataclass(frozen=True)
class CamberThickness:
    theta_nodes: np.ndarray
    x_nodes: np.ndarray
    camber_slopes: np.ndarray
    t_over_c: float
    thickest_station: int
    perimeter: float


def camber_thickness(shape: AirfoilShape, n_quad: int = 64) -> CamberThickness:
    if n_quad < MIN_QUAD_NODES:
        raise ValueError(f"n_quad must be >= {MIN_QUAD_NODES}, got {n_quad}")
    shape.check_valid()
    x, yu, yl = shape.surfaces()
    theta, xq = quadrature_nodes(n_quad)
    slopes = camber_slope_operator(x, n_quad) @ (0.5 * (yu + yl))
    gap = yu - yl
    i_max = int(np.argmax(gap))
    return CamberThickness(
        theta_nodes=theta,
        x_nodes=xq,
        camber_slopes=slopes,
        t_over_c=float(gap[i_max]),
        thickest_station=i_max,
        perimeter=shape.perimeter,
    )


@dataclass(frozen=True)
class GeometricState:
    """Everything the aerodynamic surrogate needs about one design, with ΔY gradients."""

    shape: AirfoilShape
    camber_slopes: np.ndarray
    t_over_c: float
    perimeter: float
    area_ratio: float
    d_camber_slopes: np.ndarray  # (n_quad, n_free)
    d_t_over_c: np.ndarray  # (n_free,)
    d_perimeter: np.ndarray  # (n_free,)
    d_area_ratio: np.ndarray  # (n_free,)


class GeometryContext:
    """Baseline, lattice and the design-independent linear operators, built once."""

    def __init__(
        self,
        n_per_surface: int = 200,
        nx: int = 10,
        ny: int = 2,
        margin: tuple[float, float] = (0.0, 0.02),
        n_quad: int = 64,
    ):
        if n_quad < MIN_QUAD_NODES:
            raise ValueError(f"n_quad must be >= {MIN_QUAD_NODES}, got {n_quad}")
        self.baseline = baseline_naca0012(n_per_surface)
        self.lattice = build_lattice(self.baseline, nx, ny, margin)
        self.n_quad = n_quad
        self.margin = (float(margin[0]), float(margin[1]))
        self.area0 = self.baseline.area

        b = self.baseline
        w = self.lattice.free_weights()
        self._w = w
        self._w_upper = w[b.upper_index]
        self._w_lower = w[b.lower_index]
        self._slope_op = camber_slope_operator(b.stations, n_quad)
        self._d_slopes = _readonly(self._slope_op @ (0.5 * (self._w_upper + self._w_lower)))
        self._d_area_ratio = _readonly(w.T @ area_gradient_y(b.points) / self.area0)

    @property
    def n_free(self) -> int:
        return self._w.shape[1]

    @property
    def n_theta(self) -> int:
        return self.n_free + 1

    def settings(self) -> dict:
        return {
            "n_per_surface": self.baseline.n_per_surface,
            "nx": self.lattice.nx,
            "ny": self.lattice.ny,
            "margin": list(self.margin),
            "n_quad": self.n_quad,
        }

    def deform(self, design: DesignVector) -> AirfoilShape:
        return deform(self.baseline, self.lattice, design)

    def analyze(self, design: DesignVector) -> GeometricState:
        shape = self.deform(design)
        x, yu, yl = shape.surfaces()
        gap = yu - yl
        i_max = int(np.argmax(gap))
        return GeometricState(
            shape=shape,
            camber_slopes=self._slope_op @ (0.5 * (yu + yl)),
            t_over_c=float(gap[i_max]),
            perimeter=shape.perimeter,
            area_ratio=shape.area / self.area0,
            d_camber_slopes=self._d_slopes,
            d_t_over_c=self._w_upper[i_max] - self._w_lower[i_max],
            d_perimeter=self._w.T @ perimeter_gradient_y(shape.points),
            d_area_ratio=self._d_area_ratio,
        )
