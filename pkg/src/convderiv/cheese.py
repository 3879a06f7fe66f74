"""A swiss-cheese set whose derivative-restriction derivation is bounded
but not compact, built and certified numerically.

The set is the closed unit disc minus a family of small open discs, one
above each dyadic subinterval of [0, 1/2]: disc n sits above the midpoint
x_n of I_n = [1/2 - 2^-n, 1/2 - 2^-(n+1)), at height y_n with radius
y_n^2.  The heights are the largest powers of two for which

  * the closed disc stays inside the open unit disc,
  * y_n^2 / (y_n - y_n^2)^2 = 1/(1 - y_n)^2 < 2, and
  * r_n / s_n(x)^2 < 2^-(n+1) for every x in [0, 1/2] outside I_n,

the last checked against a conservative minimum of the printed estimate
forms and the exact centre-to-endpoint geometry.  Those per-term bounds sum
with the unit-disc term (at most 4 on the interval) and the single
landing-interval term (less than 2) to a derivative bound below 13/2, and
they simultaneously force max_m |f_n'(x_m)| -> the unit diagonal pattern
that defeats compactness of f |-> f' restricted to the interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

INTERVAL = (0.0, 0.5)


class ConstructionFailedError(RuntimeError):
    """No admissible disc height found above the precision floor."""

    def __init__(self, n: int):
        super().__init__(f"no admissible height for disc {n} above 2^-40")
        self.n = n


class OnBoundaryError(ValueError):
    """The bound sum is undefined where some distance vanishes."""


class PoleInXError(ValueError):
    """A pole of the probe function lies in the certified region."""


@dataclass(frozen=True)
class Disc:
    """Open disc; for constructed cheeses radius == center.imag ** 2."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")


@dataclass(frozen=True)
class GeometryMargins:
    """Strict positive margins certifying the three set invariants."""

    containment: float   # min over n of 1 - (|a_n| + r_n)
    disjointness: float  # min over pairs of |a_i - a_j| - (r_i + r_j)
    interval_gap: float  # min over n of y_n - r_n

    @property
    def all_positive(self) -> bool:
        return min(self.containment, self.disjointness,
                   self.interval_gap) > 0.0


class CheeseSet:
    """The closed unit disc minus the constructed discs, with certificates.

    Discs are indexed from 1 as in the construction; ``disc(n)`` fetches
    them.  Geometry invariants are certified at construction time and the
    margins kept on the instance.
    """

    def __init__(self, discs: Sequence[Disc]):
        self.discs = tuple(discs)
        self.n_max = len(self.discs)
        self.r0 = 1.0
        self.interval = INTERVAL
        self.margins = self._certify()

    def _certify(self) -> GeometryMargins:
        centers = np.array([d.center for d in self.discs], dtype=complex)
        radii = np.array([d.radius for d in self.discs], dtype=float)
        if centers.size == 0:
            return GeometryMargins(1.0, 1.0, 1.0)
        containment = float((1.0 - (np.abs(centers) + radii)).min())
        if self.n_max > 1:
            gaps = np.abs(centers[:, None] - centers[None, :]) \
                - (radii[:, None] + radii[None, :])
            disjointness = float(gaps[~np.eye(self.n_max, dtype=bool)].min())
        else:
            disjointness = 1.0
        # every centre's real part lies inside the interval, so the distance
        # from centre to interval is exactly the height
        interval_gap = float((centers.imag - radii).min())
        margins = GeometryMargins(containment, disjointness, interval_gap)
        if not margins.all_positive:
            raise ValueError(f"geometry invariants violated: {margins}")
        return margins

    def disc(self, n: int) -> Disc:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"disc index {n} outside 1..{self.n_max}")
        return self.discs[n - 1]

    # -- distances -----------------------------------------------------------

    def s_dist(self, z: complex, j: int) -> float:
        """Distance from z to removed disc j; j = 0 means 1 - |z|."""
        if j == 0:
            return 1.0 - abs(z)
        disc = self.disc(j)
        return max(0.0, abs(z - disc.center) - disc.radius)

    def bound_sum(self, z: complex) -> Tuple[float, float]:
        """(value, certified_lt): the derivative bound sum at z.

        value = sum_{j=0..n_max} r_j / s_j(z)^2.  certified_lt adds the
        dyadic tail allowance 2^-(n_max+1), which covers every admissible
        extension of the disc family at points outside the extensions'
        landing intervals.
        """
        value = 0.0
        s0 = 1.0 - abs(z)
        if s0 <= 0.0:
            raise OnBoundaryError("point is not interior to the unit disc")
        value += self.r0 / s0 ** 2
        for j in range(1, self.n_max + 1):
            disc = self.disc(j)
            s = abs(z - disc.center) - disc.radius
            if s <= 0.0:
                raise OnBoundaryError(f"point touches removed disc {j}")
            value += disc.radius / s ** 2
        return value, value + 2.0 ** -(self.n_max + 1)

    def bound_sum_grid(self, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorised bound sums over an array of real points."""
        xs = np.asarray(xs, dtype=float)
        s0 = 1.0 - np.abs(xs)
        if np.any(s0 <= 0.0):
            raise OnBoundaryError("grid leaves the open unit disc")
        total = self.r0 / s0 ** 2
        for j in range(1, self.n_max + 1):
            disc = self.disc(j)
            s = np.abs(xs - disc.center) - disc.radius
            if np.any(s <= 0.0):
                raise OnBoundaryError(f"grid touches removed disc {j}")
            total = total + disc.radius / s ** 2
        return total, total + 2.0 ** -(self.n_max + 1)

    def to_dict(self) -> dict:
        return {"n_max": self.n_max,
                "discs": [{"x": d.center.real, "y": d.center.imag,
                           "r": d.radius} for d in self.discs]}

    @classmethod
    def from_dict(cls, payload: dict) -> "CheeseSet":
        discs = [Disc(complex(item["x"], item["y"]), float(item["r"]))
                 for item in payload["discs"]]
        if len(discs) != int(payload["n_max"]):
            raise ValueError("disc count disagrees with n_max")
        return cls(discs)

    def __repr__(self):
        return f"CheeseSet(n_max={self.n_max})"


def landing_interval(n: int) -> Tuple[float, float]:
    """The dyadic subinterval [1/2 - 2^-n, 1/2 - 2^-(n+1)) under disc n."""
    return 0.5 - 2.0 ** -n, 0.5 - 2.0 ** -(n + 1)


def midpoint(n: int) -> float:
    lo, hi = landing_interval(n)
    return 0.5 * (lo + hi)


def _admissible(n: int, y: float) -> bool:
    x = midpoint(n)
    r = y * y
    if math.hypot(x, y) + r >= 1.0:
        return False
    if 1.0 / (1.0 - y) ** 2 >= 2.0:
        return False
    # conservative per-term denominator: both printed estimate forms and the
    # exact distance from the centre to the landing interval's endpoints
    inner = 2.0 ** (-2 * (n + 1)) - y * y
    if inner < 0.0:
        return False
    d1 = math.sqrt(inner) + r
    d2 = math.sqrt(2.0 ** (-2 * (n + 1)) + y * y) - r
    d3 = math.sqrt(2.0 ** (-2 * (n + 2)) + y * y) - r
    den = min(d1, d2, d3)
    if den <= 0.0:
        return False
    return r / den ** 2 < 2.0 ** -(n + 1)


def build_cheese(n_max: int, precision_floor: int = 40) -> CheeseSet:
    """Construct the disc family for levels 1..n_max and certify it.

    Heights descend through powers of two from 1/2; the first (largest)
    admissible power wins, which keeps the construction deterministic.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    discs = []
    for n in range(1, n_max + 1):
        chosen = None
        for m in range(1, precision_floor + 1):
            y = 2.0 ** -m
            if _admissible(n, y):
                chosen = y
                break
        if chosen is None:
            raise ConstructionFailedError(n)
        discs.append(Disc(complex(midpoint(n), chosen), chosen * chosen))
    return CheeseSet(discs)


# ---------------------------------------------------------------------------
# rational probe functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalFunction:
    """constant + sum_k residue_k / (z - pole_k), with its derivative."""

    poles: Tuple[complex, ...]
    residues: Tuple[complex, ...]
    constant: complex = 0j

    def __post_init__(self):
        if len(self.poles) != len(self.residues):
            raise ValueError("poles and residues must pair up")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant, dtype=complex)
        for p, res in zip(self.poles, self.residues):
            out = out + res / (z - p)
        return out if out.shape else complex(out)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for p, res in zip(self.poles, self.residues):
            out = out - res / (z - p) ** 2
        return out if out.shape else complex(out)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.poles + other.poles,
                                self.residues + other.residues,
                                self.constant + other.constant)


def pole_probe(X: CheeseSet, n: int) -> RationalFunction:
    """The unit-sup probe for disc n: radius over the distance to its centre.

    Its sup over the set is exactly 1, attained on the disc's boundary
    circle, and its derivative at the disc's ground point x_n has modulus
    exactly radius / height^2 = 1.
    """
    disc = X.disc(n)
    return RationalFunction((disc.center,), (disc.radius,))


# ---------------------------------------------------------------------------
# verification sweeps
# ---------------------------------------------------------------------------

@dataclass
class CheeseVerification:
    """Grid-certified summary of the construction."""

    n_max: int
    grid: int
    margins: GeometryMargins
    max_sum: float
    max_certified: float
    per_term_margin: float  # min over (n, x off I_n) of 2^-(n+1) - r_n/s_n^2
    bound_threshold: float = 6.5
    per_term_tol: float = 1e-12

    @property
    def geometry_ok(self) -> bool:
        return self.margins.all_positive

    @property
    def bound_ok(self) -> bool:
        return self.max_certified < self.bound_threshold

    @property
    def per_term_ok(self) -> bool:
        return self.per_term_margin > -self.per_term_tol

    @property
    def passed(self) -> bool:
        return self.geometry_ok and self.bound_ok and self.per_term_ok

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max, "grid": self.grid,
            "margins": {"containment": self.margins.containment,
                        "disjointness": self.margins.disjointness,
                        "interval_gap": self.margins.interval_gap},
            "max_sum": self.max_sum, "max_certified": self.max_certified,
            "per_term_margin": self.per_term_margin,
            "bound_threshold": self.bound_threshold,
            "geometry_ok": self.geometry_ok, "bound_ok": self.bound_ok,
            "per_term_ok": self.per_term_ok, "passed": self.passed,
        }


def interval_grid(points: int) -> np.ndarray:
    return np.linspace(INTERVAL[0], INTERVAL[1], points)


def verify_cheese(X: CheeseSet, grid: int = 2001) -> CheeseVerification:
    """Re-certify geometry, the per-term dyadic bounds, and the full sum.

    The per-term check r_n / s_n(x)^2 < 2^-(n+1) runs over every grid
    point outside disc n's landing interval; on the landing interval the
    term is instead covered by the uniform bound below 2, which the
    admissibility of the height guarantees.
    """
    xs = interval_grid(grid)
    sums, certified = X.bound_sum_grid(xs)
    per_term_margin = math.inf
    for n in range(1, X.n_max + 1):
        disc = X.disc(n)
        lo, hi = landing_interval(n)
        outside = (xs < lo) | (xs >= hi)
        s = np.abs(xs[outside] - disc.center) - disc.radius
        terms = disc.radius / s ** 2
        margin = float((2.0 ** -(n + 1) - terms).min())
        per_term_margin = min(per_term_margin, margin)
    return CheeseVerification(
        n_max=X.n_max, grid=grid, margins=X.margins,
        max_sum=float(sums.max()), max_certified=float(certified.max()),
        per_term_margin=per_term_margin)


@dataclass
class DerivativeBoundReport:
    """Sampled check of |f'| on the interval against the certified constant."""

    max_derivative: float
    sup_estimate: float
    ratio: float
    certified_constant: float
    grid_tolerance: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.certified_constant + self.grid_tolerance

    def to_dict(self) -> dict:
        return {"max_derivative": self.max_derivative,
                "sup_estimate": self.sup_estimate, "ratio": self.ratio,
                "certified_constant": self.certified_constant,
                "grid_tolerance": self.grid_tolerance, "passed": self.passed}


def derivative_bound_check(X: CheeseSet, f: RationalFunction,
                           grid: int = 2001, boundary_points: int = 4096,
                           disc_points: int = 256,
                           grid_tolerance: float = 1e-6) -> DerivativeBoundReport:
    """Estimate |f| on the set and |f'| on the interval; compare their ratio
    with the grid-certified bound constant.

    Poles must sit strictly inside removed discs or outside the closed unit
    disc.  The sup of a rational function over the set is attained on its
    boundary (maximum modulus), so boundary sampling estimates it from
    below; the reported ratio is accordingly an upper estimate and is
    allowed the stated grid tolerance.
    """
    for p in f.poles:
        inside_removed = any(abs(p - d.center) < d.radius for d in X.discs)
        if not inside_removed and abs(p) <= 1.0:
            raise PoleInXError(f"pole {p} lies in the certified region")
    xs = interval_grid(grid)
    theta = np.exp(2j * np.pi * np.arange(boundary_points) / boundary_points)
    samples = [np.abs(f(theta)), np.abs(f(xs))]
    small = np.exp(2j * np.pi * np.arange(disc_points) / disc_points)
    for d in X.discs:
        samples.append(np.abs(f(d.center + d.radius * small)))
    sup_estimate = float(max(s.max() for s in samples))
    max_derivative = float(np.abs(f.derivative(xs)).max())
    verification = verify_cheese(X, grid)
    ratio = max_derivative / sup_estimate if sup_estimate > 0 else 0.0
    return DerivativeBoundReport(
        max_derivative=max_derivative, sup_estimate=sup_estimate, ratio=ratio,
        certified_constant=verification.max_certified,
        grid_tolerance=grid_tolerance)


@dataclass
class NoncompactnessReport:
    """The unit-diagonal pattern demonstrating failure of compactness.

    ``matrix`` holds |f_n'(x_m)| for n, m up to n_hi: exactly 1 on the
    diagonal, vanishing down each column.  ``separations`` holds the grid
    maxima of |f_i' - f_j'| over the interval (with the ground points
    included among the evaluation points): every pair stays far apart, so
    no subsequence of the image probes can converge.
    """

    matrix: np.ndarray
    separations: np.ndarray
    diag_error: float
    min_separation: float
    diag_tol: float = 1e-12
    separation_floor: float = 0.7

    @property
    def diagonal_ok(self) -> bool:
        return self.diag_error <= self.diag_tol

    @property
    def separation_ok(self) -> bool:
        return self.min_separation >= self.separation_floor

    @property
    def passed(self) -> bool:
        return self.diagonal_ok and self.separation_ok

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.tolist(),
                "separations": self.separations.tolist(),
                "diag_error": self.diag_error,
                "min_separation": self.min_separation,
                "diag_tol": self.diag_tol,
                "separation_floor": self.separation_floor,
                "diagonal_ok": self.diagonal_ok,
                "separation_ok": self.separation_ok,
                "passed": self.passed}


def noncompact_report(X: CheeseSet, n_hi: Optional[int] = None,
                      grid: int = 2001) -> NoncompactnessReport:
    """Evaluate the probe derivatives pairwise and certify their separation.

    Evaluation points are the uniform interval grid plus the ground points
    x_m themselves; the per-term dyadic certificates make
    |f_i'(x_j)| < 2^-(i+1) for i != j while |f_j'(x_j)| = 1, so every
    pairwise sup distance exceeds 3/4 up to grid slack.
    """
    n_hi = X.n_max if n_hi is None else n_hi
    if not 1 <= n_hi <= X.n_max:
        raise ValueError("n_hi must lie in 1..n_max")
    centers = np.array([X.disc(n).center for n in range(1, n_hi + 1)])
    radii = np.array([X.disc(n).radius for n in range(1, n_hi + 1)])
    ground = centers.real
    points = np.concatenate([interval_grid(grid), ground])
    # complex derivative values of every probe at every evaluation point
    values = -radii[None, :] / (points[:, None] - centers[None, :]) ** 2
    matrix = np.abs(values[grid:, :]).T  # rows n, columns m: |f_n'(x_m)|
    stable_diag = radii / centers.imag ** 2
    diag_error = float(np.abs(np.diagonal(matrix) - 1.0).max())
    diag_error = max(diag_error, float(np.abs(stable_diag - 1.0).max()))
    separations = np.zeros((n_hi, n_hi))
    for i in range(n_hi):
        for j in range(i + 1, n_hi):
            sep = float(np.abs(values[:, i] - values[:, j]).max())
            separations[i, j] = separations[j, i] = sep
    off_diag = separations[~np.eye(n_hi, dtype=bool)]
    min_separation = float(off_diag.min()) if off_diag.size else math.inf
    return NoncompactnessReport(
        matrix=matrix, separations=separations, diag_error=diag_error,
        min_separation=min_separation)
