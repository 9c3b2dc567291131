"""Regions of interest U in the first k-1 objective coordinates.

Each variant converts to the canonical forms the reformulations need:
polyhedral face data, ellipsoid data, a semialgebraic description, and
the univariate moment-set transform used by the k=2 interval path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatch,
    EmptyRegion,
    InvalidBound,
    UnsupportedRegion,
)
from .rules import MonomialBasis, Polynomial

__all__ = [
    "Interval",
    "Box",
    "Polyhedron",
    "Ball",
    "Ellipsoid",
    "Semialgebraic",
    "Region",
    "MomentTransform",
    "MomentSetZ",
    "contains",
    "to_semialgebraic",
    "add_compactness_certificate",
    "moment_interval_transform",
    "build_moment_set",
    "sample",
    "monomial_moments",
    "chebyshev_center",
    "region_to_json",
    "region_from_json",
]

_CONTAIN_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("interval needs a < b")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatch("box bounds must be vectors of equal length")
        if not np.all(lo < hi):
            raise ValueError("box needs lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]


@dataclass(frozen=True)
class Polyhedron:
    """Pu <= q; must be bounded and nonempty (checked via LPs)."""

    P: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        if P.shape[0] != q.shape[0]:
            raise DimensionMismatch("P rows must match q length")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "q", q)
        for j in range(P.shape[1]):
            for sign in (1.0, -1.0):
                c = np.zeros(P.shape[1])
                c[j] = -sign
                res = linprog(c, A_ub=P, b_ub=q, bounds=(None, None), method="highs")
                if res.status == 2:
                    raise EmptyRegion("polyhedron is empty")
                if res.status == 3:
                    raise ValueError("polyhedron must be bounded")

    @property
    def dim(self) -> int:
        return self.P.shape[1]


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("ball needs radius > 0")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class Ellipsoid:
    """(u - center)' E (u - center) <= 1 with E symmetric positive definite."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        E = np.atleast_2d(np.asarray(self.shape, dtype=float))
        if E.shape != (c.shape[0], c.shape[0]):
            raise DimensionMismatch("shape matrix must be square of the center's dim")
        if not np.allclose(E, E.T, atol=1e-12):
            raise ValueError("shape matrix must be symmetric")
        if np.linalg.eigvalsh(E).min() <= 0:
            raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", E)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def inverse_sqrt(self) -> np.ndarray:
        w, V = np.linalg.eigh(self.shape)
        return V @ np.diag(1.0 / np.sqrt(w)) @ V.T


@dataclass(frozen=True)
class Semialgebraic:
    """{u : p_i(u) <= 0 for all i}; bbox is an optional enclosing box hint."""

    polys: tuple
    bbox: Optional[tuple] = None  # (lo array, hi array)

    def __post_init__(self):
        polys = tuple(self.polys)
        if not polys:
            raise ValueError("semialgebraic region needs at least one polynomial")
        dims = {p.basis.vars for p in polys}
        if len(dims) != 1:
            raise DimensionMismatch("all region polynomials must share a dimension")
        object.__setattr__(self, "polys", polys)

    @property
    def dim(self) -> int:
        return self.polys[0].basis.vars


Region = Union[Interval, Box, Polyhedron, Ball, Ellipsoid, Semialgebraic]


def _check_dim(region: Region, u: np.ndarray):
    if u.shape != (region.dim,):
        raise DimensionMismatch(
            f"point has shape {u.shape}, region has dim {region.dim}"
        )


def contains(region: Region, u, tol: float = _CONTAIN_TOL) -> bool:
    """True iff u satisfies the region's defining inequalities within tol."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    _check_dim(region, u)
    if isinstance(region, Interval):
        return region.a - tol <= u[0] <= region.b + tol
    if isinstance(region, Box):
        return bool(np.all(u >= region.lo - tol) and np.all(u <= region.hi + tol))
    if isinstance(region, Polyhedron):
        return bool(np.all(region.P @ u <= region.q + tol))
    if isinstance(region, Ball):
        return float(np.linalg.norm(u - region.center)) <= region.radius + tol
    if isinstance(region, Ellipsoid):
        d = u - region.center
        return float(d @ region.shape @ d) <= 1.0 + tol
    if isinstance(region, Semialgebraic):
        return all(p(u) <= tol for p in region.polys)
    raise UnsupportedRegion(f"unknown region type {type(region)!r}")


def _linear_poly(nvars: int, coef: np.ndarray, const: float) -> Polynomial:
    terms = {tuple(0 for _ in range(nvars)): const}
    for j, c in enumerate(coef):
        if c != 0.0:
            e = [0] * nvars
            e[j] = 1
            terms[tuple(e)] = float(c)
    return Polynomial.from_terms(nvars, terms)


def _quadratic_poly(E: np.ndarray, center: np.ndarray, rhs: float) -> Polynomial:
    """(u-c)' E (u-c) - rhs as a Polynomial (<= 0 form)."""
    v = center.shape[0]
    terms: dict = {}
    const = float(center @ E @ center) - rhs

    def add(e, val):
        terms[e] = terms.get(e, 0.0) + val

    add(tuple(0 for _ in range(v)), const)
    lin = -2.0 * (E @ center)
    for j in range(v):
        if lin[j] != 0.0:
            e = [0] * v
            e[j] = 1
            add(tuple(e), float(lin[j]))
    for i in range(v):
        for j in range(i, v):
            val = E[i, j] if i == j else E[i, j] + E[j, i]
            if val != 0.0:
                e = [0] * v
                e[i] += 1
                e[j] += 1
                add(tuple(e), float(val))
    return Polynomial.from_terms(v, terms)


def to_semialgebraic(region: Region) -> Semialgebraic:
    """Equivalent polynomial description {p_i(u) <= 0}."""
    if isinstance(region, Semialgebraic):
        return region
    if isinstance(region, Interval):
        lo = _linear_poly(1, np.array([-1.0]), region.a)
        hi = _linear_poly(1, np.array([1.0]), -region.b)
        return Semialgebraic((lo, hi), bbox=(np.array([region.a]), np.array([region.b])))
    if isinstance(region, Box):
        polys = []
        v = region.dim
        for j in range(v):
            e = np.zeros(v)
            e[j] = 1.0
            polys.append(_linear_poly(v, -e, float(region.lo[j])))
            polys.append(_linear_poly(v, e, -float(region.hi[j])))
        return Semialgebraic(tuple(polys), bbox=(region.lo.copy(), region.hi.copy()))
    if isinstance(region, Polyhedron):
        polys = tuple(
            _linear_poly(region.dim, region.P[i], -float(region.q[i]))
            for i in range(region.P.shape[0])
        )
        lo, hi = _polyhedron_bbox(region)
        return Semialgebraic(polys, bbox=(lo, hi))
    if isinstance(region, Ball):
        E = np.eye(region.dim) / region.radius**2
        poly = _quadratic_poly(E, region.center, 1.0)
        r = region.radius
        return Semialgebraic(
            (poly,), bbox=(region.center - r, region.center + r)
        )
    if isinstance(region, Ellipsoid):
        poly = _quadratic_poly(region.shape, region.center, 1.0)
        half = np.sqrt(np.diag(np.linalg.inv(region.shape)))
        return Semialgebraic(
            (poly,), bbox=(region.center - half, region.center + half)
        )
    raise UnsupportedRegion(f"unknown region type {type(region)!r}")


def _polyhedron_bbox(region: Polyhedron):
    v = region.dim
    lo = np.empty(v)
    hi = np.empty(v)
    for j in range(v):
        c = np.zeros(v)
        c[j] = 1.0
        res = linprog(c, A_ub=region.P, b_ub=region.q, bounds=(None, None), method="highs")
        lo[j] = res.fun
        res = linprog(-c, A_ub=region.P, b_ub=region.q, bounds=(None, None), method="highs")
        hi[j] = -res.fun
    return lo, hi


def add_compactness_certificate(s: Semialgebraic, R: float) -> Semialgebraic:
    """Append the ball polynomial sum(u_i^2) - R <= 0 without changing the set.

    The bound is checked against the worst case of ||u||^2 over the
    region's bounding box when one is known.
    """
    if s.bbox is not None:
        lo, hi = s.bbox
        worst = float(np.sum(np.maximum(lo**2, hi**2)))
        if worst > R + 1e-9:
            raise InvalidBound(
                f"R={R} is below the bounding-box worst case {worst}"
            )
    v = s.dim
    terms = {tuple(0 for _ in range(v)): -float(R)}
    for j in range(v):
        e = [0] * v
        e[j] = 2
        terms[tuple(e)] = 1.0
    ball = Polynomial.from_terms(v, terms)
    return Semialgebraic(s.polys + (ball,), bbox=s.bbox)


# ---------------------------------------------------------------------------
# Univariate moment machinery (k = 2 interval path)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentTransform:
    """Affine power lift: (t, ..., t^degree) = D (s, ..., s^degree) + d.

    Here t = ((b-a)/2) s + (a+b)/2 maps s in [-1,1] onto [a,b]; D is
    lower triangular.
    """

    D: np.ndarray
    d: np.ndarray
    degree: int
    a: float
    b: float


def moment_interval_transform(a: float, b: float, degree: int) -> MomentTransform:
    if not a < b:
        raise ValueError("needs a < b")
    if degree < 1:
        raise ValueError("needs degree >= 1")
    h = (b - a) / 2.0
    m = (a + b) / 2.0
    D = np.zeros((degree, degree))
    d = np.zeros(degree)
    for j in range(1, degree + 1):
        # expand (h s + m)^j in powers of s
        for i in range(1, j + 1):
            D[j - 1, i - 1] = comb(j, i) * h**i * m ** (j - i)
        d[j - 1] = m**j
    return MomentTransform(D, d, degree, float(a), float(b))


@dataclass(frozen=True)
class MomentSetZ:
    """Convex hull of {(s, s^2, ..., s^degree) : -1 <= s <= 1}.

    Represented as Z = {zeta : (1, zeta) = M' lambda, Hankel(lambda) >= 0}
    over the pseudo-moment vector lambda_0..lambda_{2 degree}; the map M
    comes from the half-angle substitution s = 2t/(1+t^2), so column j of
    M holds the coefficients of (2t)^j (1+t^2)^(degree-j).
    """

    degree: int
    M: np.ndarray  # (2*degree+1) x (degree+1)

    @property
    def hankel_order(self) -> int:
        return self.degree + 1

    @property
    def num_lambda(self) -> int:
        return 2 * self.degree + 1

    def hankel(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        r = self.hankel_order
        H = np.empty((r, r))
        for i in range(r):
            for j in range(r):
                H[i, j] = lam[i + j]
        return H

    def dirac_lambda(self, s: float) -> np.ndarray:
        """Explicit witness lambda for the point (s, ..., s^degree).

        Uses the half-angle parameter t with 2t/(1+t^2) = s and scales the
        Dirac moment vector at t so the normalization row equals one.
        """
        if abs(s) > 1.0:
            raise ValueError("s must lie in [-1, 1]")
        t = 0.0 if s == 0.0 else (1.0 - np.sqrt(1.0 - s * s)) / s
        scale = (1.0 + t * t) ** self.degree
        return np.array([t**i / scale for i in range(self.num_lambda)])


def build_moment_set(degree: int) -> MomentSetZ:
    if degree < 1:
        raise ValueError("needs degree >= 1")
    rows = 2 * degree + 1
    M = np.zeros((rows, degree + 1))
    for j in range(degree + 1):
        # coefficients of (2t)^j (1+t^2)^(degree-j)
        for l in range(degree - j + 1):
            M[j + 2 * l, j] = 2.0**j * comb(degree - j, l)
    return MomentSetZ(degree, M)


# ---------------------------------------------------------------------------
# Sampling and moments
# ---------------------------------------------------------------------------


def chebyshev_center(P: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Center of the largest inscribed ball of {Pu <= q}."""
    norms = np.linalg.norm(P, axis=1)
    v = P.shape[1]
    c = np.zeros(v + 1)
    c[-1] = -1.0
    A = np.hstack([P, norms[:, None]])
    res = linprog(c, A_ub=A, b_ub=q, bounds=(None, None), method="highs")
    if res.status != 0 or res.x[-1] <= 0:
        raise EmptyRegion("polyhedron has no interior")
    return res.x[:-1]


def _hit_and_run(P, q, count, rng, dim):
    """Hit-and-run over {Pu <= q}: burn-in 100*dim, thinning 10."""
    x = chebyshev_center(P, q)
    burn = 100 * dim
    thin = 10
    out = np.empty((count, dim))
    kept = 0
    step = 0
    while kept < count:
        d = rng.standard_normal(dim)
        d /= np.linalg.norm(d)
        Pd = P @ d
        slack = q - P @ x
        tmax = np.inf
        tmin = -np.inf
        pos = Pd > 1e-14
        neg = Pd < -1e-14
        if np.any(pos):
            tmax = np.min(slack[pos] / Pd[pos])
        if np.any(neg):
            tmin = np.max(slack[neg] / Pd[neg])
        if not np.isfinite(tmax) or not np.isfinite(tmin) or tmax < tmin:
            step += 1
            continue
        x = x + rng.uniform(tmin, tmax) * d
        step += 1
        if step > burn and (step - burn) % thin == 0:
            out[kept] = x
            kept += 1
    return out


def sample(region: Region, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic samples inside the region, shape (count, dim).

    Interval: equispaced including endpoints.  Ball/Ellipsoid: exact
    volume-uniform draws.  Box/Polyhedron: hit-and-run from the
    Chebyshev center.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(region, Interval):
        if count == 1:
            return np.array([[(region.a + region.b) / 2.0]])
        return np.linspace(region.a, region.b, count)[:, None]
    if isinstance(region, Ball):
        dim = region.dim
        d = rng.standard_normal((count, dim))
        d /= np.linalg.norm(d, axis=1)[:, None]
        r = region.radius * rng.uniform(0.0, 1.0, count) ** (1.0 / dim)
        return region.center[None, :] + r[:, None] * d
    if isinstance(region, Ellipsoid):
        dim = region.dim
        d = rng.standard_normal((count, dim))
        d /= np.linalg.norm(d, axis=1)[:, None]
        r = rng.uniform(0.0, 1.0, count) ** (1.0 / dim)
        B = region.inverse_sqrt()
        return region.center[None, :] + (r[:, None] * d) @ B.T
    if isinstance(region, Box):
        P = np.vstack([np.eye(region.dim), -np.eye(region.dim)])
        q = np.concatenate([region.hi, -region.lo])
        return _hit_and_run(P, q, count, rng, region.dim)
    if isinstance(region, Polyhedron):
        return _hit_and_run(region.P, region.q, count, rng, region.dim)
    if isinstance(region, Semialgebraic):
        # rejection from the bounding box; requires a bbox hint
        if region.bbox is None:
            raise UnsupportedRegion("sampling a raw semialgebraic set needs a bbox")
        lo, hi = region.bbox
        out = np.empty((count, region.dim))
        kept = 0
        attempts = 0
        while kept < count:
            u = rng.uniform(lo, hi)
            attempts += 1
            if contains(region, u, tol=0.0):
                out[kept] = u
                kept += 1
            if attempts > 10000 * count:
                raise EmptyRegion("rejection sampling failed; region may be empty")
        return out
    raise UnsupportedRegion(f"unknown region type {type(region)!r}")


def monomial_moments(region: Region, exponents) -> np.ndarray:
    """Exact integrals of u^a over an Interval or Box, one per exponent."""
    if isinstance(region, Interval):
        out = []
        for a in exponents:
            p = int(a[0]) if isinstance(a, (tuple, list, np.ndarray)) else int(a)
            out.append((region.b ** (p + 1) - region.a ** (p + 1)) / (p + 1))
        return np.array(out)
    if isinstance(region, Box):
        out = []
        for a in exponents:
            a = np.atleast_1d(np.asarray(a, dtype=int))
            if a.shape != (region.dim,):
                raise DimensionMismatch("exponent length must match region dim")
            val = 1.0
            for lo, hi, p in zip(region.lo, region.hi, a):
                val *= (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)
            out.append(val)
        return np.array(out)
    raise UnsupportedRegion(
        "closed-form moments exist only for Interval/Box; use the sampled objective"
    )


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def region_to_json(region: Region) -> dict:
    if isinstance(region, Interval):
        return {"type": "interval", "a": region.a, "b": region.b}
    if isinstance(region, Box):
        return {"type": "box", "lo": region.lo.tolist(), "hi": region.hi.tolist()}
    if isinstance(region, Polyhedron):
        return {"type": "polyhedron", "P": region.P.tolist(), "q": region.q.tolist()}
    if isinstance(region, Ball):
        return {"type": "ball", "center": region.center.tolist(), "radius": region.radius}
    if isinstance(region, Ellipsoid):
        return {
            "type": "ellipsoid",
            "center": region.center.tolist(),
            "shape": region.shape.tolist(),
        }
    if isinstance(region, Semialgebraic):
        doc = {"type": "semialgebraic", "polys": [p.to_json() for p in region.polys]}
        if region.bbox is not None:
            doc["bbox"] = {"lo": region.bbox[0].tolist(), "hi": region.bbox[1].tolist()}
        return doc
    raise UnsupportedRegion(f"unknown region type {type(region)!r}")


def region_from_json(doc: dict) -> Region:
    kind = doc.get("type")
    if kind == "interval":
        return Interval(float(doc["a"]), float(doc["b"]))
    if kind == "box":
        return Box(np.asarray(doc["lo"], dtype=float), np.asarray(doc["hi"], dtype=float))
    if kind == "polyhedron":
        return Polyhedron(np.asarray(doc["P"], dtype=float), np.asarray(doc["q"], dtype=float))
    if kind == "ball":
        return Ball(np.asarray(doc["center"], dtype=float), float(doc["radius"]))
    if kind == "ellipsoid":
        return Ellipsoid(
            np.asarray(doc["center"], dtype=float), np.asarray(doc["shape"], dtype=float)
        )
    if kind == "semialgebraic":
        polys = tuple(Polynomial.from_json(p) for p in doc["polys"])
        bbox = None
        if "bbox" in doc:
            bbox = (
                np.asarray(doc["bbox"]["lo"], dtype=float),
                np.asarray(doc["bbox"]["hi"], dtype=float),
            )
        return Semialgebraic(polys, bbox=bbox)
    raise UnsupportedRegion(f"unknown region type {kind!r}")
