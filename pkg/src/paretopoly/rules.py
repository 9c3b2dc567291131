"""Polynomial decision rules x(u) and their monomial machinery.

A rule maps the first k-1 objective values u to a point x(u) in decision
space.  Coefficients are stored dense against a fixed graded-lex monomial
basis so solver columns and JSON exports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import DimensionMismatch, UnsupportedDimension

__all__ = [
    "MonomialBasis",
    "Polynomial",
    "PolynomialRule",
    "QuadraticRuleView",
    "objective_curve",
    "substitute_affine",
]


def _grlex_exponents(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors with total degree <= degree, graded-lex order.

    Within one total degree, exponents are ordered lexicographically with
    the first variable dominant: (2,0) before (1,1) before (0,2).
    """
    out: list[tuple[int, ...]] = []
    for d in range(degree + 1):
        level = []
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for idx in combo:
                e[idx] += 1
            level.append(tuple(e))
        level.sort(reverse=True)
        out.extend(level)
    return tuple(out)


@dataclass(frozen=True)
class MonomialBasis:
    """Monomials u^a with sum(a) <= degree in `vars` variables."""

    vars: int
    degree: int
    exponents: tuple[tuple[int, ...], ...]

    @classmethod
    def create(cls, nvars: int, degree: int) -> "MonomialBasis":
        if nvars < 1 or degree < 0:
            raise ValueError("basis needs vars >= 1 and degree >= 0")
        return cls(nvars, degree, _grlex_exponents(nvars, degree))

    def __len__(self) -> int:
        return len(self.exponents)

    def index_of(self, exponent: tuple[int, ...]) -> int:
        return self.exponents.index(tuple(exponent))

    def evaluate(self, u) -> np.ndarray:
        """Vector of monomial values at u, in basis order."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape != (self.vars,):
            raise DimensionMismatch(
                f"point has dim {u.shape}, basis has {self.vars} vars"
            )
        vals = np.empty(len(self.exponents))
        for i, a in enumerate(self.exponents):
            v = 1.0
            for uj, aj in zip(u, a):
                if aj:
                    v *= uj**aj
            vals[i] = v
        return vals

    def derivative_map(self, var: int) -> np.ndarray:
        """Matrix D with D @ coeffs = coeffs of d/du_var, in the same basis."""
        n = len(self.exponents)
        index = {a: i for i, a in enumerate(self.exponents)}
        D = np.zeros((n, n))
        for j, a in enumerate(self.exponents):
            if a[var] == 0:
                continue
            da = list(a)
            da[var] -= 1
            D[index[tuple(da)], j] = a[var]
        return D


@dataclass(frozen=True)
class Polynomial:
    """Scalar polynomial: coefficient vector against a MonomialBasis."""

    basis: MonomialBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (len(self.basis),):
            raise DimensionMismatch("coefficient length does not match basis")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, nvars: int, terms: dict) -> "Polynomial":
        """Build from {exponent tuple: coefficient}."""
        degree = max((sum(a) for a in terms), default=0)
        basis = MonomialBasis.create(nvars, degree)
        c = np.zeros(len(basis))
        for a, v in terms.items():
            c[basis.index_of(tuple(a))] += v
        return cls(basis, c)

    def __call__(self, u) -> float:
        return float(self.coeffs @ self.basis.evaluate(u))

    def degree(self) -> int:
        nonzero = [sum(a) for a, c in zip(self.basis.exponents, self.coeffs) if c != 0.0]
        return max(nonzero, default=0)

    def terms(self) -> dict:
        return {
            a: float(c)
            for a, c in zip(self.basis.exponents, self.coeffs)
            if c != 0.0
        }

    def to_json(self) -> dict:
        return {
            "vars": self.basis.vars,
            "degree": self.basis.degree,
            "exponents": [list(a) for a in self.basis.exponents],
            "coeffs": [float(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Polynomial":
        basis = MonomialBasis.create(int(doc["vars"]), int(doc["degree"]))
        got = tuple(tuple(int(x) for x in a) for a in doc["exponents"])
        if got != basis.exponents:
            raise DimensionMismatch("exponent list is not in canonical order")
        return cls(basis, np.asarray(doc["coeffs"], dtype=float))


@dataclass(frozen=True)
class PolynomialRule:
    """Vector polynomial x(u): row i of coeffs holds x_i's coefficients."""

    basis: MonomialBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[1] != len(self.basis):
            raise DimensionMismatch("coeffs must be n x |basis|")
        if not np.all(np.isfinite(c)):
            raise ValueError("rule coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def evaluate(self, u) -> np.ndarray:
        return self.coeffs @ self.basis.evaluate(u)

    def gradient(self, u) -> np.ndarray:
        """Exact Jacobian dx/du at u, shape n x vars."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        mono = self.basis.evaluate(u)
        jac = np.empty((self.n, self.basis.vars))
        for v in range(self.basis.vars):
            jac[:, v] = (self.coeffs @ self.basis.derivative_map(v).T) @ mono
        return jac

    def component(self, i: int) -> Polynomial:
        return Polynomial(self.basis, self.coeffs[i].copy())

    def to_json(self) -> dict:
        return {
            "vars": self.basis.vars,
            "degree": self.basis.degree,
            "exponents": [list(a) for a in self.basis.exponents],
            "coeffs": [[float(c) for c in row] for row in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PolynomialRule":
        basis = MonomialBasis.create(int(doc["vars"]), int(doc["degree"]))
        got = tuple(tuple(int(x) for x in a) for a in doc["exponents"])
        if got != basis.exponents:
            raise DimensionMismatch("exponent list is not in canonical order")
        return cls(basis, np.asarray(doc["coeffs"], dtype=float))


@dataclass(frozen=True)
class QuadraticRuleView:
    """Structured view x_i(u) = alpha0_i + alpha1_i' u + u' Gamma_i u.

    Gamma_i is stored symmetric; the shape-constraint builders require
    that symmetry.
    """

    alpha0: np.ndarray  # (n,)
    alpha1: np.ndarray  # (n, vars)
    gamma: np.ndarray  # (n, vars, vars), each slice symmetric

    @classmethod
    def from_rule(cls, rule: PolynomialRule) -> "QuadraticRuleView":
        basis = rule.basis
        if basis.degree > 2:
            raise DimensionMismatch("quadratic view requires degree <= 2")
        v = basis.vars
        n = rule.n
        alpha0 = np.zeros(n)
        alpha1 = np.zeros((n, v))
        gamma = np.zeros((n, v, v))
        for col, a in enumerate(basis.exponents):
            d = sum(a)
            if d == 0:
                alpha0 = rule.coeffs[:, col].copy()
            elif d == 1:
                j = a.index(1)
                alpha1[:, j] = rule.coeffs[:, col]
            else:
                nz = [j for j, aj in enumerate(a) if aj]
                if len(nz) == 1:
                    gamma[:, nz[0], nz[0]] = rule.coeffs[:, col]
                else:
                    j, l = nz
                    gamma[:, j, l] = rule.coeffs[:, col] / 2.0
                    gamma[:, l, j] = rule.coeffs[:, col] / 2.0
        return cls(alpha0, alpha1, gamma)

    def to_rule(self) -> PolynomialRule:
        n, v = self.alpha1.shape
        basis = MonomialBasis.create(v, 2)
        coeffs = np.zeros((n, len(basis)))
        for col, a in enumerate(basis.exponents):
            d = sum(a)
            if d == 0:
                coeffs[:, col] = self.alpha0
            elif d == 1:
                coeffs[:, col] = self.alpha1[:, a.index(1)]
            else:
                nz = [j for j, aj in enumerate(a) if aj]
                if len(nz) == 1:
                    coeffs[:, col] = self.gamma[:, nz[0], nz[0]]
                else:
                    j, l = nz
                    coeffs[:, col] = self.gamma[:, j, l] + self.gamma[:, l, j]
        return PolynomialRule(basis, coeffs)


def objective_curve(rule: PolynomialRule, molp, u) -> np.ndarray:
    """All k objective values of the rule at u: (c^1'x(u), ..., c^k'x(u))."""
    x = rule.evaluate(u)
    C = np.asarray(molp.objectives, dtype=float)
    if C.shape[1] != x.shape[0]:
        raise DimensionMismatch("rule dimension does not match objectives")
    return C @ x


def substitute_affine(rule: PolynomialRule, transform):
    """Rewrite a univariate rule as an expression linear in the lifted vector.

    With t = affine(s) and zeta = (s, s^2, ..., s^d), returns (const, coef)
    such that x(t) = const + coef @ zeta for every s.  Only the k=2
    (scalar u) path supports this lift.
    """
    if rule.basis.vars != 1:
        raise UnsupportedDimension("affine substitution is only defined for scalar u")
    d = rule.basis.degree
    if transform.degree != d:
        raise DimensionMismatch("transform degree must match rule degree")
    # columns: power 0 first in grlex order for one variable
    alpha0 = rule.coeffs[:, 0]
    higher = rule.coeffs[:, 1:]  # n x d, power p at column p-1
    const = alpha0 + higher @ transform.d
    coef = higher @ transform.D
    return const, coef
