"""Quasi-homogeneous polynomials with exact rational weights.

A polynomial W in N complex variables is stored as an exponent matrix B
(one row per monomial) together with complex coefficients.  The weight
vector q is the unique exact-rational solution of B q = (1, ..., 1); all
weight arithmetic stays in Fraction so that downstream integrality tests
never see floating-point ties.  Evaluation, gradients and Hessians are
double-precision complex.
"""

from __future__ import annotations

import cmath
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "PolynomialError",
    "WeightError",
    "QHPoly",
    "compute_weights",
    "parse_polynomial",
    "value",
    "gradient",
    "hessian",
    "growth_exponents",
    "milnor_number",
    "check_nondegenerate",
]

# Short variable aliases accepted in text input for up to four variables.
_ALIAS = {"x": 0, "y": 1, "z": 2, "w": 3}


class PolynomialError(ValueError):
    """Raised on malformed polynomial input."""


class WeightError(ValueError):
    """Raised when no valid weight system exists."""


@dataclass(frozen=True)
class QHPoly:
    """A quasi-homogeneous polynomial with its exact weight vector.

    exponents[j][i] is the power of variable i in monomial j; coeffs[j]
    is the (nonzero) complex coefficient of monomial j.
    """

    n_vars: int
    exponents: tuple[tuple[int, ...], ...]
    coeffs: tuple[complex, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n_vars < 1:
            raise PolynomialError("need at least one variable")
        seen = set()
        for row, c in zip(self.exponents, self.coeffs):
            if len(row) != self.n_vars:
                raise PolynomialError("exponent row length mismatch")
            if any(e < 0 for e in row):
                raise PolynomialError("negative exponent")
            if c == 0:
                raise PolynomialError("zero coefficient after merging")
            if row in seen:
                raise PolynomialError(f"duplicate monomial {row}")
            seen.add(row)
        for row in self.exponents:
            total = sum(e * q for e, q in zip(row, self.weights))
            if total != 1:
                raise WeightError(f"monomial {row} has weight {total} != 1")

    @property
    def n_monomials(self) -> int:
        return len(self.exponents)

    @property
    def exponent_matrix(self) -> tuple[tuple[int, ...], ...]:
        return self.exponents

    @staticmethod
    def from_monomials(n_vars: int,
                       monomials: Sequence[tuple[Sequence[int], complex]]) -> "QHPoly":
        """Build a QHPoly from (exponent vector, coefficient) pairs.

        Identical exponent vectors are merged; a merged coefficient of
        zero is an error.
        """
        merged: dict[tuple[int, ...], complex] = {}
        for exps, coeff in monomials:
            key = tuple(int(e) for e in exps)
            merged[key] = merged.get(key, 0) + complex(coeff)
        for key, coeff in merged.items():
            if coeff == 0:
                raise PolynomialError(f"monomial {key} cancels to zero")
        rows = sorted(merged)
        weights = compute_weights(rows)
        return QHPoly(n_vars=n_vars,
                      exponents=tuple(rows),
                      coeffs=tuple(merged[r] for r in rows),
                      weights=weights)

    def text(self) -> str:
        """Render back to the input grammar (variables x1..xN)."""
        parts = []
        for row, c in zip(self.exponents, self.coeffs):
            factors = []
            for i, e in enumerate(row):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            if c == 1:
                head = ""
            elif c.imag == 0:
                head = f"{c.real:g}*"
            else:
                head = f"({c.real:g}{c.imag:+g}i)*"
            parts.append(head + "*".join(factors))
        return " + ".join(parts)


def _solve_exact(B: Sequence[Sequence[int]], rhs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Solve the (possibly overdetermined) system B x = rhs exactly.

    Gaussian elimination over Fraction; raises WeightError when the
    system is rank-deficient in the unknowns or inconsistent.
    """
    rows = [[Fraction(v) for v in row] + [Fraction(r)]
            for row, r in zip(B, rhs)]
    n = len(B[0])
    pivot_rows = []
    used = [False] * len(rows)
    for col in range(n):
        piv = None
        for r in range(len(rows)):
            if not used[r] and rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise WeightError("weight system is rank-deficient (weights not unique)")
        used[piv] = True
        pivot_rows.append((col, piv))
        inv = 1 / rows[piv][col]
        rows[piv] = [v * inv for v in rows[piv]]
        for r in range(len(rows)):
            if r != piv and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[piv])]
    # Remaining rows must have reduced to zero for consistency.
    for r in range(len(rows)):
        if not used[r]:
            if any(v != 0 for v in rows[r]):
                raise WeightError("inconsistent weight system")
    x = [Fraction(0)] * n
    for col, piv in pivot_rows:
        x[col] = rows[piv][-1]
    return tuple(x)


def compute_weights(B: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    """Exact rational weights q with B q = 1 componentwise.

    Every q_i must lie in the open interval (0, 1/2); weights of 1/2 or
    larger (the quadratic A1 direction included) are rejected.
    """
    if not B:
        raise WeightError("empty exponent matrix")
    n = len(B[0])
    q = _solve_exact(B, [Fraction(1)] * len(B))
    for i, qi in enumerate(q):
        if not (0 < qi < Fraction(1, 2)):
            raise WeightError(
                f"weight q_{i + 1} = {qi} outside the open interval (0, 1/2)")
    assert len(q) == n
    return q


_TERM_RE = re.compile(r"\s*([+-])?\s*")


def _parse_coefficient(tok: str) -> complex:
    """Parse 'a', 'bi', or 'a+bi' (optionally parenthesized)."""
    tok = tok.strip()
    if tok.startswith("(") and tok.endswith(")"):
        tok = tok[1:-1].strip()
    m = re.fullmatch(
        r"([+-]?\d+(?:\.\d+)?)?\s*(?:([+-]?\s*\d+(?:\.\d+)?)\s*i)?", tok)
    if m is None or (m.group(1) is None and m.group(2) is None):
        raise PolynomialError(f"bad coefficient {tok!r}")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = float(m.group(2).replace(" ", "")) if m.group(2) else 0.0
    return complex(re_part, im_part)


def parse_polynomial(text: str) -> QHPoly:
    """Parse an expression like "x^3 + x*y^2" or "2*x1^4 + x1*x2^2".

    Terms are separated by top-level + or -.  Each term is an optional
    coefficient followed by '*'-joined variable powers.  Omitted
    coefficients default to 1.  Variables are x1..xN, or x,y,z,w for up
    to four variables.
    """
    s = text.replace(" ", "")
    if not s:
        raise PolynomialError("empty polynomial")
    # Split into signed terms at top level (no parens nesting except coeffs).
    terms: list[tuple[int, str]] = []
    sign, i, depth, start = 1, 0, 0, 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        start = i = 1
    while i <= len(s):
        if i == len(s) or (s[i] in "+-" and depth == 0):
            body = s[start:i]
            if not body:
                raise PolynomialError("empty term")
            terms.append((sign, body))
            if i < len(s):
                sign = -1 if s[i] == "-" else 1
                start = i + 1
        elif s[i] == "(":
            depth += 1
        elif s[i] == ")":
            depth -= 1
        i += 1

    var_indices: set[int] = set()
    parsed: list[tuple[int, complex, list[tuple[int, int]]]] = []
    factor_re = re.compile(r"(x\d+|[xyzw])(?:\^(\d+))?")
    for sgn, body in terms:
        factors = body.split("*")
        coeff = complex(1.0)
        powers: list[tuple[int, int]] = []
        for k, f in enumerate(factors):
            m = factor_re.fullmatch(f)
            if m:
                name, exp = m.group(1), int(m.group(2) or 1)
                if exp < 1:
                    raise PolynomialError(f"exponent must be >= 1 in {f!r}")
                if name.startswith("x") and len(name) > 1 and name[1:].isdigit():
                    idx = int(name[1:]) - 1
                    if idx < 0:
                        raise PolynomialError(f"bad variable {name!r}")
                else:
                    idx = _ALIAS[name]
                powers.append((idx, exp))
                var_indices.add(idx)
            elif k == 0:
                coeff = _parse_coefficient(f)
            else:
                raise PolynomialError(f"bad factor {f!r}")
        if not powers:
            raise PolynomialError(f"constant term {body!r} not allowed")
        parsed.append((sgn, coeff, powers))

    if not var_indices:
        raise PolynomialError("no variables found")
    n_vars = max(var_indices) + 1
    monomials = []
    for sgn, coeff, powers in parsed:
        row = [0] * n_vars
        for idx, exp in powers:
            row[idx] += exp
        monomials.append((row, sgn * coeff))
    return QHPoly.from_monomials(n_vars, monomials)


def _as_vector(W: QHPoly, u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (W.n_vars,):
        raise ValueError(f"expected vector of length {W.n_vars}, got shape {u.shape}")
    return u


def value(W: QHPoly, u) -> complex:
    """Evaluate W at the complex point u."""
    u = _as_vector(W, u)
    total = 0j
    for row, c in zip(W.exponents, W.coeffs):
        term = c
        for ui, e in zip(u, row):
            if e:
                term *= ui ** e
        total += term
    return total


def gradient(W: QHPoly, u) -> np.ndarray:
    """Holomorphic gradient (dW/du_1, ..., dW/du_N) at u."""
    u = _as_vector(W, u)
    g = np.zeros(W.n_vars, dtype=complex)
    for row, c in zip(W.exponents, W.coeffs):
        for i, e in enumerate(row):
            if e == 0:
                continue
            term = c * e
            for k, ek in enumerate(row):
                p = ek - 1 if k == i else ek
                if p:
                    term *= u[k] ** p
            g[i] += term
    return g


def hessian(W: QHPoly, u) -> np.ndarray:
    """Second holomorphic derivative matrix at u (symmetric)."""
    u = _as_vector(W, u)
    H = np.zeros((W.n_vars, W.n_vars), dtype=complex)
    for row, c in zip(W.exponents, W.coeffs):
        for i, ei in enumerate(row):
            for j, ej in enumerate(row):
                if i == j:
                    if ei < 2:
                        continue
                    factor = ei * (ei - 1)
                else:
                    if ei == 0 or ej == 0:
                        continue
                    factor = ei * ej
                term = c * factor
                for k, ek in enumerate(row):
                    p = ek - (1 if k == i else 0) - (1 if k == j else 0)
                    if p:
                        term *= u[k] ** p
                H[i, j] += term
    return H


def growth_exponents(W: QHPoly) -> tuple[Fraction, ...]:
    """Growth exponents q_i / min_j(1 - q_j); all < 1 for valid weights."""
    m = min(1 - q for q in W.weights)
    return tuple(q / m for q in W.weights)


def milnor_number(W: QHPoly) -> int:
    """Milnor number as the exact product of (1/q_i - 1).

    A non-integer product signals a degenerate weight system.
    """
    prod = Fraction(1)
    for q in W.weights:
        prod *= 1 / q - 1
    if prod.denominator != 1:
        raise WeightError(f"Milnor product {prod} is not an integer")
    return int(prod)


def check_nondegenerate(W: QHPoly, radius: float = 4.0, n_starts: int = 200,
                        seed: int = 0, tol: float = 1e-10) -> bool:
    """Attest nondegeneracy numerically.

    Runs a Newton multistart for critical points of the unperturbed W
    inside the given ball; returns True when no critical point other
    than the origin is found.  This is evidence, not a proof.
    """
    rng = np.random.default_rng(seed)
    n = W.n_vars
    for _ in range(n_starts):
        u = rng.normal(size=n) + 1j * rng.normal(size=n)
        u *= radius * rng.random() ** (1.0 / (2 * n)) / max(np.linalg.norm(u), 1e-30)
        for _ in range(60):
            g = gradient(W, u)
            if np.linalg.norm(g) < tol:
                break
            H = hessian(W, u)
            try:
                step = np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            u = u - step
        else:
            continue
        # Newton on a degenerate origin stalls at the sqrt(tol) scale, so
        # anything inside 1e-3 counts as the origin itself.
        if (np.linalg.norm(gradient(W, u)) < tol
                and np.linalg.norm(u) > 1e-3
                and np.linalg.norm(u) < radius):
            return False
    return True


def scale_by_phase(W: QHPoly, t: Fraction, u) -> np.ndarray:
    """Scale coordinate i of u by exp(2*pi*1j * t * q_i).

    With lambda = exp(2*pi*1j*t) this realizes the weighted action
    lambda^q applied to u, using the principal branch t*q_i.
    """
    u = _as_vector(W, u)
    phases = np.array([cmath.exp(2j * cmath.pi * float(t * q)) for q in W.weights])
    return phases * u


def growth_bound_supremum(W: QHPoly, radius: float, n_samples: int = 10_000,
                          seed: int = 0) -> float:
    """Sampled supremum of |u_i| / (sum_k |dW/du_k| + 1)^{delta_i}.

    Operationalizes the growth estimate at desk scale: the supremum over
    a ball should stabilize as the radius grows.
    """
    rng = np.random.default_rng(seed)
    deltas = [float(d) for d in growth_exponents(W)]
    n = W.n_vars
    sup = 0.0
    for _ in range(n_samples):
        u = rng.normal(size=n) + 1j * rng.normal(size=n)
        u *= radius * rng.random() ** (1.0 / (2 * n)) / max(np.linalg.norm(u), 1e-30)
        denom = float(np.sum(np.abs(gradient(W, u)))) + 1.0
        for i in range(n):
            ratio = abs(u[i]) / denom ** deltas[i]
            if ratio > sup:
                sup = ratio
    return sup
