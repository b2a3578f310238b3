"""Linear Morse perturbations of a sector polynomial.

Adds W0 = sum b_i x_i to a quasi-homogeneous polynomial, finds all of
its critical points by multistart Newton, classifies regular / strongly
regular perturbations, and locates wall crossings (coincidences of
imaginary critical values) along parameter paths by continuation plus
bisection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .wpoly import QHPoly, gradient, hessian, milnor_number, value

__all__ = [
    "MorseError",
    "MorseData",
    "find_critical_points",
    "is_strongly_regular",
    "detect_wall_crossings",
    "WallCrossing",
]

GRAD_TOL = 1e-10        # Newton residual bound certifying a critical point
HESS_MIN_SV = 1e-8      # nondegeneracy floor for the Hessian
SEPARATION = 1e-6       # minimal distance between distinct roots


class MorseError(RuntimeError):
    """Raised when a perturbation is not regular or roots are lost."""


@dataclass(frozen=True)
class MorseData:
    """Critical data of W + sum b_i x_i."""

    W: QHPoly
    b: tuple[complex, ...]
    critical_points: tuple[tuple[complex, ...], ...]
    critical_values: tuple[complex, ...]
    hessian_min_singular_value: tuple[float, ...]
    ordering: tuple[int, ...]       # permutation sorting by increasing Im(value)
    im_ties: tuple[tuple[int, int], ...]

    @property
    def mu(self) -> int:
        return len(self.critical_points)

    def ordered_points(self) -> list[np.ndarray]:
        return [np.array(self.critical_points[i]) for i in self.ordering]

    def ordered_values(self) -> list[complex]:
        return [self.critical_values[i] for i in self.ordering]


def perturbed_value(W: QHPoly, b, u) -> complex:
    u = np.asarray(u, dtype=complex)
    return value(W, u) + complex(np.dot(np.asarray(b, dtype=complex), u))


def perturbed_gradient(W: QHPoly, b, u) -> np.ndarray:
    return gradient(W, u) + np.asarray(b, dtype=complex)


def _newton(W: QHPoly, b, u0, max_iter: int = 80) -> np.ndarray | None:
    u = np.asarray(u0, dtype=complex).copy()
    for _ in range(max_iter):
        g = perturbed_gradient(W, b, u)
        if np.linalg.norm(g) < GRAD_TOL:
            return u
        H = hessian(W, u)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        # Damping keeps wild starts from exploding.
        norm = np.linalg.norm(step)
        if norm > 10.0:
            step *= 10.0 / norm
        u = u - step
    g = perturbed_gradient(W, b, u)
    return u if np.linalg.norm(g) < GRAD_TOL else None


def _canonical_sort(points: list[np.ndarray]) -> list[np.ndarray]:
    return sorted(points,
                  key=lambda p: tuple(x for c in p for x in (round(c.real, 9), round(c.imag, 9))))


def find_critical_points(W: QHPoly, b: Sequence[complex],
                         extra_starts: int = 200, seed: int = 0) -> MorseData:
    """All critical points of W + sum b_i x_i, certified by count.

    Multistart Newton with starts on concentric spheres scaled by the
    perturbation size; completeness is certified by comparing the count
    of distinct converged roots with the Milnor number.
    """
    b = tuple(complex(v) for v in b)
    n = W.n_vars
    mu = milnor_number(W)
    if all(v == 0 for v in b) and mu > 0:
        raise MorseError("not W-regular: unperturbed W has a degenerate critical point at 0")

    rng = np.random.default_rng(seed)
    scale = max(np.linalg.norm(b), 1e-12)
    # Weighted scaling ||b||^q keeps starts near the root cluster.
    radii = [0.5, 1.0, 2.0, 4.0]
    q_scales = np.array([scale ** float(q) for q in W.weights])

    roots: list[np.ndarray] = []

    def try_start(u0):
        u = _newton(W, b, u0)
        if u is None:
            return
        for r in roots:
            if np.linalg.norm(u - r) < SEPARATION:
                return
        roots.append(u)

    budget = extra_starts
    for radius in itertools.cycle(radii):
        if len(roots) >= mu or budget <= 0:
            break
        for _ in range(16):
            d = rng.normal(size=n) + 1j * rng.normal(size=n)
            d /= np.linalg.norm(d)
            try_start(radius * q_scales * d)
            budget -= 1
            if len(roots) >= mu:
                break

    if len(roots) != mu:
        raise MorseError(
            f"degenerate or unresolved: found {len(roots)} of {mu} critical points")

    roots = _canonical_sort(roots)
    values = [perturbed_value(W, b, u) for u in roots]
    min_svs = []
    for u in roots:
        sv = np.linalg.svd(hessian(W, u), compute_uv=False)
        min_svs.append(float(sv[-1]))
        if sv[-1] <= HESS_MIN_SV:
            raise MorseError("not W-regular: degenerate Hessian at a critical point")

    order = sorted(range(mu), key=lambda i: (values[i].imag, values[i].real))
    tie_tol = 1e-9 * max((abs(v) for v in values), default=1.0)
    ties = tuple((i, j) for i in range(mu) for j in range(i + 1, mu)
                 if abs(values[i].imag - values[j].imag) <= tie_tol)
    return MorseData(W=W, b=b,
                     critical_points=tuple(tuple(u) for u in roots),
                     critical_values=tuple(values),
                     hessian_min_singular_value=tuple(min_svs),
                     ordering=tuple(order),
                     im_ties=ties)


def is_strongly_regular(m: MorseData) -> tuple[bool, tuple[int, int] | None]:
    """True iff all imaginary critical values are pairwise distinct.

    On failure the witness pair of critical-point indices is returned.
    """
    if m.im_ties:
        return False, m.im_ties[0]
    return True, None


def _track_roots(W: QHPoly, points: list[np.ndarray],
                 b_old, b_new) -> list[np.ndarray] | None:
    """One continuation step: polish previous roots at the new parameter.

    Returns None when a root is lost or two tracked roots collide,
    signalling that the step must be halved.
    """
    new_points = []
    for u in points:
        v = _newton(W, b_new, u)
        if v is None:
            return None
        new_points.append(v)
    # Nearest-neighbor integrity: motion must stay well below the gap.
    min_gap = np.inf
    for i in range(len(new_points)):
        for j in range(i + 1, len(new_points)):
            min_gap = min(min_gap, np.linalg.norm(new_points[i] - new_points[j]))
    if len(new_points) > 1 and min_gap < SEPARATION:
        return None
    max_motion = max(np.linalg.norm(v - u) for u, v in zip(points, new_points))
    if len(new_points) > 1 and max_motion * 4.0 > min_gap:
        return None
    return new_points


@dataclass(frozen=True)
class WallCrossing:
    lam: float
    pair: tuple[int, int]   # indices into the tracked root list


def detect_wall_crossings(W: QHPoly, path: Callable[[float], Sequence[complex]],
                          steps: int = 200, refine_tol: float = 1e-14,
                          seed: int = 0) -> list[WallCrossing]:
    """Imaginary-value coincidences along a perturbation path on [0, 1].

    Tracks every critical point by predictor-corrector continuation with
    step halving, watches the signs of Im(alpha_i - alpha_j) for every
    pair, and refines each sign change by bisection.  Each crossing must
    be generic: exactly one pair and a transversal sign change.
    """
    b0 = np.asarray(path(0.0), dtype=complex)
    m0 = find_critical_points(W, b0, seed=seed)
    points = [np.array(p) for p in m0.critical_points]
    mu = len(points)

    def im_gaps(pts, lam):
        b = np.asarray(path(lam), dtype=complex)
        vals = [perturbed_value(W, b, u) for u in pts]
        return {(i, j): vals[i].imag - vals[j].imag
                for i in range(mu) for j in range(i + 1, mu)}

    def advance(pts, lam_from, lam_to, depth=0):
        """Continue all roots from lam_from to lam_to, halving on failure."""
        if depth > 40:
            raise MorseError(f"loss of tracked root near lambda={lam_from:.6g}")
        b_new = np.asarray(path(lam_to), dtype=complex)
        nxt = _track_roots(W, pts, None, b_new)
        if nxt is not None:
            return nxt
        mid = 0.5 * (lam_from + lam_to)
        half = advance(pts, lam_from, mid, depth + 1)
        return advance(half, mid, lam_to, depth + 1)

    crossings: list[WallCrossing] = []
    lam_prev = 0.0
    gaps_prev = im_gaps(points, 0.0)
    for k in range(1, steps + 1):
        lam = k / steps
        points_new = advance(points, lam_prev, lam)
        gaps = im_gaps(points_new, lam)
        flipped = [pair for pair in gaps
                   if gaps_prev[pair] * gaps[pair] < 0]
        if len(flipped) > 1:
            raise MorseError(f"non-generic crossing near lambda={lam:.6g}: pairs {flipped}")
        if flipped:
            pair = flipped[0]
            lo, hi = lam_prev, lam
            pts_lo = points
            g_lo = gaps_prev[pair]
            # Refine essentially to machine precision: downstream soliton
            # shooting needs the imaginary gap at the crossing to be tiny,
            # or connecting orbits skirt the capture sphere and escape.
            while hi - lo > refine_tol:
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                pts_mid = advance(pts_lo, lo, mid)
                g_mid = im_gaps(pts_mid, mid)[pair]
                if g_lo * g_mid <= 0:
                    hi = mid
                else:
                    lo, pts_lo, g_lo = mid, pts_mid, g_mid
            lam_star = 0.5 * (lo + hi)
            if refine_tol < lam_star < 1.0 - refine_tol:
                crossings.append(WallCrossing(lam=lam_star, pair=pair))
        points, gaps_prev, lam_prev = points_new, gaps, lam
    return crossings


def morse_report(m: MorseData) -> str:
    """Structured-text export of MorseData."""
    strong, witness = is_strongly_regular(m)
    lines = [
        "b " + ",".join(f"{v.real:.12g}{v.imag:+.12g}i" for v in m.b),
        f"mu {m.mu}",
    ]
    for k, (u, a, sv) in enumerate(zip(m.critical_points, m.critical_values,
                                       m.hessian_min_singular_value)):
        pt = ",".join(f"{c.real:.12g}{c.imag:+.12g}i" for c in u)
        lines.append(f"critical {k} point {pt} value "
                     f"{a.real:.12g}{a.imag:+.12g}i hess_min_sv {sv:.12g}")
    lines.append("ordering " + ",".join(str(i) for i in m.ordering))
    lines.append(f"strongly_regular {str(strong).lower()}")
    if witness is not None:
        lines.append(f"witness_pair {witness[0]} {witness[1]}")
    return "\n".join(lines) + "\n"
