"""Top-level acceptance suite.

One test per headline capability; each prints a single PASS/FAIL line
(visible with `pytest -s`).  Exact-arithmetic identities run at zero
tolerance; dynamical checks run at the stated numerical tolerances.
"""

import cmath
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from qhsing.graphcalc import DecoratedGraph, Tail, line_bundle_degrees, virtual_degree
from qhsing.lefschetz import ThimbleState, braid_move, pl_sign, wall_cross
from qhsing.morse import (detect_wall_crossings, find_critical_points,
                          is_strongly_regular, perturbed_value)
from qhsing.soliton import (a1_bounded_spectrum_empty, count_bps_solitons,
                            energy_identity_check, fourier_bounded_solution,
                            homogeneous_decay_check, integrate_flow,
                            witten_vanishing_check)
from qhsing.symmetry import GroupElement, central_charge, enumerate_group, sector_data
from qhsing.wpoly import compute_weights, parse_polynomial

CORPUS = ["x^3", "x^4", "x^3+x*y^2", "x^4+x*y^2", "x^3+y^3", "x^3+x*y^3"]

F = Fraction


@contextmanager
def criterion(num, desc):
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {num}: {desc}")
        raise
    print(f"PASS criterion {num}: {desc}")


def test_criterion_01_weights():
    with criterion(1, "chain-family weights exact, < 1 ms each"):
        for n in range(3, 9):
            t0 = time.perf_counter()
            q = compute_weights([[n, 0], [1, 2]])
            dt = time.perf_counter() - t0
            assert q == (F(1, n), F(n - 1, 2 * n))
            assert dt < 1e-3


def test_criterion_02_sector_identity_sweep():
    with criterion(2, "iota(g) + iota(g^-1) + N_g = c_hat over the corpus, exact"):
        for text in CORPUS:
            W = parse_polynomial(text)
            c = central_charge(W)
            for g in enumerate_group(W):
                s1 = sector_data(W, g)
                s2 = sector_data(W, g.inverse())
                assert s1.iota + s2.iota + s1.n_gamma == c


def test_criterion_03_selection_rules():
    with criterion(3, "cubic genus-0 three-tail selection rule, all 27 triples"):
        W = parse_polynomial("x^3")
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    tails = [GroupElement((F(k, 3),)) for k in (a, b, c)]
                    _, adm = line_bundle_degrees(W, 0, tails)
                    want = (F(a + b + c, 3) - F(1, 3)).denominator == 1
                    assert adm == want
                    graph = DecoratedGraph(W=W, genera=(0,), edges=(),
                                           tails=tuple(Tail(0, g) for g in tails))
                    deg = virtual_degree(graph).cycle_degree
                    even_integer = deg.denominator == 1 and int(deg) % 2 == 0
                    assert even_integer == adm


def test_criterion_04_morse_examples():
    with criterion(4, "cubic Morse data at b = +-3 to 1e-10 with regularity flags"):
        W = parse_polynomial("x^3")
        m = find_critical_points(W, [3.0])
        pts = sorted((p[0] for p in m.critical_points), key=lambda z: z.imag)
        vals = sorted(m.critical_values, key=lambda z: z.imag)
        assert abs(pts[0] + 1j) < 1e-10 and abs(pts[1] - 1j) < 1e-10
        assert abs(vals[0] + 2j) < 1e-10 and abs(vals[1] - 2j) < 1e-10
        assert is_strongly_regular(m) == (True, None)

        m2 = find_critical_points(W, [-3.0])
        pts2 = sorted((p[0] for p in m2.critical_points), key=lambda z: z.real)
        assert abs(pts2[0] + 1) < 1e-10 and abs(pts2[1] - 1) < 1e-10
        assert {round(v.real, 9) for v in m2.critical_values} == {-2.0, 2.0}
        ok, witness = is_strongly_regular(m2)
        assert not ok and set(witness) == {0, 1}


def test_criterion_05_wall_detection():
    with criterion(5, "one wall at lambda = 1/3 to 1e-8, under 1 s"):
        W = parse_polynomial("x^3")
        t0 = time.perf_counter()
        crossings = detect_wall_crossings(
            W, lambda lam: [3.0 * cmath.exp(1j * cmath.pi * lam)])
        dt = time.perf_counter() - t0
        assert len(crossings) == 1
        assert abs(crossings[0].lam - 1.0 / 3.0) < 1e-8
        assert dt < 1.0


def _aligned_pair(m):
    vals = m.critical_values
    mu = len(vals)
    return min(((i, j) for i in range(mu) for j in range(mu)
                if i != j and vals[i].real < vals[j].real),
               key=lambda p: abs(vals[p[0]].imag - vals[p[1]].imag))


def test_criterion_06_bps_counts():
    with criterion(6, "soliton count 1 on the cubic wall and on two quartic walls"):
        W = parse_polynomial("x^3")
        m = find_critical_points(W, [-3.0])
        i, j = _aligned_pair(m)
        t0 = time.perf_counter()
        assert count_bps_solitons(W, m, i, j) == 1
        assert time.perf_counter() - t0 < 10.0
        # Conservation and energy identity along the connecting orbit.
        pts = [np.array(p) for p in m.critical_points]
        traj = integrate_flow(W, m.b, pts[i] + np.array([-1e-3]), (0.0, 60.0),
                              critical_points=pts)
        scale = max(1.0, max(abs(v) for v in m.critical_values))
        assert traj.im_drift < 1e-8 * scale
        assert traj.re_monotone
        assert traj.endpoints == (i, j)
        assert energy_identity_check(W, m.b, traj) < 1e-6

        # Two independent quartic wall configurations must agree.
        W4 = parse_polynomial("x^4")
        counts = []
        for sgn in (-1.0, 1.0):
            def path(lam, sgn=sgn):
                return [4.0 * cmath.exp(sgn * 0.5j * cmath.pi * lam)]
            crossings = detect_wall_crossings(W4, path)
            m4 = find_critical_points(W4, path(crossings[0].lam))
            i4, j4 = _aligned_pair(m4)
            counts.append(count_bps_solitons(W4, m4, i4, j4))
        assert counts[0] == counts[1] == 1


def test_criterion_07_strong_regularity_no_solitons():
    with criterion(7, "20 random strongly regular b: zero captured flow lines"):
        rng = np.random.default_rng(42)
        captures = 0
        for text, reps in (("x^3", 10), ("x^4", 10)):
            W = parse_polynomial(text)
            done = 0
            while done < reps:
                b = [complex(rng.normal(), rng.normal()) * 2]
                try:
                    m = find_critical_points(W, b)
                except Exception:
                    continue
                if not is_strongly_regular(m)[0]:
                    continue
                done += 1
                pts = [np.array(p) for p in m.critical_points]
                for i in range(len(pts)):
                    alpha = m.critical_values[i]
                    for a in np.linspace(0, 2 * np.pi, 16, endpoint=False):
                        u0 = pts[i] + 1e-3 * np.exp(1j * a)
                        if (perturbed_value(W, b, u0) - alpha).real <= 0:
                            continue
                        traj = integrate_flow(W, b, u0, (0.0, 40.0),
                                              critical_points=pts)
                        if traj.endpoints[1] is not None and traj.endpoints[1] != i:
                            captures += 1
        assert captures == 0


def test_criterion_08_picard_lefschetz_algebra():
    with criterion(8, "braid relations for 100 random R, wall_cross inverse, exact"):
        rng = random.Random(5)
        for trial in range(100):
            mu = rng.randint(3, 6)
            antisymmetric = trial % 2 == 0
            if antisymmetric:
                n_gamma = 2
                R = [[0] * mu for _ in range(mu)]
                for i in range(mu):
                    for j in range(i + 1, mu):
                        R[i][j] = rng.randint(-3, 3)
                        R[j][i] = -R[i][j]
            else:
                n_gamma = 1
                d = -2 * pl_sign(1)
                R = [[d if i == j else 0 for j in range(mu)] for i in range(mu)]
                for i in range(mu):
                    for j in range(i + 1, mu):
                        R[i][j] = rng.randint(-3, 3)
                        R[j][i] = R[i][j]
            st = ThimbleState.make(R, n_gamma=n_gamma)
            jj = rng.randint(0, mu - 3)
            lhs = braid_move(braid_move(braid_move(st, jj), jj + 1), jj)
            rhs = braid_move(braid_move(braid_move(st, jj + 1), jj), jj + 1)
            assert lhs.R == rhs.R

        for _ in range(20):
            coords = [[F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
                      for _ in range(3)]
            st = ThimbleState.make([[0, 1, -2], [-1, 0, 1], [2, -1, 0]],
                                   n_gamma=2, cycle_coords=coords)
            r = F(rng.randint(-4, 4))
            i = rng.randint(0, 1)
            assert wall_cross(wall_cross(st, i, "left", r), i, "right", r) == st
            assert wall_cross(wall_cross(st, i, "right", r), i, "left", r) == st


def test_criterion_09_fourier_layer():
    with criterion(9, "decay rate within 2% of Theta; bounded-solution residual < 1e-8"):
        rng = np.random.default_rng(8)
        for theta in (0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0):
            coeffs = {n: complex(rng.normal(), rng.normal())
                      for n in range(3)}
            slope, violation = homogeneous_decay_check(theta, coeffs, T=6.0)
            assert abs(slope + theta) < 0.02 * theta
            assert violation <= 1e-8

        # Inhomogeneous unique bounded solution against closed forms.
        s = np.linspace(-3.0, 3.0, 25)
        theta = 0.4
        field = fourier_bounded_solution(theta, {0: lambda t: math.exp(-2 * t)}, s)
        want = np.exp(-2 * s) / (theta - 2)
        assert np.max(np.abs(field.mode_values[0] - want)) < 1e-8
        field = fourier_bounded_solution(theta, {-1: lambda t: math.exp(2 * t)}, s)
        lam = -1 + theta
        want = np.exp(2 * s) / (lam + 2)
        assert np.max(np.abs(field.mode_values[0] - want)) < 1e-8


def test_criterion_10_vanishing_and_a1():
    with criterion(10, "NS vanishing from 50 starts; A1 bounded spectrum empty"):
        W = parse_polynomial("x^3")
        assert witten_vanishing_check(W, theta=1.0 / 3.0, n_starts=50, seed=0)
        rng = np.random.default_rng(12)
        for _ in range(20):
            eps = float(rng.uniform(-1.5, 3.0))
            assert a1_bounded_spectrum_empty(eps)
