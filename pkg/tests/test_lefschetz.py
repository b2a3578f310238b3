import random
from fractions import Fraction

import pytest

from qhsing.lefschetz import (RationalTensor, ThimbleState, braid_move,
                              braid_move_inverse, casimir, contract_pm,
                              gabrielov_move, monodromy_apply,
                              orientation_flip, pl_sign, wall_cross)

F = Fraction


def random_antisym(rng, mu, lo=-3, hi=3):
    R = [[0] * mu for _ in range(mu)]
    for i in range(mu):
        for j in range(i + 1, mu):
            R[i][j] = rng.randint(lo, hi)
            R[j][i] = -R[i][j]
    return R


def random_sym(rng, mu, diag, lo=-3, hi=3):
    R = [[0] * mu for _ in range(mu)]
    for i in range(mu):
        R[i][i] = diag
        for j in range(i + 1, mu):
            R[i][j] = rng.randint(lo, hi)
            R[j][i] = R[i][j]
    return R


def random_state(rng, mu, n_gamma, with_coords=False):
    """Random state of the symmetry type dictated by n_gamma.

    For the symmetric type the diagonal is pinned to -2 * pl_sign, the
    self-intersection for which the braid group acts.
    """
    if (n_gamma - 1) % 2 == 0:
        R = random_sym(rng, mu, -2 * pl_sign(n_gamma))
    else:
        R = random_antisym(rng, mu)
    coords = None
    if with_coords:
        coords = [[F(rng.randint(-5, 5)) for _ in range(mu)] for _ in range(mu)]
    return ThimbleState.make(R, n_gamma=n_gamma, cycle_coords=coords)


class TestConstruction:
    def test_pl_sign_values(self):
        assert [pl_sign(n) for n in range(5)] == [1, -1, -1, 1, 1]

    def test_parity_from_n_gamma(self):
        assert ThimbleState.make([[0, 1], [-1, 0]], n_gamma=2).parity == -1
        assert ThimbleState.make([[2, 1], [1, 2]], n_gamma=1).parity == 1

    def test_symmetry_type_enforced(self):
        with pytest.raises(ValueError):
            ThimbleState.make([[0, 1], [1, 0]], n_gamma=2)
        with pytest.raises(ValueError):
            ThimbleState.make([[0, 1], [-1, 0]], n_gamma=1)

    def test_default_labels(self):
        st = ThimbleState.make([[0, 1], [-1, 0]], n_gamma=2)
        assert st.labels == ("d1", "d2")

    def test_pairing(self):
        st = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1)
        assert st.pairing([1, 0], [0, 1]) == 1
        assert st.pairing([1, 1], [1, 1]) == 6


class TestMonodromy:
    def test_a2_reflection(self):
        # mu=2, one variable: h_0 sends d1 -> -d1, d2 -> d2 - d1.
        st = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1)
        out = monodromy_apply(st, 0)
        # R is preserved by a reflection in its own hyperplane arrangement
        # only up to basis bookkeeping; applying twice returns R exactly.
        back = monodromy_apply(out, 0)
        assert back.R == st.R

    def test_preserves_tracked_pairings(self):
        rng = random.Random(1)
        for n_gamma in (1, 2):
            st = random_state(rng, 4, n_gamma, with_coords=True)
            out = monodromy_apply(st, 2)
            for v1, w1 in zip(st.cycle_coords, out.cycle_coords):
                for v2, w2 in zip(st.cycle_coords, out.cycle_coords):
                    assert st.pairing(v1, v2) == out.pairing(w1, w2)


class TestBraid:
    @pytest.mark.parametrize("n_gamma", [1, 2])
    def test_braid_relation(self, n_gamma):
        rng = random.Random(7)
        for _ in range(25):
            mu = rng.randint(3, 6)
            st = random_state(rng, mu, n_gamma)
            j = rng.randint(0, mu - 3)
            lhs = braid_move(braid_move(braid_move(st, j), j + 1), j)
            rhs = braid_move(braid_move(braid_move(st, j + 1), j), j + 1)
            assert lhs.R == rhs.R

    @pytest.mark.parametrize("n_gamma", [1, 2])
    def test_commuting_relation(self, n_gamma):
        rng = random.Random(8)
        for _ in range(10):
            st = random_state(rng, 5, n_gamma)
            lhs = braid_move(braid_move(st, 0), 3)
            rhs = braid_move(braid_move(st, 3), 0)
            assert lhs.R == rhs.R

    @pytest.mark.parametrize("n_gamma", [1, 2])
    def test_inverse_round_trip(self, n_gamma):
        rng = random.Random(9)
        for _ in range(20):
            st = random_state(rng, 4, n_gamma, with_coords=True)
            j = rng.randint(0, 2)
            fwd = braid_move_inverse(braid_move(st, j), j)
            assert fwd.R == st.R and fwd.cycle_coords == st.cycle_coords
            bwd = braid_move(braid_move_inverse(st, j), j)
            assert bwd.R == st.R and bwd.cycle_coords == st.cycle_coords

    def test_label_swap(self):
        st = ThimbleState.make([[0, 1], [-1, 0]], n_gamma=2,
                               labels=("a", "b"))
        assert braid_move(st, 0).labels == ("b", "a")

    def test_preserves_tracked_pairings(self):
        rng = random.Random(10)
        st = random_state(rng, 4, 2, with_coords=True)
        out = braid_move(st, 1)
        for v1, w1 in zip(st.cycle_coords, out.cycle_coords):
            for v2, w2 in zip(st.cycle_coords, out.cycle_coords):
                assert st.pairing(v1, v2) == out.pairing(w1, w2)


class TestOtherMoves:
    def test_orientation_flip_involution(self):
        rng = random.Random(11)
        st = random_state(rng, 3, 2, with_coords=True)
        assert orientation_flip(orientation_flip(st, 1), 1) == st

    def test_orientation_flip_signs(self):
        st = ThimbleState.make([[0, 2], [-2, 0]], n_gamma=2)
        out = orientation_flip(st, 0)
        assert out.R == ((F(0), F(-2)), (F(2), F(0)))

    def test_gabrielov_single_slot(self):
        st = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1,
                               cycle_coords=[[1, 0], [0, 1]])
        out = gabrielov_move(st, 0, 1)
        # Only slot 1 changed; labels keep their order.
        assert out.labels == st.labels
        back = st  # pairing preservation is the real content
        for v1, w1 in zip(back.cycle_coords, out.cycle_coords):
            for v2, w2 in zip(back.cycle_coords, out.cycle_coords):
                assert back.pairing(v1, v2) == out.pairing(w1, w2)

    def test_gabrielov_same_slot_rejected(self):
        st = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1)
        with pytest.raises(IndexError):
            gabrielov_move(st, 1, 1)

    def test_a2_orbit_reaches_flipped_state(self):
        # Short search over {orientation_flip, braid} words: the state
        # with R[0][1] negated is reachable within length 6.
        start = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1)
        target = ((F(2), F(-1)), (F(-1), F(2)))
        seen = {start.R}
        frontier = [start]
        found = False
        for _ in range(6):
            nxt = []
            for st in frontier:
                for cand in (orientation_flip(st, 0), orientation_flip(st, 1),
                             braid_move(st, 0), braid_move_inverse(st, 0)):
                    if cand.R == target:
                        found = True
                    if cand.R not in seen:
                        seen.add(cand.R)
                        nxt.append(cand)
            frontier = nxt
        assert found


class TestWallCross:
    def make_state(self, coords):
        return ThimbleState.make([[0, 1], [-1, 0]], n_gamma=2,
                                 cycle_coords=coords)

    def test_r_zero_is_swap(self):
        st = self.make_state([[2, 3], [5, 7]])
        out = wall_cross(st, 0, "left", 0)
        assert out.cycle_coords == ((F(5), F(7)), (F(2), F(3)))

    def test_r_one_unit_vectors(self):
        st = self.make_state([[1, 0], [0, 1]])
        out = wall_cross(st, 0, "left", 1)
        assert out.cycle_coords == ((F(1), F(1)), (F(1), F(0)))

    def test_left_right_inverse(self):
        rng = random.Random(13)
        for _ in range(20):
            coords = [[F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(2)]
                      for _ in range(2)]
            r = F(rng.randint(-5, 5))
            st = self.make_state(coords)
            assert wall_cross(wall_cross(st, 0, "left", r), 0, "right", r) == st
            assert wall_cross(wall_cross(st, 0, "right", r), 0, "left", r) == st

    def test_requires_coords(self):
        st = ThimbleState.make([[0, 1], [-1, 0]], n_gamma=2)
        with pytest.raises(ValueError):
            wall_cross(st, 0, "left", 1)

    def test_bad_direction(self):
        st = self.make_state([[1, 0], [0, 1]])
        with pytest.raises(ValueError):
            wall_cross(st, 0, "up", 1)


class TestTensors:
    def test_casimir_identity(self):
        c = casimir([[1, 0], [0, 1]])
        assert c.data == ((F(1), F(0)), (F(0), F(1)))

    def test_casimir_diagonal(self):
        c = casimir([[2, 0], [0, 2]])
        assert c[(0, 0)] == F(1, 2) and c[(1, 1)] == F(1, 2)

    def test_casimir_singular_pairing(self):
        with pytest.raises(ValueError):
            casimir([[1, 1], [1, 1]])

    def test_casimir_basis_covariance(self):
        # Under delta' = M delta the pairing becomes M R M^T and the
        # Casimir coefficients must become M^{-T} c M^{-1}; realized by
        # recomputing from the braided state's pairing matrix.
        st = ThimbleState.make([[2, 1], [1, 2]], n_gamma=1)
        out = braid_move(st, 0)
        c_new = casimir([[int(v) for v in row] for row in out.R])
        # Invariance check through full contraction with the new pairing:
        # sum_ij c^{ij} eta_{ji} = mu in any basis.
        total = sum(c_new[(i, j)] * out.R[j][i] for i in range(2) for j in range(2))
        assert total == 2

    def test_contract_rank2(self):
        T = RationalTensor.from_nested([[1, 2], [3, 4]])
        assert contract_pm(T, [[1, 0], [0, 1]]) == 5

    def test_contract_normalization(self):
        T = RationalTensor.from_nested([[1, 0], [0, 1]])
        assert contract_pm(T, [[1, 0], [0, 1]], normalization=F(3, 2)) == 3

    def test_contract_higher_rank(self):
        T = RationalTensor.from_nested([[[1, 0], [0, 1]], [[2, 0], [0, 2]]])
        out = contract_pm(T, [[1, 0], [0, 1]])
        assert out.shape == (2,)
        assert out.data == (F(2), F(4))

    def test_contract_shape_mismatch(self):
        T = RationalTensor.from_nested([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            contract_pm(T, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
