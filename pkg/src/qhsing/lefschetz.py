"""Distinguished thimble bases and the moves that act on them.

A ThimbleState is an ordered basis of mu labels with an integer
intersection matrix R (R[i][j] = delta_i o delta_j) and optional
virtual-cycle coordinate vectors expressed over the current basis.
Monodromy, orientation, braid and Gabrielov moves are all unimodular
changes of basis; wall crossings act directly on the coordinate
vectors.  Everything is exact (int / Fraction).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

__all__ = [
    "ThimbleState",
    "pl_sign",
    "monodromy_apply",
    "braid_move",
    "braid_move_inverse",
    "orientation_flip",
    "gabrielov_move",
    "wall_cross",
    "casimir",
    "RationalTensor",
    "contract_pm",
]

Matrix = tuple[tuple[Fraction, ...], ...]


def _mat(rows) -> Matrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def _identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def _matmul(A, B) -> list[list[Fraction]]:
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0))
             for j in range(p)] for i in range(n)]


def _transpose(A) -> list[list[Fraction]]:
    return [list(col) for col in zip(*A)]


def _det(A) -> Fraction:
    n = len(A)
    M = [list(row) for row in A]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return det


def _inverse(A) -> list[list[Fraction]]:
    n = len(A)
    aug = [[Fraction(A[i][j]) for j in range(n)] +
           [Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def pl_sign(n_gamma: int) -> int:
    """Global sign (-1)^{N(N+1)/2} folded into monodromy coefficients."""
    return -1 if (n_gamma * (n_gamma + 1) // 2) % 2 else 1


@dataclass(frozen=True)
class ThimbleState:
    """Ordered thimble basis with intersection data and tracked cycles."""

    mu: int
    R: Matrix                       # R[i][j] = delta_i o delta_j
    parity: int                     # +1 symmetric, -1 antisymmetric (off-diagonal)
    pl_sign: int                    # sign convention baked into monodromy
    labels: tuple[str, ...]
    cycle_coords: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        if self.parity not in (-1, 1) or self.pl_sign not in (-1, 1):
            raise ValueError("parity and pl_sign must be +-1")
        if len(self.R) != self.mu or any(len(row) != self.mu for row in self.R):
            raise ValueError("intersection matrix has wrong shape")
        for i in range(self.mu):
            for j in range(self.mu):
                if i != j and self.R[i][j] != self.parity * self.R[j][i]:
                    raise ValueError("intersection matrix violates its symmetry type")
        if len(self.labels) != self.mu:
            raise ValueError("label count mismatch")
        if self.cycle_coords is not None:
            for v in self.cycle_coords:
                if len(v) != self.mu:
                    raise ValueError("cycle vector length mismatch")

    @staticmethod
    def make(R, n_gamma: int = 1, labels: Sequence[str] | None = None,
             cycle_coords=None) -> "ThimbleState":
        R = _mat(R)
        mu = len(R)
        parity = 1 if (n_gamma - 1) % 2 == 0 else -1
        labels = tuple(labels) if labels is not None else tuple(f"d{i + 1}" for i in range(mu))
        coords = None
        if cycle_coords is not None:
            coords = tuple(tuple(Fraction(x) for x in v) for v in cycle_coords)
        return ThimbleState(mu=mu, R=R, parity=parity,
                            pl_sign=pl_sign(n_gamma), labels=labels,
                            cycle_coords=coords)

    def pairing(self, v, w) -> Fraction:
        """Intersection value of two coordinate vectors in this basis."""
        total = Fraction(0)
        for i in range(self.mu):
            for j in range(self.mu):
                total += Fraction(v[i]) * self.R[i][j] * Fraction(w[j])
        return total


def _apply_basis_change(state: ThimbleState, M,
                        new_labels: Sequence[str] | None = None) -> ThimbleState:
    """New basis delta'_i = sum_k M[i][k] delta_k.

    The intersection matrix transforms as M R M^T; tracked cycle
    coordinates transform contravariantly (by the inverse transpose) so
    the represented classes are unchanged.  M must be unimodular.
    """
    det = _det(M)
    if det not in (Fraction(1), Fraction(-1)):
        raise ValueError(f"basis change is not unimodular (det {det})")
    R_new = _mat(_matmul(_matmul(M, [list(r) for r in state.R]), _transpose(M)))
    coords = state.cycle_coords
    if coords is not None:
        Minv_T = _transpose(_inverse(M))
        coords = tuple(
            tuple(sum((Minv_T[i][k] * v[k] for k in range(state.mu)), Fraction(0))
                  for i in range(state.mu))
            for v in coords)
    labels = tuple(new_labels) if new_labels is not None else state.labels
    return replace(state, R=R_new, labels=labels, cycle_coords=coords)


def _monodromy_matrix(state: ThimbleState, i: int) -> list[list[Fraction]]:
    """Matrix of h_{delta_i}: delta_j -> delta_j + pl_sign*R[j][i]*delta_i."""
    M = _identity(state.mu)
    for j in range(state.mu):
        M[j][i] += state.pl_sign * state.R[j][i]
    return M


def _check_index(state: ThimbleState, i: int):
    if not (0 <= i < state.mu):
        raise IndexError(f"index {i} out of range for mu={state.mu}")


def monodromy_apply(state: ThimbleState, i: int) -> ThimbleState:
    """Picard-Lefschetz monodromy around critical value i (0-based)."""
    _check_index(state, i)
    return _apply_basis_change(state, _monodromy_matrix(state, i))


def braid_move(state: ThimbleState, j: int) -> ThimbleState:
    """Replace positions (j, j+1) by (h_j(delta_{j+1}), delta_j)."""
    _check_index(state, j)
    _check_index(state, j + 1)
    M = _identity(state.mu)
    M[j] = [Fraction(0)] * state.mu
    M[j][j + 1] = Fraction(1)
    M[j][j] = state.pl_sign * state.R[j + 1][j]
    M[j + 1] = [Fraction(0)] * state.mu
    M[j + 1][j] = Fraction(1)
    labels = list(state.labels)
    labels[j], labels[j + 1] = labels[j + 1], labels[j]
    return _apply_basis_change(state, M, labels)


def braid_move_inverse(state: ThimbleState, j: int) -> ThimbleState:
    """Algebraic inverse of braid_move at the same position."""
    _check_index(state, j)
    _check_index(state, j + 1)
    # Undo delta'_j = c*delta_j + delta_{j+1}, delta'_{j+1} = delta_j.
    # Requiring braid_move to reproduce the current state pins the
    # coefficient x below from post-move intersection entries alone.
    denom = 1 + state.pl_sign * state.R[j + 1][j + 1]
    if denom == 0:
        raise ValueError("braid inverse undefined for this self-intersection")
    x = Fraction(state.pl_sign * state.R[j][j + 1], 1) / denom
    M = _identity(state.mu)
    M[j] = [Fraction(0)] * state.mu
    M[j][j + 1] = Fraction(1)
    M[j + 1] = [Fraction(0)] * state.mu
    M[j + 1][j] = Fraction(1)
    M[j + 1][j + 1] = -x
    labels = list(state.labels)
    labels[j], labels[j + 1] = labels[j + 1], labels[j]
    return _apply_basis_change(state, M, labels)


def orientation_flip(state: ThimbleState, j: int) -> ThimbleState:
    """Flip the orientation of basis element j."""
    _check_index(state, j)
    M = _identity(state.mu)
    M[j][j] = Fraction(-1)
    return _apply_basis_change(state, M)


def gabrielov_move(state: ThimbleState, i: int, j: int) -> ThimbleState:
    """Replace only slot j by h_i(delta_j)."""
    _check_index(state, i)
    _check_index(state, j)
    if i == j:
        raise IndexError("Gabrielov move needs two distinct slots")
    M = _identity(state.mu)
    M[j][i] += state.pl_sign * state.R[j][i]
    return _apply_basis_change(state, M)


def wall_cross(state: ThimbleState, i: int, direction: str,
               r: int | Fraction) -> ThimbleState:
    """Wall-crossing transformation of the virtual-cycle coordinates.

    Left (crossing with Re alpha_i < Re alpha_{i+1}):
        v_i(+)   = v_{i+1}(-) + r * v_i(-)
        v_{i+1}(+) = v_i(-)
    Right is the exact inverse with the same r, so Left followed by
    Right is the identity.  Slots other than i, i+1 are unchanged.
    """
    _check_index(state, i)
    _check_index(state, i + 1)
    if state.cycle_coords is None:
        raise ValueError("wall crossing needs cycle coordinates")
    r = Fraction(r)
    coords = [list(v) for v in state.cycle_coords]
    a, b = coords[i], coords[i + 1]
    if direction.lower() == "left":
        new_i = [bv + r * av for av, bv in zip(a, b)]
        new_ip1 = list(a)
    elif direction.lower() == "right":
        new_i = list(b)
        new_ip1 = [av - r * bv for av, bv in zip(a, b)]
    else:
        raise ValueError("direction must be 'left' or 'right'")
    coords[i], coords[i + 1] = new_i, new_ip1
    labels = list(state.labels)
    labels[i], labels[i + 1] = labels[i + 1], labels[i]
    return replace(state,
                   cycle_coords=tuple(tuple(v) for v in coords),
                   labels=tuple(labels))


@dataclass(frozen=True)
class RationalTensor:
    """Small dense tensor of Fractions, indexed by full tuples."""

    shape: tuple[int, ...]
    data: tuple  # nested tuples matching shape

    @staticmethod
    def from_nested(nested) -> "RationalTensor":
        def conv(x):
            if isinstance(x, (list, tuple)):
                return tuple(conv(v) for v in x)
            return Fraction(x)

        def shape_of(x):
            if isinstance(x, tuple) and x and isinstance(x[0], tuple):
                return (len(x),) + shape_of(x[0])
            if isinstance(x, tuple):
                return (len(x),)
            return ()

        data = conv(nested)
        return RationalTensor(shape=shape_of(data), data=data)

    def __getitem__(self, idx: tuple[int, ...]) -> Fraction:
        x = self.data
        for i in idx:
            x = x[i]
        return x

    @property
    def rank(self) -> int:
        return len(self.shape)


def casimir(pairing) -> RationalTensor:
    """Casimir tensor: coefficients are the inverse of the pairing.

    Coefficient c[i][j] multiplies basis_i (x) basis_j, with
    c = pairing^{-1}.
    """
    eta_inv = _inverse([[Fraction(v) for v in row] for row in pairing])
    return RationalTensor.from_nested(eta_inv)


def contract_pm(tensor: RationalTensor, pairing,
                normalization: Fraction | int = 1) -> RationalTensor | Fraction:
    """Contract the last two tensor slots through the pairing.

    out[...] = norm * sum_{a,b} T[..., a, b] * pairing[b][a].  The
    stabilizer-count normalization (e.g. |G|/|<gamma>|) is supplied by
    the caller.  A rank-2 input contracts to a plain Fraction.
    """
    if tensor.rank < 2:
        raise ValueError("need at least two slots to contract")
    na, nb = tensor.shape[-2], tensor.shape[-1]
    eta = [[Fraction(v) for v in row] for row in pairing]
    if len(eta) != nb or len(eta[0]) != na:
        raise ValueError("pairing dimensions do not match the contracted slots")
    norm = Fraction(normalization)

    out_shape = tensor.shape[:-2]

    def contract_at(prefix):
        total = Fraction(0)
        for a in range(na):
            for b in range(nb):
                total += tensor[prefix + (a, b)] * eta[b][a]
        return norm * total

    if not out_shape:
        return contract_at(())

    def build(dim_idx, prefix):
        if dim_idx == len(out_shape):
            return contract_at(prefix)
        return tuple(build(dim_idx + 1, prefix + (k,))
                     for k in range(out_shape[dim_idx]))

    return RationalTensor(shape=out_shape, data=build(0, ()))


def state_report(state: ThimbleState) -> str:
    """Structured-text export: labels, parity, sign, R, cycle coords."""
    lines = [
        "labels " + ",".join(state.labels),
        f"parity {'symmetric' if state.parity == 1 else 'antisymmetric'}",
        f"pl_sign {state.pl_sign:+d}",
    ]
    for row in state.R:
        lines.append("R " + " ".join(str(v) for v in row))
    if state.cycle_coords is not None:
        for v in state.cycle_coords:
            lines.append("cycle " + " ".join(str(x) for x in v))
    return "\n".join(lines) + "\n"
