"""Arithmetic over the prime field F_d and bivariate-polynomial share machinery.

Field elements are plain Python ints kept in ``[0, d)``.  Every public function
reduces its outputs, so callers never see an unreduced residue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from mubqss.errors import ParameterError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_odd_prime(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 3 or not is_prime(int(d)):
        raise ParameterError(f"d must be an odd prime, got {d!r}")


def inverse(a: int, d: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``d``."""
    a %= d
    if a == 0:
        raise ParameterError("0 has no inverse modulo d")
    return pow(a, -1, d)


@dataclass(frozen=True)
class SchemeParams:
    """Public parameters of a (t, n) sharing over F_d.

    ``public_points[i - 1]`` is the public abscissa x_i of participant i;
    participants are numbered from 1.
    """

    d: int
    t: int
    n: int
    public_points: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        check_odd_prime(self.d)
        if not self.public_points:
            object.__setattr__(self, "public_points", tuple(range(1, self.n + 1)))
        else:
            object.__setattr__(self, "public_points", tuple(int(x) for x in self.public_points))
        if self.t < 2:
            raise ParameterError(f"t must be at least 2, got {self.t}")
        if self.t > self.n:
            raise ParameterError(f"t must not exceed n (t={self.t}, n={self.n})")
        if self.n > self.d - 1:
            raise ParameterError(f"n must be at most d - 1 = {self.d - 1}, got {self.n}")
        pts = self.public_points
        if len(pts) != self.n:
            raise ParameterError(f"expected {self.n} public points, got {len(pts)}")
        if any(not 0 < x < self.d for x in pts):
            raise ParameterError("public points must lie in [1, d)")
        if len(set(pts)) != len(pts):
            raise ParameterError("public points must be distinct")

    def point(self, i: int) -> int:
        self.check_index(i)
        return self.public_points[i - 1]

    def check_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ParameterError(f"participant index {i} outside 1..{self.n}")

    def to_dict(self) -> dict:
        return {"d": self.d, "t": self.t, "n": self.n, "public_points": list(self.public_points)}


@dataclass(frozen=True)
class BivariatePolynomial:
    """F(x, y) = sum a_ij x^i y^j mod d with a t-by-t coefficient matrix.

    ``coeffs[i][j]`` multiplies ``x**i * y**j``.
    """

    coeffs: tuple[tuple[int, ...], ...]
    d: int

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(a) % self.d for a in row) for row in self.coeffs)
        size = len(rows)
        if size == 0 or any(len(r) != size for r in rows):
            raise ParameterError("coefficient matrix must be square and non-empty")
        object.__setattr__(self, "coeffs", rows)

    @classmethod
    def from_matrix(cls, matrix: Iterable[Iterable[int]], d: int) -> "BivariatePolynomial":
        return cls(tuple(tuple(int(a) for a in row) for row in matrix), d)

    @property
    def size(self) -> int:
        return len(self.coeffs)

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self.coeffs]

    def __call__(self, x: int, y: int) -> int:
        return poly_eval(self, x, y)


def eval_univariate(coeffs: Sequence[int], x: int, d: int) -> int:
    """Horner evaluation of ``sum coeffs[k] x^k`` mod d."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % d
    return acc


def poly_random(params: SchemeParams, rng: np.random.Generator) -> BivariatePolynomial:
    """Sample every coefficient of a t-by-t polynomial uniformly from F_d.

    No symmetry is enforced or excluded; the draw is returned as sampled.
    """
    if not isinstance(params, SchemeParams):
        raise ParameterError("params must be a SchemeParams")
    mat = rng.integers(0, params.d, size=(params.t, params.t))
    return BivariatePolynomial.from_matrix(mat.tolist(), params.d)


def poly_eval(F: BivariatePolynomial, x: int, y: int) -> int:
    d = F.d
    x %= d
    y %= d
    # Horner in x over row polynomials evaluated at y.
    acc = 0
    for row in reversed(F.coeffs):
        acc = (acc * x + eval_univariate(row, y, d)) % d
    return acc


@dataclass(frozen=True)
class Share:
    """Participant ``owner``'s share: F(x_i, y) as a polynomial in y and F(x, x_i) in x."""

    owner: int
    point: int
    row_poly: tuple[int, ...]
    col_poly: tuple[int, ...]
    d: int

    def row_at(self, y: int) -> int:
        return eval_univariate(self.row_poly, y, self.d)

    def col_at(self, x: int) -> int:
        return eval_univariate(self.col_poly, x, self.d)

    def to_dict(self) -> dict:
        return {"owner": self.owner, "point": self.point,
                "row_poly": list(self.row_poly), "col_poly": list(self.col_poly)}


def share_generate(F: BivariatePolynomial, params: SchemeParams, i: int) -> Share:
    xi = params.point(i)
    d = F.d
    t = F.size
    powers = [pow(xi, k, d) for k in range(t)]
    # row: coefficient of y^j is sum_i a_ij x_i^i; col: coefficient of x^i is sum_j a_ij x_i^j
    row = tuple(sum(F.coeffs[a][j] * powers[a] for a in range(t)) % d for j in range(t))
    col = tuple(sum(F.coeffs[a][j] * powers[j] for j in range(t)) % d for a in range(t))
    return Share(owner=i, point=xi, row_poly=row, col_poly=col, d=d)


@dataclass(frozen=True)
class PairwiseKey:
    """Key F(x_i, x_j) protecting traffic from participant i to participant j."""

    holder_pair: tuple[int, int]
    key: int


def pairwise_key(share: Share, params: SchemeParams, other: int, direction: str = "send") -> PairwiseKey:
    """Key the share owner uses toward ``other``.

    ``direction="send"`` gives F(x_owner, x_other) from the row polynomial (traffic
    owner -> other); ``direction="receive"`` gives F(x_other, x_owner) from the column
    polynomial (traffic other -> owner).
    """
    if other == share.owner:
        raise ParameterError("a participant has no pairwise key with itself")
    x_other = params.point(other)
    if direction == "send":
        return PairwiseKey((share.owner, other), share.row_at(x_other))
    if direction == "receive":
        return PairwiseKey((other, share.owner), share.col_at(x_other))
    raise ParameterError(f"direction must be 'send' or 'receive', got {direction!r}")


def lagrange_coefficients_at_zero(xs: Sequence[int], d: int) -> list[int]:
    """Weights lambda_i with f(0) = sum lambda_i f(x_i) for deg f < len(xs)."""
    xs = [int(x) % d for x in xs]
    if not xs:
        raise ParameterError("need at least one interpolation point")
    if any(x == 0 for x in xs):
        raise ParameterError("interpolation points must be nonzero")
    if len(set(xs)) != len(xs):
        raise ParameterError("interpolation points must be distinct")
    weights = []
    for i, xi in enumerate(xs):
        num, den = 1, 1
        for k, xk in enumerate(xs):
            if k != i:
                num = num * xk % d
                den = den * (xk - xi) % d
        weights.append(num * inverse(den, d) % d)
    return weights


def lagrange_at_zero(points: Sequence[tuple[int, int]], d: int) -> int:
    """Value at 0 of the interpolant through ``points`` (pairs ``(x_i, q_i)``)."""
    xs = [x for x, _ in points]
    weights = lagrange_coefficients_at_zero(xs, d)
    return sum(w * (q % d) for w, (_, q) in zip(weights, points)) % d


def otp_encrypt(m: int, k: int, d: int) -> int:
    return (m + k) % d


def otp_decrypt(c: int, k: int, d: int) -> int:
    return (c - k) % d
