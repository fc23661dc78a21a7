"""Exact integer/rational matrices, polynomials, and lattice normal forms.

Everything here is pure and exact: matrices are tuples of tuples of ints or
Fractions, polynomials store Fraction coefficients constant-term first, and
lattices of integer vectors are kept in row-style Hermite normal form so two
descriptions of the same lattice compare equal structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple


# ---------------------------------------------------------------------------
# matrices


def identity_matrix(d: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = mat_transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def mat_det(a: Matrix):
    """Exact determinant via Bareiss fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    m[i][j] = num // prev
                else:
                    m[i][j] = Fraction(num, prev) if prev != 1 else num
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_inverse(a: Matrix) -> Matrix:
    """Exact inverse over the rationals (Gauss-Jordan)."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def mat_inverse_int(a: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix, returned with int entries."""
    inv = mat_inverse(a)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def mat_pow(a: Matrix, n: int) -> Matrix:
    if n < 0:
        return mat_pow(mat_inverse_int(a), -n)
    result = identity_matrix(len(a))
    base = a
    while n:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return len(a) == len(b) and all(
        len(r) == len(s) and all(x == y for x, y in zip(r, s))
        for r, s in zip(a, b)
    )


# ---------------------------------------------------------------------------
# polynomials (coefficients constant-term first)


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    last = len(coeffs)
    while last > 0 and coeffs[last - 1] == 0:
        last -= 1
    return tuple(coeffs[:last])


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    @classmethod
    def of(cls, coeffs: Iterable) -> "Poly":
        return cls(_trim([Fraction(c) for c in coeffs]))

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def one(cls) -> "Poly":
        return cls.of([1])

    @classmethod
    def x(cls) -> "Poly":
        return cls.of([0, 1])

    @classmethod
    def x_power_minus_one(cls, n: int) -> "Poly":
        return cls.of([-1] + [0] * (n - 1) + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    @property
    def constant(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_int_coeffs(self) -> tuple[int, ...]:
        if not self.is_integral:
            raise ValueError("polynomial has non-integer coefficients")
        return tuple(int(c) for c in self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(_trim([x + y for x, y in zip(a, b)]))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(_trim(out))

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(_trim([x * c for x in self.coeffs]))

    def divmod_by(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dn, dd = len(rem) - 1, other.degree
        if dn < dd:
            return Poly.zero(), self
        quo = [Fraction(0)] * (dn - dd + 1)
        lead = other.leading
        for i in range(dn - dd, -1, -1):
            f = rem[i + dd] / lead
            if f == 0:
                continue
            quo[i] = f
            for j, b in enumerate(other.coeffs):
                rem[i + j] -= f * b
        return Poly(_trim(quo)), Poly(_trim(rem))

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod_by(other)
        if not r.is_zero:
            raise ValueError("division is not exact")
        return q

    def divides(self, other: "Poly") -> bool:
        if self.is_zero:
            return other.is_zero
        return other.divmod_by(self)[1].is_zero

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading)

    def derivative(self) -> "Poly":
        return Poly(_trim([i * c for i, c in enumerate(self.coeffs)][1:]))

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if c.denominator != 1 else int(c))
        return acc

    def reversed_poly(self) -> "Poly":
        return Poly(_trim(tuple(reversed(self.coeffs))))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod_by(b)[1]
        return a.monic() if not a.is_zero else a

    def squarefree_decomposition(self) -> list[tuple["Poly", int]]:
        """Yun's algorithm; returns monic pairwise-coprime (factor, multiplicity)."""
        f = self.monic()
        if f.degree < 1:
            return []
        d = f.derivative()
        a = f.gcd(d)
        b = f.exact_div(a)
        c = d.exact_div(a)
        dd = c - b.derivative()
        out: list[tuple[Poly, int]] = []
        i = 1
        while b.degree >= 1:
            a = b.gcd(dd)
            if a.degree >= 1:
                out.append((a, i))
            b = b.exact_div(a)
            if b.degree >= 1:
                c = dd.exact_div(a)
                dd = c - b.derivative()
            i += 1
        return out

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            parts.append(f"{c}*{term}" if i > 0 else str(c))
        return " + ".join(parts)


def char_poly(matrix: Matrix) -> Poly:
    """Characteristic polynomial det(xI - M) via fraction-free elimination.

    Bareiss over the polynomial ring; all intermediate divisions are exact.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    m: list[list[Poly]] = [
        [
            Poly.of([-matrix[i][j], 1]) if i == j else Poly.of([-matrix[i][j]])
            for j in range(n)
        ]
        for i in range(n)
    ]
    if n == 0:
        return Poly.one()
    sign = 1
    prev = Poly.one()
    for k in range(n - 1):
        if m[k][k].is_zero:
            pivot = next((i for i in range(k + 1, n) if not m[i][k].is_zero), None)
            if pivot is None:
                return Poly.zero()
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev)
            m[i][k] = Poly.zero()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def char_poly_cofactor(matrix: Matrix) -> Poly:
    """Cofactor-expansion characteristic polynomial; oracle for small d."""
    n = len(matrix)
    entries = [
        [
            Poly.of([-matrix[i][j], 1]) if i == j else Poly.of([-matrix[i][j]])
            for j in range(n)
        ]
        for i in range(n)
    ]

    def det(rows: list[list[Poly]]) -> Poly:
        k = len(rows)
        if k == 0:
            return Poly.one()
        if k == 1:
            return rows[0][0]
        acc = Poly.zero()
        for j in range(k):
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = rows[0][j] * det(minor)
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    return det(entries)


# ---------------------------------------------------------------------------
# integer lattices (row-generator convention)


def hnf_rows(vectors: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical row-style Hermite normal form of the lattice the rows span.

    Echelon shape, positive pivots, entries above each pivot reduced into
    [0, pivot). Unique per lattice, so descriptor equality is lattice equality.
    """
    rows = [list(int(x) for x in v) for v in vectors]
    if not rows:
        return ()
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged lattice generators")
    r = 0
    for c in range(width):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[i0] = rows[i0], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c] != 0:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][c] != 0:
            if rows[r][c] < 0:
                rows[r] = [-a for a in rows[r]]
            for i in range(r):
                q = rows[i][c] // rows[r][c]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
            r += 1
    return tuple(tuple(row) for row in rows[:r] if any(row))


def lattice_contains(hnf: tuple[tuple[int, ...], ...], v: Sequence[int]) -> bool:
    w = [int(x) for x in v]
    for row in hnf:
        c = next(i for i, x in enumerate(row) if x != 0)
        if w[c] % row[c] != 0:
            return False
        q = w[c] // row[c]
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    return all(x == 0 for x in w)


def lattice_index(hnf: tuple[tuple[int, ...], ...], dim: int):
    """Index of the lattice in Z^dim; None when the lattice has lower rank."""
    if len(hnf) < dim:
        return None
    idx = 1
    for row in hnf:
        c = next(i for i, x in enumerate(row) if x != 0)
        idx *= row[c]
    return abs(idx)


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*A*V = S diagonal, d1 | d2 | ..., U, V unimodular."""
    m = len(a)
    n = len(a[0]) if m else 0
    s = [[int(x) for x in row] for row in a]
    u = [list(row) for row in identity_matrix(m)]
    v = [list(row) for row in identity_matrix(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        s[dst] = [x - q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        for row in s:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        # move a nonzero entry of minimal magnitude to the pivot position
        entries = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                   if s[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        dirty = False
        for i in range(t + 1, m):
            if s[i][t] != 0:
                q = s[i][t] // s[t][t]
                add_row(t, i, q)
                if s[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if s[t][j] != 0:
                q = s[t][j] // s[t][t]
                add_col(t, j, q)
                if s[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility of the remaining block by the pivot
        stuck = False
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if s[i][j] % s[t][t] != 0:
                    add_row(i, t, -1)
                    stuck = True
                    break
            if stuck:
                break
        if stuck:
            continue
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (
        tuple(tuple(row) for row in u),
        tuple(tuple(row) for row in s),
        tuple(tuple(row) for row in v),
    )


def integer_kernel(a: Matrix) -> tuple[tuple[int, ...], ...]:
    """Basis (as rows) of the integer solutions of A x = 0."""
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return tuple(identity_matrix(n))
    _, s, v = smith_normal_form(a)
    rank = sum(1 for i in range(min(m, n)) if s[i][i] != 0)
    cols = []
    for j in range(rank, n):
        cols.append(tuple(v[i][j] for i in range(n)))
    return hnf_rows(cols) if cols else ()


def preimage_lattice(t: Matrix, target_hnf: tuple[tuple[int, ...], ...],
                     target_dim: int) -> tuple[tuple[int, ...], ...]:
    """HNF of {c : T c lies in the target lattice}; T maps Z^d -> Z^target_dim."""
    d = len(t[0]) if t else 0
    gens = list(target_hnf)
    k = len(gens)
    stacked = tuple(
        tuple(list(t[i]) + [-gens[j][i] for j in range(k)])
        for i in range(target_dim)
    )
    kern = integer_kernel(stacked)
    return hnf_rows([row[:d] for row in kern])


def lattice_intersection(h1, h2, dim: int):
    """HNF of the intersection of two row-generated lattices in Z^dim."""
    gens1 = list(h1)
    if not gens1:
        return ()
    t = tuple(tuple(g[i] for g in gens1) for i in range(dim))
    coeffs = preimage_lattice(t, h2, dim)
    out = []
    for c in coeffs:
        vec = [0] * dim
        for x, g in zip(c, gens1):
            vec = [a + x * b for a, b in zip(vec, g)]
        out.append(vec)
    return hnf_rows(out)


# ---------------------------------------------------------------------------
# exact linear algebra over the rationals


def rref_fraction(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(map(Fraction, row)) for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace_fraction(rows: list[list[Fraction]]) -> list[tuple[Fraction, ...]]:
    """Exact basis of the right nullspace of the given matrix."""
    if not rows:
        return []
    ncols = len(rows[0])
    rr, pivots = rref_fraction(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rr[r][fc]
        basis.append(tuple(vec))
    return basis


# ---------------------------------------------------------------------------
# number-theoretic helpers


def euler_phi(m: int) -> int:
    result = m
    n = m
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


def padic_valuation(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out
