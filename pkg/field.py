"""
Dense linear algebra over finite fields.

PrimeField works mod p. ExtensionField works in F_{p^k}, with elements
encoded as integers sum c_i p^i. Matrices are numpy int64 arrays with
entries in [0, order). Subspaces are kept in canonical reduced row-echelon
form, so equal subspaces compare equal byte for byte.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem

from config import ENUMERATION_BUDGET, MAX_FIELD_ORDER, check_prime


class DimensionMismatch(ValueError):
    def __init__(self, left: int, right: int, what: str = "ambient dimension"):
        super().__init__(f"{what} mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class EnumerationBudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int, label: str):
        super().__init__(
            f"undecided over {label}: {count} subspaces exceed the enumeration budget {budget}; "
            f"reduce p for this query or raise budget"
        )
        self.count = count
        self.budget = budget
        self.label = label


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# -- polynomials over F_p, as used to build extension fields ---------------

def _to_poly(a: int, p: int) -> List:
    digits = []
    while a:
        digits.append(a % p)
        a //= p
    return ZZ.map(list(reversed(digits)))


def _from_poly(f: Sequence, p: int) -> int:
    value = 0
    for c in f:
        value = value * p + int(c)
    return value


def smallest_irreducible(p: int, degree: int) -> List:
    """Lexicographically smallest monic irreducible of the given degree over F_p."""
    for code in range(p ** degree, 2 * p ** degree):
        f = _to_poly(code, p)
        if gf_irreducible_p(f, p, ZZ):
            return f
    raise ValueError(f"no irreducible polynomial of degree {degree} over F_{p}")


def _times(c: int, p: int, degree: int, modulus: List) -> np.ndarray:
    """Multiplication by c on digit vectors, as a degree x degree matrix over F_p."""
    cols = []
    for j in range(degree):
        v = _from_poly(gf_rem(gf_mul(_to_poly(c, p), _to_poly(p ** j, p), p, ZZ), modulus, p, ZZ), p)
        cols.append([(v // p ** i) % p for i in range(degree)])
    return np.array(cols, dtype=np.int64).T


def _generator(p: int, degree: int, modulus: List) -> int:
    q = p ** degree
    primes = list(factorint(q - 1))
    one = ZZ.map([1])
    for g in range(2, q):
        gp = _to_poly(g, p)
        if all(gf_pow_mod(gp, (q - 1) // r, modulus, p, ZZ) != one for r in primes):
            return g
    raise ValueError(f"no generator found for F_{p}^{degree}")


@functools.lru_cache(maxsize=None)
def _field_tables(p: int, degree: int) -> Tuple[Tuple[int, ...], np.ndarray, np.ndarray]:
    """(modulus, exp table, log table) for F_{p^degree}; exp[i] = g^i."""
    modulus = smallest_irreducible(p, degree)
    q = p ** degree
    powers = p ** np.arange(degree, dtype=np.int64)
    g = _generator(p, degree, modulus)
    exp = np.array([1], dtype=np.int64)
    step = g
    while exp.size < q - 1:
        digits = (exp[np.newaxis, :] // powers[:, np.newaxis]) % p
        block = powers @ ((_times(step, p, degree, modulus) @ digits) % p)
        exp = np.concatenate([exp, block])
        step = _from_poly(gf_rem(gf_mul(_to_poly(step, p), _to_poly(step, p), p, ZZ), modulus, p, ZZ), p)
    exp = exp[:q - 1]
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1, dtype=np.int64)
    return tuple(int(c) for c in modulus), exp, log


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    basis: np.ndarray  # (dim, ambient_dim), canonical RREF, no zero rows

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def key(self) -> Tuple[int, int, bytes]:
        return (self.ambient_dim, self.dim, self.basis.tobytes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def to_lists(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.basis]

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, basis={self.to_lists()})"


class PrimeField:
    """Arithmetic and linear algebra mod a prime p."""

    degree = 1

    def __init__(self, p: int):
        self.p = check_prime(p)
        self.order = self.p

    @property
    def label(self) -> str:
        return f"F_{self.p}" if self.degree == 1 else f"F_{self.p}^{self.degree}"

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, PrimeField) and other.p == self.p
                and other.degree == self.degree)

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p, self.degree))

    def extension(self, degree: int) -> "PrimeField":
        """F_{p^degree}, sharing this field's prime."""
        if degree == self.degree:
            return self
        if self.degree != 1:
            raise ValueError(f"extensions are built over F_{self.p}, not {self.label}")
        return ExtensionField(self.p, degree)

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    # -- elementwise arithmetic -----------------------------------------

    def reduce(self, m) -> np.ndarray:
        return np.asarray(m, dtype=np.int64) % self.p

    def add(self, a, b) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) + b) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) - b) % self.p

    def neg(self, a) -> np.ndarray:
        return (-np.asarray(a, dtype=np.int64)) % self.p

    def mul(self, a, b) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) * b) % self.p

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    # -- matrices -------------------------------------------------------

    def array(self, rows, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return np.zeros(shape, dtype=np.int64)
        m = np.array(rows, dtype=np.int64)
        if shape is not None:
            m = m.reshape(shape)
        return self.reduce(m)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatch(a.shape[1], b.shape[0], "inner dimension")
        return (a @ b) % self.p

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int,
                      nonzero: bool = False) -> np.ndarray:
        low = 1 if nonzero else 0
        return rng.integers(low, self.order, size=(rows, cols), dtype=np.int64)

    # -- echelon forms --------------------------------------------------

    def rref_pivots(self, m: np.ndarray) -> Tuple[np.ndarray, List[int]]:
        """Reduced row-echelon form (same shape) and its pivot columns."""
        r = np.array(self.reduce(m), dtype=np.int64)
        rows, cols = r.shape
        pivots: List[int] = []
        row = 0
        for col in range(cols):
            if row == rows:
                break
            nz = np.nonzero(r[row:, col])[0]
            if nz.size == 0:
                continue
            found = row + int(nz[0])
            if found != row:
                r[[row, found]] = r[[found, row]]
            r[row] = self.mul(r[row], self.inv(r[row, col]))
            factors = r[:, col].copy()
            factors[row] = 0
            r = self.sub(r, self.mul(factors[:, np.newaxis], r[row][np.newaxis, :]))
            pivots.append(col)
            row += 1
        return r, pivots

    def rref(self, m: np.ndarray) -> np.ndarray:
        return self.rref_pivots(m)[0]

    def rank(self, m: np.ndarray) -> int:
        if m.shape[0] == 0 or m.shape[1] == 0:
            return 0
        return len(self.rref_pivots(m)[1])

    def _det(self, rows: List[List[np.ndarray]]) -> np.ndarray:
        """Determinant of a square matrix whose entries are value vectors."""
        if len(rows) == 1:
            return rows[0][0]
        total = np.zeros_like(rows[0][0])
        for j in range(len(rows)):
            minor = [row[:j] + row[j + 1:] for row in rows[1:]]
            term = self.mul(rows[0][j], self._det(minor))
            total = self.add(total, term) if j % 2 == 0 else self.sub(total, term)
        return total

    def rank_at_most(self, w0: np.ndarray, w1: np.ndarray, bound: int,
                     ts: np.ndarray) -> np.ndarray:
        """The values t in ts with rank(w0 + t w1) <= bound.

        Every (bound+1)-minor of the pencil must vanish; minors are evaluated
        on all surviving t at once, so the survivors shrink to the common
        roots after the first minor that is not identically zero.
        """
        rows, cols = w0.shape
        if bound < 0:
            return ts[:0]
        size = bound + 1
        if size > rows or size > cols:
            return ts
        alive = np.asarray(ts, dtype=np.int64)
        for rs in itertools.combinations(range(rows), size):
            for cs in itertools.combinations(range(cols), size):
                if alive.size == 0:
                    return alive
                entries = [[self.add(np.full(alive.shape, w0[r, c], dtype=np.int64),
                                     self.mul(alive, int(w1[r, c])))
                            for c in cs] for r in rs]
                alive = alive[self._det(entries) == 0]
        return alive

    # -- subspaces ------------------------------------------------------

    def span(self, vectors, ambient_dim: int) -> Subspace:
        if ambient_dim == 0 or len(vectors) == 0:
            return self.zero(ambient_dim)
        v = self.reduce(np.array(vectors, dtype=np.int64).reshape(-1, ambient_dim))
        r, pivots = self.rref_pivots(v)
        return Subspace(ambient_dim, r[:len(pivots)].copy())

    def zero(self, n: int) -> Subspace:
        return Subspace(n, np.zeros((0, n), dtype=np.int64))

    def full(self, n: int) -> Subspace:
        return Subspace(n, self.identity(n))

    def image(self, m: np.ndarray) -> Subspace:
        """Column space of m inside F^{rows}."""
        return self.span(m.T, m.shape[0])

    def kernel(self, m: np.ndarray) -> Subspace:
        """Null space {x : m x = 0} inside F^{cols}."""
        cols = m.shape[1]
        if m.shape[0] == 0:
            return self.full(cols)
        r, pivots = self.rref_pivots(m)
        free = [c for c in range(cols) if c not in pivots]
        vectors = []
        for f in free:
            v = np.zeros(cols, dtype=np.int64)
            v[f] = 1
            for i, pc in enumerate(pivots):
                v[pc] = self.neg(r[i, f])
            vectors.append(v)
        return self.span(vectors, cols)

    def image_of(self, m: np.ndarray, sub: Subspace) -> Subspace:
        """m applied to a subspace of its source."""
        if m.shape[1] != sub.ambient_dim:
            raise DimensionMismatch(m.shape[1], sub.ambient_dim)
        if sub.dim == 0:
            return self.zero(m.shape[0])
        return self.span(self.matmul(m, sub.basis.T).T, m.shape[0])

    def annihilator(self, sub: Subspace) -> Subspace:
        """Functionals vanishing on sub, in dual coordinates."""
        return self.kernel(sub.basis) if sub.dim else self.full(sub.ambient_dim)

    def preimage(self, m: np.ndarray, sub: Subspace) -> Subspace:
        """{x : m x in sub}."""
        if m.shape[0] != sub.ambient_dim:
            raise DimensionMismatch(m.shape[0], sub.ambient_dim)
        ann = self.annihilator(sub)
        if ann.dim == 0:
            return self.full(m.shape[1])
        return self.kernel(self.matmul(ann.basis, m))

    def _check(self, a: Subspace, b: Subspace):
        if a.ambient_dim != b.ambient_dim:
            raise DimensionMismatch(a.ambient_dim, b.ambient_dim)

    def sum(self, a: Subspace, b: Subspace) -> Subspace:
        self._check(a, b)
        return self.span(np.vstack([a.basis, b.basis]), a.ambient_dim)

    def intersect(self, a: Subspace, b: Subspace) -> Subspace:
        """Zassenhaus: reduce [[A, A], [B, 0]] and keep right halves of rows with zero left half."""
        self._check(a, b)
        n = a.ambient_dim
        if a.dim == 0 or b.dim == 0:
            return self.zero(n)
        top = np.hstack([a.basis, a.basis])
        bottom = np.hstack([b.basis, np.zeros_like(b.basis)])
        r, _ = self.rref_pivots(np.vstack([top, bottom]))
        rows = [row[n:] for row in r if not row[:n].any() and row[n:].any()]
        return self.span(rows, n)

    def contains(self, a: Subspace, b: Subspace) -> bool:
        """True iff b is a subspace of a."""
        self._check(a, b)
        if b.dim == 0:
            return True
        return self.sum(a, b).dim == a.dim

    def contains_vector(self, a: Subspace, v: np.ndarray) -> bool:
        return self.contains(a, self.span([v], a.ambient_dim))

    def complement(self, sub: Subspace, ambient: Subspace) -> np.ndarray:
        """Rows of ambient's basis that extend sub to a basis of ambient."""
        self._check(sub, ambient)
        chosen = []
        current = sub
        for row in ambient.basis:
            grown = self.sum(current, self.span([row], ambient.ambient_dim))
            if grown.dim > current.dim:
                chosen.append(row)
                current = grown
        if not chosen:
            return np.zeros((0, ambient.ambient_dim), dtype=np.int64)
        return np.array(chosen, dtype=np.int64)

    def reduce_mod(self, sub: Subspace, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of vectors in F^n / sub, on the non-pivot columns of sub."""
        v = np.array(self.reduce(vectors), dtype=np.int64).reshape(-1, sub.ambient_dim)
        pivots = []
        for row in sub.basis:
            pc = int(np.nonzero(row)[0][0])
            v = self.sub(v, self.mul(v[:, pc:pc + 1], row[np.newaxis, :]))
            pivots.append(pc)
        keep = [c for c in range(sub.ambient_dim) if c not in pivots]
        return v[:, keep]

    def solve(self, a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
        """Some x with a x = b, or None."""
        rows, cols = a.shape
        if b.shape[0] != rows:
            raise DimensionMismatch(rows, b.shape[0], "right-hand side length")
        if cols == 0:
            return np.zeros(0, dtype=np.int64) if not self.reduce(b).any() else None
        aug = np.hstack([self.reduce(a), self.reduce(b).reshape(-1, 1)])
        r, pivots = self.rref_pivots(aug)
        if cols in pivots:
            return None
        x = np.zeros(cols, dtype=np.int64)
        for i, pc in enumerate(pivots):
            x[pc] = r[i, cols]
        return x

    # -- enumeration ----------------------------------------------------

    def subspace_count(self, n: int, k: int) -> int:
        return gaussian_binomial(n, k, self.order)

    def enumerate_subspaces(self, ambient: Subspace, dim: int,
                            budget: int = ENUMERATION_BUDGET) -> Iterator[Subspace]:
        """Every dim-dimensional subspace of ambient, once each, in echelon order."""
        n = ambient.dim
        if dim < 0 or dim > n:
            raise DimensionMismatch(dim, n, "subspace dimension")
        count = self.subspace_count(n, dim)
        if count > budget:
            raise EnumerationBudgetExceeded(count, budget, self.label)
        return self._subspaces(ambient, dim)

    def _subspaces(self, ambient: Subspace, dim: int) -> Iterator[Subspace]:
        n = ambient.dim
        if dim == 0:
            yield self.zero(ambient.ambient_dim)
            return
        for pivots in itertools.combinations(range(n), dim):
            pivot_set = set(pivots)
            free = [(i, j) for i, pc in enumerate(pivots)
                    for j in range(pc + 1, n) if j not in pivot_set]
            for values in itertools.product(range(self.order), repeat=len(free)):
                e = np.zeros((dim, n), dtype=np.int64)
                for i, pc in enumerate(pivots):
                    e[i, pc] = 1
                for (i, j), v in zip(free, values):
                    e[i, j] = v
                yield self.span(self.matmul(e, ambient.basis), ambient.ambient_dim)


class ExtensionField(PrimeField):
    """F_{p^k} as F_p[x]/(f), f the smallest monic irreducible of degree k.

    An element sum c_i x^i is stored as the integer sum c_i p^i, so F_p sits
    inside as 0..p-1 and a module over F_p is a module over F_{p^k} as is.
    Products go through exp/log tables of a fixed generator.
    """

    def __init__(self, p: int, degree: int):
        super().__init__(p)
        if degree < 2:
            raise ValueError(f"extension degree must be at least 2, got {degree}")
        order = self.p ** degree
        if order > MAX_FIELD_ORDER:
            raise ValueError(f"F_{self.p}^{degree} has {order} elements; the limit is {MAX_FIELD_ORDER}")
        self.degree = degree
        self.order = order
        self.modulus, self._exp, self._log = _field_tables(self.p, degree)
        self._powers = self.p ** np.arange(degree, dtype=np.int64)

    def __repr__(self) -> str:
        return f"ExtensionField({self.p}, {self.degree})"

    def _digits(self, a: np.ndarray) -> np.ndarray:
        """Coefficient vectors along a new leading axis."""
        powers = self._powers.reshape((-1,) + (1,) * a.ndim)
        return (a[np.newaxis] // powers) % self.p

    def _undigits(self, digits: np.ndarray) -> np.ndarray:
        return np.tensordot(self._powers, digits % self.p, axes=1).astype(np.int64)

    def _pair(self, a, b) -> Tuple[np.ndarray, np.ndarray]:
        return np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def reduce(self, m) -> np.ndarray:
        m = np.array(m, dtype=np.int64)
        if m.size and (m.min() < 0 or m.max() >= self.order):
            raise ValueError(f"entries over {self.label} must lie in [0, {self.order})")
        return m

    def add(self, a, b) -> np.ndarray:
        a, b = self._pair(a, b)
        return self._undigits(self._digits(a) + self._digits(b))

    def sub(self, a, b) -> np.ndarray:
        a, b = self._pair(a, b)
        return self._undigits(self._digits(a) - self._digits(b))

    def neg(self, a) -> np.ndarray:
        return self._undigits(-self._digits(np.asarray(a, dtype=np.int64)))

    def mul(self, a, b) -> np.ndarray:
        a, b = self._pair(a, b)
        out = self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out).astype(np.int64)

    def inv(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of {self.label}")
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self._exp[(-self._log[a]) % (self.order - 1)])

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatch(a.shape[1], b.shape[0], "inner dimension")
        if a.size == 0 or b.size == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        products = self.mul(a[:, :, np.newaxis], b[np.newaxis, :, :])
        return self._undigits(self._digits(products).sum(axis=2))
