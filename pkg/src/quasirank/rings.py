"""Exact coefficient rings: ZZ, QQ, Z/mZ and cyclotomic rings over them.

Every ring hands out plain Python values (``int`` for ZZ and Z/mZ,
``Fraction`` for QQ) except the cyclotomic rings, whose elements are
:class:`CycElement` instances.  Arithmetic on plain values uses the Python
operators followed by :meth:`Ring.normalize`; this keeps the hot loops in
the series code free of method dispatch.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction


class RingMismatchError(TypeError):
    pass


class NonInvertibleError(ArithmeticError):
    """Division by a non-unit.  ``gcd`` records the obstruction when known."""

    def __init__(self, msg: str, gcd: int | None = None):
        super().__init__(msg)
        self.gcd = gcd


class Ring:
    kind = "abstract"

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        raise NotImplementedError

    def normalize(self, x):
        return x

    def is_zero(self, x) -> bool:
        return x == 0

    def inv(self, x):
        raise NotImplementedError

    def div(self, x, y):
        return self.normalize(x * self.inv(y))

    def format(self, x) -> str:
        return str(x)

    def parse(self, s: str):
        raise NotImplementedError

    @property
    def tag(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return self.tag


class IntegerRing(Ring):
    kind = "ZZ"

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def inv(self, x):
        if x in (1, -1):
            return x
        raise NonInvertibleError(f"{x} is not a unit of ZZ", gcd=abs(x))

    def div(self, x, y):
        q, r = divmod(x, y)
        if r:
            raise NonInvertibleError(f"{y} does not divide {x} in ZZ", gcd=math.gcd(x, y))
        return q

    def parse(self, s):
        return int(s)

    @property
    def tag(self):
        return "ZZ"

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")


class RationalField(Ring):
    kind = "QQ"

    def coerce(self, x):
        return Fraction(x)

    def normalize(self, x):
        return x if isinstance(x, Fraction) else Fraction(x)

    def inv(self, x):
        if x == 0:
            raise NonInvertibleError("division by zero in QQ", gcd=0)
        return 1 / Fraction(x)

    def div(self, x, y):
        if y == 0:
            raise NonInvertibleError("division by zero in QQ", gcd=0)
        return Fraction(x) / y

    def format(self, x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse(self, s):
        return Fraction(s)

    @property
    def tag(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class ResidueRing(Ring):
    kind = "Zmod"

    def __init__(self, modulus: int):
        if modulus < 2:
            raise ValueError("residue modulus must be >= 2")
        self.modulus = modulus

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x.numerator * self.inv(x.denominator % self.modulus) % self.modulus
        return int(x) % self.modulus

    def normalize(self, x):
        return x % self.modulus

    def is_zero(self, x):
        return x % self.modulus == 0

    def inv(self, x):
        g = math.gcd(x, self.modulus)
        if g != 1:
            raise NonInvertibleError(f"{x} is not a unit mod {self.modulus}", gcd=g)
        return pow(x, -1, self.modulus)

    def parse(self, s):
        return int(s) % self.modulus

    @property
    def tag(self):
        return f"Zmod({self.modulus})"

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Zmod", self.modulus))


ZZ = IntegerRing()
QQ = RationalField()


def Zmod(m: int) -> ResidueRing:
    return ResidueRing(m)


# ---------------------------------------------------------------------------
# cyclotomic polynomials and rings


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (low degree first, ``den`` monic)."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    if n < 1:
        raise ValueError("cyclotomic conductor must be >= 1")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


class CyclotomicRing(Ring):
    """(base)[x] / Phi_N(x), with x standing for zeta_N = exp(2 pi i / N)."""

    kind = "Cyc"

    def __init__(self, conductor: int, base: Ring):
        if conductor < 1:
            raise ValueError("cyclotomic conductor must be >= 1")
        if isinstance(base, CyclotomicRing):
            raise TypeError("base ring of a cyclotomic ring cannot be cyclotomic")
        self.conductor = conductor
        self.base = base
        self.phi_poly = cyclotomic_polynomial(conductor)
        self.degree = len(self.phi_poly) - 1
        self._reductions = self._reduction_table()

    def _reduction_table(self):
        # x^e mod Phi_N for degree <= e <= 2*degree - 2, as integer vectors
        d = self.degree
        table = {}
        cur = [-c for c in self.phi_poly[:d]]
        for e in range(d, max(2 * d - 1, d + 1)):
            table[e] = tuple(cur)
            # multiply by x
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(d):
                    cur[i] -= top * self.phi_poly[i]
        return table

    # element construction --------------------------------------------------
    def element(self, coeffs) -> CycElement:
        coeffs = [self.base.coerce(c) for c in coeffs]
        if len(coeffs) > self.degree:
            coeffs = self._reduce_long(coeffs)
        coeffs += [self.base.zero] * (self.degree - len(coeffs))
        return CycElement(self, tuple(coeffs))

    def _reduce_long(self, coeffs):
        coeffs = list(coeffs)
        d = self.degree
        for e in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[e]
            if c:
                for i in range(d + 1):
                    coeffs[e - d + i] -= c * self.phi_poly[i]
        return [self.base.normalize(c) for c in coeffs[:d]]

    def coerce(self, x):
        if isinstance(x, CycElement):
            if x.ring == self:
                return x
            return self.embed(x)
        return self.element([x])

    def normalize(self, x):
        return x

    def is_zero(self, x):
        return x.is_zero()

    def root_power(self, a: int) -> CycElement:
        """zeta_N ** a, reduced."""
        return self._root_power(a % self.conductor)

    @functools.lru_cache(maxsize=None)
    def _root_power(self, a: int) -> CycElement:
        vec = [0] * (a + 1)
        vec[a] = 1
        return self.element(vec)

    @property
    def gen(self) -> CycElement:
        return self.root_power(1)

    def embed(self, x: CycElement) -> CycElement:
        """Map an element of a ring with conductor dividing N into this ring."""
        n0 = x.ring.conductor
        if self.conductor % n0:
            raise RingMismatchError(f"conductor {n0} does not divide {self.conductor}")
        step = self.conductor // n0
        out = self.zero
        for i, c in enumerate(x.coeffs):
            if not x.ring.base.is_zero(c):
                out = out + self.root_power(i * step) * self.base.coerce(c)
        return out

    def inv(self, x):
        return x.inverse()

    def div(self, x, y):
        return x * self.coerce(y).inverse()

    def format(self, x):
        return ",".join(self.base.format(c) for c in x.coeffs)

    def parse(self, s):
        return self.element([self.base.parse(t) for t in s.split(",")])

    @property
    def tag(self):
        return f"Cyc({self.conductor},{self.base.tag})"

    def __eq__(self, other):
        return (isinstance(other, CyclotomicRing) and other.conductor == self.conductor
                and other.base == self.base)

    def __hash__(self):
        return hash(("Cyc", self.conductor, self.base))


@functools.lru_cache(maxsize=None)
def cyclo_ring(conductor: int, base: Ring = QQ) -> CyclotomicRing:
    return CyclotomicRing(conductor, base)


class CycElement:
    """sum(coeffs[i] * zeta_N**i), always reduced modulo Phi_N."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CyclotomicRing, coeffs: tuple):
        self.ring = ring
        self.coeffs = coeffs

    def _lift(self, other):
        if isinstance(other, CycElement):
            if other.ring != self.ring:
                raise RingMismatchError(f"{other.ring} vs {self.ring}")
            return other
        return self.ring.coerce(other)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        other = self._lift(other)
        nb = self.ring.base.normalize
        return CycElement(self.ring, tuple(nb(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        nb = self.ring.base.normalize
        return CycElement(self.ring, tuple(nb(-a) for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        ring = self.ring
        nb = ring.base.normalize
        if not isinstance(other, CycElement):
            if isinstance(other, int) and other == 0:
                return ring.zero
            other = ring.base.coerce(other)
            return CycElement(ring, tuple(nb(a * other) for a in self.coeffs))
        if other.ring != ring:
            raise RingMismatchError(f"{other.ring} vs {ring}")
        d = ring.degree
        a, b = self.coeffs, other.coeffs
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:d]
        for e in range(d, 2 * d - 1):
            c = prod[e]
            if c:
                red = ring._reductions[e]
                for i in range(d):
                    if red[i]:
                        out[i] += c * red[i]
        return CycElement(ring, tuple(nb(c) for c in out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, CycElement):
            return self * other.inverse()
        return self * self.ring.base.inv(self.ring.base.coerce(other))

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_zero(self) -> bool:
        isz = self.ring.base.is_zero
        return all(isz(c) for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycElement):
            return self.ring == other.ring and self.coeffs == other.coeffs
        try:
            return self.coeffs == self.ring.coerce(other).coeffs
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c})*z^{i}" if i else f"({c})")
        return " + ".join(terms) or "0"

    def is_rational(self) -> bool:
        """True when the element lies in the base ring (only the constant coordinate)."""
        isz = self.ring.base.is_zero
        return all(isz(c) for c in self.coeffs[1:])

    def galois(self, k: int) -> CycElement:
        """Apply zeta -> zeta**k (k coprime to the conductor)."""
        if math.gcd(k, self.ring.conductor) != 1:
            raise ValueError("galois exponent must be coprime to the conductor")
        out = self.ring.zero
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + self.ring.root_power(i * k) * c
        return out

    def conjugate(self) -> CycElement:
        return self.galois(-1)

    def inverse(self) -> CycElement:
        from quasirank.linalg import solve

        ring = self.ring
        d = ring.degree
        # column i of the multiplication matrix is self * zeta^i
        cols = [(self * ring.root_power(i)).coeffs for i in range(d)]
        matrix = [[cols[j][i] for j in range(d)] for i in range(d)]
        rhs = [ring.base.one] + [ring.base.zero] * (d - 1)
        base = ring.base
        if isinstance(base, IntegerRing):
            sol = solve(matrix, rhs, QQ)
            if any(s.denominator != 1 for s in sol):
                raise NonInvertibleError(f"{self} is not a unit of {ring}")
            sol = [s.numerator for s in sol]
        else:
            sol = solve(matrix, rhs, base)
        return CycElement(ring, tuple(base.normalize(s) for s in sol))


# ---------------------------------------------------------------------------
# number-theoretic helpers


@functools.lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    # sum_{k<=m} C(m+1, k) B_k = 0 for m >= 1, B_1 = -1/2
    table = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, k) * table[k] for k in range(m))
        table.append(-s / (m + 1))
    return tuple(table)


def bernoulli(j: int) -> Fraction:
    """Exact Bernoulli number B_j with B_1 = -1/2 (so B_2 = 1/6, B_10 = 5/66)."""
    if j < 0:
        raise ValueError("Bernoulli index must be >= 0")
    return _bernoulli_table(j)[j]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p, by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def smallest_prime_factor(n: int) -> int:
    f = 2
    while f * f <= n:
        if n % f == 0:
            return f
        f += 1
    return n


def parse_ring(tag: str) -> Ring:
    tag = tag.strip()
    if tag == "ZZ":
        return ZZ
    if tag == "QQ":
        return QQ
    if tag.startswith("Zmod(") and tag.endswith(")"):
        return Zmod(int(tag[5:-1]))
    if tag.startswith("Cyc(") and tag.endswith(")"):
        inner = tag[4:-1]
        n, base = inner.split(",", 1)
        return cyclo_ring(int(n), parse_ring(base))
    raise ValueError(f"unknown ring tag {tag!r}")
