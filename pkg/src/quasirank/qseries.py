"""Truncated Laurent series in q, and bivariate series in (w, q).

A :class:`QSeries` stores the coefficients of q^val, ..., q^trunc.  Every
stored coefficient is exact; nothing above ``trunc`` is known.  Operations
compute the precision of their result from the precisions and valuations of
their inputs, so a coefficient is never reported unless it is provably right.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from quasirank.rings import (
    QQ,
    ZZ,
    CycElement,
    CyclotomicRing,
    NonInvertibleError,
    Ring,
    RingMismatchError,
    legendre,
    parse_ring,
)


class PrecisionError(IndexError):
    """Requested a coefficient beyond the valid truncation order."""


# ---------------------------------------------------------------------------
# convolution kernels


def _kron_int_mul(a: list[int], b: list[int], n: int) -> list[int]:
    """First n coefficients of a*b for integer lists, by Kronecker substitution."""
    if not a or not b or n <= 0:
        return [0] * max(n, 0)
    a = a[:n]
    b = b[:n]
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma == 0 or mb == 0:
        return [0] * n
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    shift = 8 * nbytes
    pa = sum(x << (shift * i) for i, x in enumerate(a) if x) if len(a) < 64 else _pack(a, shift)
    pb = sum(x << (shift * i) for i, x in enumerate(b) if x) if len(b) < 64 else _pack(b, shift)
    prod = pa * pb
    nout = min(n, len(a) + len(b) - 1)
    # offset every digit by B/2 so the base-B digits are nonnegative
    offset_chunk = b"\x00" * (nbytes - 1) + b"\x80"
    offset = int.from_bytes(offset_chunk * (len(a) + len(b) - 1), "little")
    raw = (prod + offset).to_bytes(nbytes * (len(a) + len(b)) + 1, "little")
    half = 1 << (shift - 1)
    out = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(nout)]
    out.extend([0] * (n - nout))
    return out


def _pack(xs: list[int], shift: int) -> int:
    # divide and conquer keeps the big-int additions balanced
    if len(xs) <= 32:
        return sum(x << (shift * i) for i, x in enumerate(xs) if x)
    mid = len(xs) // 2
    return _pack(xs[:mid], shift) + (_pack(xs[mid:], shift) << (shift * mid))


def _generic_mul(a: list, b: list, n: int, zero) -> list:
    if sum(1 for x in a if x) > sum(1 for x in b if x):
        a, b = b, a
    out = [zero] * n
    lb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j in range(min(lb, n - i)):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def convolve(a: list, b: list, n: int, ring: Ring) -> list:
    """First n coefficients of the product of two coefficient lists over ``ring``."""
    if n <= 0:
        return []
    kind = ring.kind
    if kind == "ZZ":
        return _kron_int_mul(list(a), list(b), n)
    if kind == "Zmod":
        m = ring.modulus
        la, lb = min(len(a), n), min(len(b), n)
        if la and lb and (m - 1) ** 2 * min(la, lb) < 2 ** 62:
            prod = np.convolve(np.asarray(a[:la], dtype=np.int64), np.asarray(b[:lb], dtype=np.int64))
            out = [int(x) % m for x in prod[:n]]
            out.extend([0] * (n - len(out)))
            return out
        return [x % m for x in _kron_int_mul(list(a), list(b), n)]
    if kind == "QQ":
        da = lcm(*(x.denominator for x in a)) if a else 1
        db = lcm(*(x.denominator for x in b)) if b else 1
        ia = [int(x * da) for x in a]
        ib = [int(x * db) for x in b]
        d = da * db
        return [Fraction(x, d) for x in _kron_int_mul(ia, ib, n)]
    out = _generic_mul(list(a), list(b), n, ring.zero)
    return [ring.normalize(x) for x in out]


# ---------------------------------------------------------------------------


class QSeries:
    """Truncated Laurent series sum_{val <= n <= trunc} c_n q^n over an exact ring."""

    __slots__ = ("ring", "val", "coeffs", "trunc")

    def __init__(self, ring: Ring, val: int, coeffs, trunc: int | None = None, *, raw: bool = False):
        coeffs = list(coeffs)
        if trunc is None:
            trunc = val + len(coeffs) - 1
        size = max(trunc - val + 1, 0)
        if not raw:
            coeffs = [ring.coerce(c) for c in coeffs[:size]]
        else:
            coeffs = coeffs[:size]
        if len(coeffs) < size:
            coeffs.extend([ring.zero] * (size - len(coeffs)))
        self.ring = ring
        self.val = val
        self.trunc = trunc
        self.coeffs = tuple(coeffs)

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring, trunc: int) -> QSeries:
        return cls(ring, 0, [], trunc)

    @classmethod
    def constant(cls, c, ring: Ring, trunc: int) -> QSeries:
        return cls(ring, 0, [c], trunc)

    @classmethod
    def monomial(cls, exp: int, c, ring: Ring, trunc: int) -> QSeries:
        return cls(ring, exp, [c], trunc)

    @classmethod
    def from_dict(cls, terms: dict, ring: Ring, trunc: int, val: int | None = None) -> QSeries:
        if val is None:
            val = min([e for e in terms if e <= trunc], default=0)
        coeffs = [ring.zero] * max(trunc - val + 1, 0)
        for e, c in terms.items():
            if e < val:
                raise ValueError("term below the declared valuation")
            if e <= trunc:
                coeffs[e - val] = ring.normalize(coeffs[e - val] + ring.coerce(c))
        return cls(ring, val, coeffs, trunc, raw=True)

    # access -----------------------------------------------------------------
    def __getitem__(self, n: int):
        if n > self.trunc:
            raise PrecisionError(f"coefficient of q^{n} requested, series known through q^{self.trunc}")
        if n < self.val:
            return self.ring.zero
        return self.coeffs[n - self.val]

    def coefficient(self, n: int):
        return self[n]

    def coefficient_list(self, start: int, stop: int) -> list:
        """Coefficients of q^start .. q^stop inclusive."""
        return [self[n] for n in range(start, stop + 1)]

    def items(self):
        for i, c in enumerate(self.coeffs):
            yield self.val + i, c

    def nonzero_items(self):
        isz = self.ring.is_zero
        return [(self.val + i, c) for i, c in enumerate(self.coeffs) if not isz(c)]

    def valuation(self) -> int | None:
        """Exponent of the first nonzero stored coefficient, or None."""
        isz = self.ring.is_zero
        for i, c in enumerate(self.coeffs):
            if not isz(c):
                return self.val + i
        return None

    def _lower(self) -> int:
        v = self.valuation()
        return self.trunc + 1 if v is None else v

    def is_zero(self) -> bool:
        return self.valuation() is None

    def __len__(self):
        return len(self.coeffs)

    def _check(self, other: QSeries):
        if other.ring != self.ring:
            raise RingMismatchError(f"series over {self.ring} and {other.ring}")

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            return self + QSeries.constant(other, self.ring, self.trunc)
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        val = min(self.val, other.val)
        ring = self.ring
        out = [ring.zero] * max(trunc - val + 1, 0)
        for src in (self, other):
            off = src.val - val
            for i, c in enumerate(src.coeffs[: max(trunc - src.val + 1, 0)]):
                out[off + i] = out[off + i] + c
        return QSeries(ring, val, [ring.normalize(c) for c in out], trunc, raw=True)

    __radd__ = __add__

    def __neg__(self):
        nz = self.ring.normalize
        return QSeries(self.ring, self.val, [nz(-c) for c in self.coeffs], self.trunc, raw=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> QSeries:
        c = self.ring.coerce(c)
        nz = self.ring.normalize
        return QSeries(self.ring, self.val, [nz(c * x) for x in self.coeffs], self.trunc, raw=True)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        self._check(other)
        va, vb = self._lower(), other._lower()
        trunc = min(self.trunc + vb, other.trunc + va)
        val = va + vb
        n = trunc - val + 1
        if n <= 0:
            return QSeries(self.ring, val, [], trunc)
        a = self.coeffs[va - self.val:]
        b = other.coeffs[vb - other.val:]
        return QSeries(self.ring, val, convolve(a, b, n, self.ring), trunc, raw=True)

    __rmul__ = __mul__

    def invert(self) -> QSeries:
        v = self.valuation()
        if v is None:
            raise NonInvertibleError("series is zero through its truncation")
        ring = self.ring
        lead = self[v]
        inv0 = ring.inv(lead)
        length = self.trunc - v + 1
        trunc = self.trunc - 2 * v
        xs = self.coeffs[v - self.val:]
        nzs = [(i, c) for i, c in enumerate(xs) if i and not ring.is_zero(c)]
        ys = [ring.normalize(inv0 * ring.one)]
        nz = ring.normalize
        for n in range(1, length):
            s = ring.zero
            for i, c in nzs:
                if i > n:
                    break
                s = s + c * ys[n - i]
            ys.append(nz(-s * inv0))
        return QSeries(ring, -v, ys, trunc, raw=True)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.invert()
        return self.scale(self.ring.inv(self.ring.coerce(other)))

    def __pow__(self, e: int) -> QSeries:
        if e < 0:
            return self.invert() ** (-e)
        if e == 0:
            return QSeries.constant(1, self.ring, self.trunc - self._lower())
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # structural operations ---------------------------------------------------
    def truncate(self, trunc: int) -> QSeries:
        if trunc > self.trunc:
            raise PrecisionError(f"cannot extend precision from {self.trunc} to {trunc}")
        return QSeries(self.ring, self.val, self.coeffs, trunc, raw=True)

    def shift(self, s: int) -> QSeries:
        """Multiply by q^s."""
        return QSeries(self.ring, self.val + s, self.coeffs, self.trunc + s, raw=True)

    def delta(self) -> QSeries:
        """q d/dq."""
        nz = self.ring.normalize
        return QSeries(self.ring, self.val, [nz(c * (self.val + i)) for i, c in enumerate(self.coeffs)],
                       self.trunc, raw=True)

    def rescale(self, k: int) -> QSeries:
        """Substitute q -> q^k."""
        if k < 1:
            raise ValueError("rescale factor must be positive")
        ring = self.ring
        trunc = k * self.trunc + k - 1
        out = [ring.zero] * (trunc - k * self.val + 1)
        for i, c in enumerate(self.coeffs):
            out[k * i] = c
        return QSeries(ring, k * self.val, out, trunc, raw=True)

    def extract_progression(self, A: int, B: int) -> QSeries:
        """Series whose n-th coefficient is the (A n + B)-th coefficient of self."""
        if A < 1:
            raise ValueError("progression modulus must be positive")
        nmin = -((B - self.val) // A)  # ceil((val - B) / A)
        nmax = (self.trunc - B) // A
        return QSeries(self.ring, nmin, [self[A * n + B] for n in range(nmin, nmax + 1)], nmax, raw=True)

    def map_coefficients(self, fn, ring: Ring | None = None) -> QSeries:
        ring = ring or self.ring
        return QSeries(ring, self.val, [fn(c) for c in self.coeffs], self.trunc)

    def change_ring(self, ring: Ring) -> QSeries:
        if isinstance(ring, CyclotomicRing) and not isinstance(self.ring, CyclotomicRing):
            return QSeries(ring, self.val, [ring.coerce(ring.base.coerce(c)) for c in self.coeffs], self.trunc,
                           raw=True)
        return QSeries(ring, self.val, [ring.coerce(c) for c in self.coeffs], self.trunc, raw=True)

    def reduce_mod(self, m: int) -> QSeries:
        from quasirank.rings import Zmod

        return self.change_ring(Zmod(m))

    # comparison -------------------------------------------------------------
    def agrees_with(self, other: QSeries, through: int | None = None) -> bool:
        self._check(other)
        top = min(self.trunc, other.trunc) if through is None else through
        if top > self.trunc or top > other.trunc:
            raise PrecisionError(f"comparison through q^{top} exceeds available precision")
        lo = min(self.val, other.val)
        isz = self.ring.is_zero
        return all(isz(self[n] - other[n]) for n in range(lo, top + 1))

    def first_difference(self, other: QSeries, through: int | None = None):
        """Smallest exponent where the two series differ, or None."""
        top = min(self.trunc, other.trunc) if through is None else through
        isz = self.ring.is_zero
        for n in range(min(self.val, other.val), top + 1):
            if not isz(self[n] - other[n]):
                return n
        return None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.ring == other.ring and self.trunc == other.trunc and self.agrees_with(other)

    __hash__ = None

    def __repr__(self):
        terms = [f"{c}*q^{e}" for e, c in self.nonzero_items()[:8]]
        more = " + ..." if len(self.nonzero_items()) > 8 else ""
        return f"QSeries[{self.ring}]({' + '.join(terms) or '0'}{more} + O(q^{self.trunc + 1}))"

    # serialization ----------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"ring={self.ring.tag} val={self.val} trunc={self.trunc}"]
        lines.extend(self.ring.format(c) for c in self.coeffs)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> QSeries:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=", 1) for tok in _split_header(lines[0]))
        ring = parse_ring(header["ring"])
        val, trunc = int(header["val"]), int(header["trunc"])
        coeffs = [ring.parse(ln.strip()) for ln in lines[1:]]
        if len(coeffs) != max(trunc - val + 1, 0):
            raise ValueError("coefficient count does not match header")
        return cls(ring, val, coeffs, trunc, raw=True)


def _split_header(line: str) -> list[str]:
    # ring tags contain commas but no spaces
    return line.split()


# ---------------------------------------------------------------------------
# bivariate series


class WQSeries:
    """sum_{0<=n<=trunc} (Laurent polynomial in w) q^n; rows are {m: coeff} dicts."""

    __slots__ = ("ring", "rows", "trunc")

    def __init__(self, ring: Ring, rows, trunc: int | None = None):
        rows = list(rows)
        if trunc is None:
            trunc = len(rows) - 1
        rows = rows[: trunc + 1]
        rows.extend({} for _ in range(trunc + 1 - len(rows)))
        isz = ring.is_zero
        self.ring = ring
        self.trunc = trunc
        self.rows = tuple({m: c for m, c in row.items() if not isz(c)} for row in rows)

    @classmethod
    def constant(cls, ring: Ring, trunc: int, wpoly: dict | None = None) -> WQSeries:
        wpoly = {0: ring.one} if wpoly is None else {m: ring.coerce(c) for m, c in wpoly.items()}
        return cls(ring, [wpoly], trunc)

    @classmethod
    def from_qseries(cls, x: QSeries) -> WQSeries:
        if x.val < 0:
            raise ValueError("bivariate series start at q^0")
        return cls(x.ring, [{0: x[n]} for n in range(x.trunc + 1)], x.trunc)

    def row(self, n: int) -> dict:
        if n > self.trunc:
            raise PrecisionError(f"row {n} beyond truncation {self.trunc}")
        return dict(self.rows[n])

    def coefficient(self, m: int, n: int):
        return self.row(n).get(m, self.ring.zero)

    def _check(self, other):
        if other.ring != self.ring:
            raise RingMismatchError(f"series over {self.ring} and {other.ring}")

    def __add__(self, other: WQSeries) -> WQSeries:
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        rows = []
        for n in range(trunc + 1):
            row = dict(self.rows[n])
            for m, c in other.rows[n].items():
                row[m] = self.ring.normalize(row.get(m, self.ring.zero) + c)
            rows.append(row)
        return WQSeries(self.ring, rows, trunc)

    def __neg__(self):
        nz = self.ring.normalize
        return WQSeries(self.ring, [{m: nz(-c) for m, c in row.items()} for row in self.rows], self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> WQSeries:
        c = self.ring.coerce(c)
        nz = self.ring.normalize
        return WQSeries(self.ring, [{m: nz(c * x) for m, x in row.items()} for row in self.rows], self.trunc)

    def mul_wpoly(self, poly: dict) -> WQSeries:
        """Multiply by a Laurent polynomial in w given as {exponent: coeff}."""
        ring = self.ring
        poly = {e: ring.coerce(c) for e, c in poly.items()}
        rows = []
        for row in self.rows:
            out: dict = {}
            for m, c in row.items():
                for e, d in poly.items():
                    out[m + e] = out.get(m + e, ring.zero) + c * d
            rows.append({m: ring.normalize(c) for m, c in out.items()})
        return WQSeries(ring, rows, self.trunc)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            other = WQSeries.from_qseries(other)
        if not isinstance(other, WQSeries):
            return self.scale(other)
        self._check(other)
        ring = self.ring
        lo_a = next((n for n, r in enumerate(self.rows) if r), self.trunc + 1)
        lo_b = next((n for n, r in enumerate(other.rows) if r), other.trunc + 1)
        trunc = min(self.trunc + lo_b, other.trunc + lo_a)
        rows = []
        for n in range(trunc + 1):
            out: dict = {}
            for i in range(max(0, n - other.trunc), min(n, self.trunc) + 1):
                ra, rb = self.rows[i], other.rows[n - i]
                if not ra or not rb:
                    continue
                for m1, c1 in ra.items():
                    for m2, c2 in rb.items():
                        out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
            rows.append({m: ring.normalize(c) for m, c in out.items()})
        return WQSeries(ring, rows, trunc)

    __rmul__ = __mul__

    def div_one_minus(self, wexp: int, qexp: int) -> WQSeries:
        """Divide by (1 - w^wexp q^qexp), qexp >= 1."""
        if qexp < 1:
            raise ValueError("geometric division needs a positive q exponent")
        ring = self.ring
        rows: list[dict] = []
        for n in range(self.trunc + 1):
            row = dict(self.rows[n])
            if n >= qexp:
                for m, c in rows[n - qexp].items():
                    row[m + wexp] = row.get(m + wexp, ring.zero) + c
            rows.append({m: ring.normalize(c) for m, c in row.items() if not ring.is_zero(c)})
        return WQSeries(ring, rows, self.trunc)

    def mul_one_minus(self, wexp: int, qexp: int) -> WQSeries:
        """Multiply by (1 - w^wexp q^qexp), qexp >= 1."""
        ring = self.ring
        rows = []
        for n in range(self.trunc + 1):
            row = dict(self.rows[n])
            if n >= qexp:
                for m, c in self.rows[n - qexp].items():
                    row[m + wexp] = row.get(m + wexp, ring.zero) - c
            rows.append({m: ring.normalize(c) for m, c in row.items()})
        return WQSeries(ring, rows, self.trunc)

    def delta_q(self) -> WQSeries:
        nz = self.ring.normalize
        return WQSeries(self.ring, [{m: nz(n * c) for m, c in row.items()} for n, row in enumerate(self.rows)],
                        self.trunc)

    def delta_w(self) -> WQSeries:
        nz = self.ring.normalize
        return WQSeries(self.ring, [{m: nz(m * c) for m, c in row.items()} for row in self.rows], self.trunc)

    def weighted(self, weight, ring: Ring | None = None) -> QSeries:
        """sum_n (sum_m weight(m) c(m, n)) q^n; ``weight`` maps an integer to a ring value."""
        ring = ring or self.ring
        out = []
        for row in self.rows:
            s = ring.zero
            for m, c in row.items():
                s = s + weight(m) * c
            out.append(ring.normalize(s))
        return QSeries(ring, 0, out, self.trunc)

    def moment(self, j: int) -> QSeries:
        """[delta_w^j F]_{w=1}."""
        return self.weighted(lambda m: m ** j)

    def specialize(self, w) -> QSeries:
        """Evaluate at w (a CycElement, or a rational number)."""
        if isinstance(w, CycElement):
            return self.weighted(lambda m: w ** m, w.ring)
        w = Fraction(w)
        return self.weighted(lambda m: w ** m, QQ)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def nonzero_rows(self) -> list[int]:
        return [n for n, r in enumerate(self.rows) if r]

    def agrees_with(self, other: WQSeries, through: int | None = None) -> bool:
        top = min(self.trunc, other.trunc) if through is None else through
        return all(self.rows[n] == other.rows[n] for n in range(top + 1))

    def change_ring(self, ring: Ring) -> WQSeries:
        return WQSeries(ring, [{m: ring.coerce(c) for m, c in row.items()} for row in self.rows], self.trunc)

    def __repr__(self):
        return f"WQSeries[{self.ring}](rows 0..{self.trunc})"


def series_ring_for(*values) -> Ring:
    """Smallest of ZZ/QQ containing the given plain values."""
    return QQ if any(isinstance(v, Fraction) and v.denominator != 1 for v in values) else ZZ


def legendre_24(n: int, ell: int) -> int:
    return legendre(1 - 24 * n, ell)
