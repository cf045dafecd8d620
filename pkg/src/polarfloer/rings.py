"""Exact arithmetic over GF(2) and its polynomial, Laurent and group rings.

Polynomials over GF(2) are stored as nonnegative integers: the polynomial
c_0 + c_1 t + ... + c_n t^n corresponds to the bitmask c_0 + c_1*2 + ... + c_n*2^n,
so addition is XOR and multiplication by t is a left shift.  Laurent elements
store a polynomial together with its minimum exponent, which makes
multiplication by t^-1 an O(1) shift.  Group-ring elements a + b*iota keep the
two GF(2) coordinates.
"""

from __future__ import annotations


class F2Poly:
    """Polynomial in t over GF(2), immutable, bitmask-backed."""

    __slots__ = ("bits",)

    def __init__(self, bits: int = 0):
        if bits < 0:
            raise ValueError("bitmask must be nonnegative")
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, *a):
        raise AttributeError("F2Poly is immutable")

    @classmethod
    def from_coeffs(cls, coeffs) -> "F2Poly":
        bits = 0
        for e, c in enumerate(coeffs):
            if c & 1:
                bits |= 1 << e
        return cls(bits)

    @classmethod
    def from_exponents(cls, exponents) -> "F2Poly":
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def monomial(cls, e: int) -> "F2Poly":
        if e < 0:
            raise ValueError("F2Poly exponents must be nonnegative")
        return cls(1 << e)

    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return self.bits.bit_length() - 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def is_one(self) -> bool:
        return self.bits == 1

    def coeff(self, e: int) -> int:
        return (self.bits >> e) & 1 if e >= 0 else 0

    def exponents(self):
        return [e for e in range(self.bits.bit_length()) if (self.bits >> e) & 1]

    def __add__(self, other: "F2Poly") -> "F2Poly":
        return F2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "F2Poly") -> "F2Poly":
        a, b = self.bits, other.bits
        if a < b:
            a, b = b, a
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            a <<= 1
            b >>= 1
        return F2Poly(acc)

    def shift(self, k: int) -> "F2Poly":
        """Multiply by t^k (k >= 0)."""
        if k < 0:
            raise ValueError("negative shift leaves F2[t]")
        return F2Poly(self.bits << k)

    def divmod(self, other: "F2Poly"):
        if other.bits == 0:
            raise ZeroDivisionError("division by zero polynomial")
        a, b = self.bits, other.bits
        db = b.bit_length() - 1
        q = 0
        da = a.bit_length() - 1
        while da >= db:
            q ^= 1 << (da - db)
            a ^= b << (da - db)
            da = a.bit_length() - 1
        return F2Poly(q), F2Poly(a)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __pow__(self, k: int) -> "F2Poly":
        acc, base = F2Poly(1), self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        return isinstance(other, F2Poly) and self.bits == other.bits

    def __hash__(self):
        return hash(("F2Poly", self.bits))

    def lowest_exponent(self) -> int:
        """Exponent of the lowest nonzero term; -1 for zero."""
        if self.bits == 0:
            return -1
        return (self.bits & -self.bits).bit_length() - 1

    def __str__(self):
        if self.bits == 0:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else ("t" if e == 1 else f"t^{e}"))
        return "+".join(terms)

    __repr__ = __str__


def f2poly_gcd(a: F2Poly, b: F2Poly) -> F2Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a


def f2poly_gcdex(a: F2Poly, b: F2Poly):
    """Extended Euclid: (x, y, g) with x*a + y*b = g = gcd(a, b)."""
    x0, y0, r0 = F2Poly(1), F2Poly(0), a
    x1, y1, r1 = F2Poly(0), F2Poly(1), b
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        x0, x1 = x1, x0 + q * x1
        y0, y1 = y1, y0 + q * y1
        r0, r1 = r1, r
    return x0, y0, r0


def laurent_inverse_series(p: F2Poly, order: int) -> F2Poly:
    """Truncated inverse of p with constant term 1: p * q = 1 mod t^(order+1).

    This is the series-inversion behind the top Stiefel-Whitney number of a
    negative bundle, w(-eta) = w(eta)^-1.
    """
    if p.coeff(0) != 1:
        raise ValueError("series inverse needs constant term 1")
    mask = (1 << (order + 1)) - 1
    q = 1
    a = p.bits & mask
    # Newton iteration: q <- q*(2 - a q) collapses to q <- q*(a*q) ^ ... over
    # GF(2) use q <- q + q*(a*q + 1), doubling precision each round.
    prec = 1
    while prec <= order:
        prec *= 2
        m = (1 << (prec + 1)) - 1
        aq = (F2Poly(a & m) * F2Poly(q)).bits & m
        q = (q ^ (F2Poly(q) * F2Poly(aq ^ 1)).bits) & m
    return F2Poly(q & mask)


class F2Laurent:
    """Laurent polynomial over GF(2): t^shift * poly with poly(0) != 0 unless zero."""

    __slots__ = ("shift", "poly")

    def __init__(self, shift: int = 0, poly: F2Poly = F2Poly(0)):
        if poly.is_zero():
            shift = 0
        else:
            low = poly.lowest_exponent()
            if low:
                poly = F2Poly(poly.bits >> low)
                shift += low
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "poly", poly)

    def __setattr__(self, *a):
        raise AttributeError("F2Laurent is immutable")

    @classmethod
    def from_exponents(cls, exponents) -> "F2Laurent":
        if not exponents:
            return cls()
        lo = min(exponents)
        bits = 0
        for e in exponents:
            bits ^= 1 << (e - lo)
        return cls(lo, F2Poly(bits))

    @classmethod
    def monomial(cls, e: int) -> "F2Laurent":
        return cls(e, F2Poly(1))

    @classmethod
    def from_poly(cls, p: F2Poly) -> "F2Laurent":
        return cls(0, p)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_unit(self) -> bool:
        return self.poly.is_one()

    def min_exponent(self) -> int:
        return self.shift

    def max_exponent(self) -> int:
        return self.shift + self.poly.degree()

    def exponents(self):
        return [self.shift + e for e in self.poly.exponents()]

    def __add__(self, other: "F2Laurent") -> "F2Laurent":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.shift, other.shift)
        bits = (self.poly.bits << (self.shift - lo)) ^ (other.poly.bits << (other.shift - lo))
        return F2Laurent(lo, F2Poly(bits))

    __sub__ = __add__

    def __mul__(self, other: "F2Laurent") -> "F2Laurent":
        return F2Laurent(self.shift + other.shift, self.poly * other.poly)

    def times_t(self, k: int) -> "F2Laurent":
        if self.is_zero():
            return self
        return F2Laurent(self.shift + k, self.poly)

    def __eq__(self, other):
        return (
            isinstance(other, F2Laurent)
            and self.shift == other.shift
            and self.poly == other.poly
        )

    def __hash__(self):
        return hash(("F2Laurent", self.shift, self.poly.bits))

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else ("t" if e == 1 else f"t^{e}"))
        return "+".join(terms)

    __repr__ = __str__


class GroupRingElem:
    """Element a + b*iota of F2[Z/2], with iota^2 = 1."""

    __slots__ = ("a", "b")

    def __init__(self, a: int = 0, b: int = 0):
        object.__setattr__(self, "a", a & 1)
        object.__setattr__(self, "b", b & 1)

    def __setattr__(self, *x):
        raise AttributeError("GroupRingElem is immutable")

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        # units of F2[Z/2] are 1 and iota
        return (self.a ^ self.b) == 1

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        return GroupRingElem(self.a ^ other.a, self.b ^ other.b)

    __sub__ = __add__

    def __mul__(self, other: "GroupRingElem") -> "GroupRingElem":
        # (a + b i)(c + d i) = (ac + bd) + (ad + bc) i
        return GroupRingElem(
            (self.a & other.a) ^ (self.b & other.b),
            (self.a & other.b) ^ (self.b & other.a),
        )

    def conj(self) -> "GroupRingElem":
        """Apply iota -> iota (identity on coefficients, swap is the action)."""
        return GroupRingElem(self.a, self.b)

    def __eq__(self, other):
        return isinstance(other, GroupRingElem) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash(("GroupRingElem", self.a, self.b))

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        if self.a:
            parts.append("1")
        if self.b:
            parts.append("i")
        return "+".join(parts)

    __repr__ = __str__


GR_ZERO = GroupRingElem(0, 0)
GR_ONE = GroupRingElem(1, 0)
GR_IOTA = GroupRingElem(0, 1)
GR_ONE_PLUS_IOTA = GroupRingElem(1, 1)


class _GF2Domain:
    """GF(2) as a domain object; elements are the ints 0 and 1."""

    name = "GF2"
    is_field = True

    zero = 0
    one = 1

    @staticmethod
    def add(x, y):
        return x ^ y

    @staticmethod
    def mul(x, y):
        return x & y

    @staticmethod
    def is_zero(x):
        return x == 0

    @staticmethod
    def is_unit(x):
        return x == 1

    @staticmethod
    def divmod(x, y):
        if y == 0:
            raise ZeroDivisionError
        return x, 0

    @staticmethod
    def euclid_size(x):
        # all nonzero elements are units
        return 0

    @staticmethod
    def normalize(x):
        return x, 1

    @staticmethod
    def gcdex(x, y):
        if x:
            return 1, 0, 1
        if y:
            return 0, 1, 1
        return 0, 0, 0

    @staticmethod
    def to_str(x):
        return str(x)


class _F2PolyDomain:
    """F2[t] as a Euclidean domain of F2Poly elements."""

    name = "F2[t]"
    is_field = False

    zero = F2Poly(0)
    one = F2Poly(1)

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def is_unit(x):
        return x.is_one()

    @staticmethod
    def divmod(x, y):
        return x.divmod(y)

    @staticmethod
    def euclid_size(x):
        return x.degree()

    @staticmethod
    def normalize(x):
        # GF(2) leading coefficients are already 1; nothing to scale
        return x, F2Poly(1)

    @staticmethod
    def gcdex(x, y):
        return f2poly_gcdex(x, y)

    @staticmethod
    def to_str(x):
        return str(x)


class _F2LaurentDomain:
    """F2[t, t^-1]: a PID in which every element is t^k * (unit-normalized poly)."""

    name = "F2[t,t^-1]"
    is_field = False

    zero = F2Laurent()
    one = F2Laurent(0, F2Poly(1))

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def is_unit(x):
        return x.is_unit()

    @staticmethod
    def divmod(x, y):
        if y.is_zero():
            raise ZeroDivisionError
        q, r = x.poly.divmod(y.poly)
        return (
            F2Laurent(x.shift - y.shift, q),
            F2Laurent(x.shift, r),
        )

    @staticmethod
    def euclid_size(x):
        # t-powers are units, so size is the degree of the unit-normalized part
        return x.poly.degree()

    @staticmethod
    def normalize(x):
        if x.is_zero():
            return x, F2Laurent(0, F2Poly(1))
        return F2Laurent(0, x.poly), F2Laurent.monomial(-x.shift)

    @staticmethod
    def gcdex(x, y):
        a, b, g = f2poly_gcdex(x.poly, y.poly)
        return (
            F2Laurent(-x.shift, a),
            F2Laurent(-y.shift, b),
            F2Laurent(0, g),
        )

    @staticmethod
    def to_str(x):
        return str(x)


class _GroupRingDomain:
    """F2[Z/2]; not a domain (1+i is nilpotent mod 2), no SNF support."""

    name = "F2[Z/2]"
    is_field = False

    zero = GR_ZERO
    one = GR_ONE

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def is_unit(x):
        return x.is_unit()

    @staticmethod
    def to_str(x):
        return str(x)


GF2 = _GF2Domain()
F2T = _F2PolyDomain()
F2LAU = _F2LaurentDomain()
F2Z2 = _GroupRingDomain()


def parse_ring_element(ring, s: str):
    """Parse the CLI string form of a ring element ("t^2+t^5", "1+i", "t^-1+1")."""
    s = s.strip().replace(" ", "")
    if s in ("", "0"):
        return ring.zero
    terms = s.split("+")
    if ring is GF2:
        acc = 0
        for term in terms:
            if term != "1":
                raise ValueError(f"bad GF(2) element {s!r}")
            acc ^= 1
        return acc
    if ring is F2Z2:
        acc = GR_ZERO
        for term in terms:
            if term == "1":
                acc = acc + GR_ONE
            elif term == "i":
                acc = acc + GR_IOTA
            else:
                raise ValueError(f"bad F2[Z/2] element {s!r}")
        return acc
    exps = []
    for term in terms:
        if term == "1":
            exps.append(0)
        elif term == "t":
            exps.append(1)
        elif term.startswith("t^"):
            exps.append(int(term[2:]))
        else:
            raise ValueError(f"bad {ring.name} element {s!r}")
    if ring is F2T:
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in F2[t] element {s!r}")
        return F2Poly.from_exponents(exps)
    if ring is F2LAU:
        return F2Laurent.from_exponents(exps)
    raise ValueError(f"unknown ring {ring!r}")


def ring_by_name(name: str):
    return {"GF2": GF2, "F2[t]": F2T, "F2[t,t^-1]": F2LAU, "F2[Z/2]": F2Z2}[name]
