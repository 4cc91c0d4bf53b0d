"""Exact scalars: rationals, Gaussian rationals, finite fields GF(p^l).

Rationals are :class:`fractions.Fraction` (always reduced).  Every scalar type
is immutable.  A :class:`Field` object ties a family of scalars together and
provides parsing, formatting and checked arithmetic; elements also support the
ordinary Python operators.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import cached_property

from .errors import DivisionByZero, FieldMismatch, InvalidField, ParseError

Rational = Fraction


def _ceil_log2(n: int) -> int:
    # ceil(log2 n) for n >= 1
    return (n - 1).bit_length()


def height(x) -> int:
    """Bit-height ``ceil(log2 q) + max(1, ceil(log2 2|p|))`` of ``p/q``.

    The reduced representation is used; ``height(0) == 1``.
    """
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    tail = 1 if p == 0 else max(1, 1 + _ceil_log2(abs(p)))
    return _ceil_log2(q) + tail


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return None


class GaussianRational:
    """``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, GaussianInteger):
            return cls(other.re, other.im)
        f = _as_fraction(other)
        if f is not None:
            return cls(f, 0)
        return None

    def _other(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FFElem):
                raise FieldMismatch("cannot combine Q(i) and GF scalars")
            return NotImplemented
        return o

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return QQI.format(self)


class GaussianInteger:
    """Element of Z[i]; used by fraction-free elimination over Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        self.re = int(re)
        self.im = int(im)

    @staticmethod
    def _c(other):
        if isinstance(other, GaussianInteger):
            return other
        if isinstance(other, int):
            return GaussianInteger(other, 0)
        return None

    def __add__(self, other):
        o = self._c(other)
        if o is None:
            return NotImplemented
        return GaussianInteger(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._c(other)
        if o is None:
            return NotImplemented
        return GaussianInteger(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._c(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._c(other)
        if o is None:
            return NotImplemented
        return GaussianInteger(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianInteger(-self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __divmod__(self, other):
        # Euclidean division with nearest-integer rounding: N(rem) <= N(other)/2
        o = self._c(other)
        n = o.norm()
        if n == 0:
            raise DivisionByZero("division by zero in Z[i]")
        a = self.re * o.re + self.im * o.im
        b = self.im * o.re - self.re * o.im
        q = GaussianInteger((2 * a + n) // (2 * n), (2 * b + n) // (2 * n))
        return q, self - q * o

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def exact_div(self, other):
        q, rem = divmod(self, other)
        if rem:
            raise ArithmeticError(f"{other} does not divide {self} in Z[i]")
        return q

    def __eq__(self, other):
        o = self._c(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianInteger({self.re}, {self.im})"

    def to_rational(self) -> GaussianRational:
        return GaussianRational(self.re, self.im)


def gaussian_gcd(a: GaussianInteger, b: GaussianInteger) -> GaussianInteger:
    while b:
        a, b = b, divmod(a, b)[1]
    return a


class FFElem:
    """Element of GF(p^l): coordinates w.r.t. powers of the modulus root."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "GaloisField", coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def _other(self, other):
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, (Fraction, GaussianRational, GaussianInteger)):
            raise FieldMismatch(f"cannot combine {self.field} with {type(other).__name__}")
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FFElem(self.field, [(a + b) % p for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FFElem(self.field, [(a - b) % p for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, [(-a) % p for a in self.coeffs])

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, self.field._mul_coeffs(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self):
        if not any(self.coeffs):
            raise DivisionByZero(f"inverse of zero in {self.field}")
        q = self.field.order
        return self ** (q - 2)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FFElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"FFElem({self.field}, {list(self.coeffs)})"

    def __str__(self):
        return self.field.format(self)


# ---------------------------------------------------------------- fields


class Field:
    """A field of scalars; see :data:`QQ`, :data:`QQI` and :class:`GaloisField`."""

    tag = "?"
    characteristic = 0
    order = None  # None for infinite fields

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def from_int(self, n: int):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check(self, x):
        if not self.contains(x):
            raise FieldMismatch(f"{x!r} is not an element of {self}")
        return x

    def coerce(self, x):
        if isinstance(x, int) and not isinstance(x, bool):
            return self.from_int(x)
        return self.check(x)

    def add(self, a, b):
        return self.check(a) + self.check(b)

    def sub(self, a, b):
        return self.check(a) - self.check(b)

    def mul(self, a, b):
        return self.check(a) * self.check(b)

    def neg(self, a):
        return -self.check(a)

    def inv(self, a):
        self.check(a)
        if not a:
            raise DivisionByZero(f"inverse of zero in {self}")
        return self.one / a

    def div(self, a, b):
        self.check(a)
        self.check(b)
        if not b:
            raise DivisionByZero(f"division by zero in {self}")
        return a / b

    def eq(self, a, b) -> bool:
        return self.check(a) == self.check(b)

    def is_zero(self, a) -> bool:
        return not self.check(a)

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def spec_line(self) -> str:
        """The ``field ...`` header line used by the file formats."""
        return f"field {self.tag}"

    def __repr__(self):
        return self.spec_line()[len("field "):]


_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _parse_rational(text: str) -> Fraction:
    if not _RAT_RE.match(text):
        raise ParseError(f"not a rational number: {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


class RationalField(Field):
    tag = "Q"

    def from_int(self, n):
        return Fraction(n)

    def contains(self, x):
        return isinstance(x, Fraction)

    def coerce(self, x):
        if isinstance(x, int) and not isinstance(x, bool):
            return Fraction(x)
        return self.check(x)

    def parse(self, text):
        return _parse_rational(text.strip())

    def format(self, x):
        return str(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class GaussianRationalField(Field):
    tag = "QI"

    def from_int(self, n):
        return GaussianRational(n, 0)

    def contains(self, x):
        return isinstance(x, GaussianRational)

    def coerce(self, x):
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return GaussianRational(x, 0)
        return self.check(x)

    def parse(self, text):
        s = text.strip().replace(" ", "")
        if not s:
            raise ParseError("empty scalar")
        if not s.endswith("i"):
            return GaussianRational(_parse_rational(s), 0)
        body = s[:-1]
        if body.endswith("*"):
            body = body[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split > 0 and body[split - 1] not in "*/":
            re_text, im_text = body[:split], body[split:]
        else:
            re_text, im_text = "", body
        if im_text in ("", "+"):
            im = Fraction(1)
        elif im_text == "-":
            im = Fraction(-1)
        else:
            im = _parse_rational(im_text)
        re_part = _parse_rational(re_text) if re_text else Fraction(0)
        return GaussianRational(re_part, im)

    def format(self, x):
        if x.im == 0:
            return str(x.re)
        im = f"{x.im}*i"
        if x.re == 0:
            return im
        if x.im < 0:
            return f"{x.re}{im}"
        return f"{x.re}+{im}"

    def __eq__(self, other):
        return isinstance(other, GaussianRationalField)

    def __hash__(self):
        return hash("QI")


# ------------------------------------------------------- GF(p)[x] helpers


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


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a, m, p):
    """Remainder of ``a`` modulo ``m`` over GF(p); coefficient lists, low degree first."""
    a = _poly_trim(x % p for x in a)
    m = _poly_trim(x % p for x in m)
    if not m:
        raise DivisionByZero("polynomial modulus is zero")
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for k, mk in enumerate(m):
            a[shift + k] = (a[shift + k] - c * mk) % p
        a = _poly_trim(a)
    return a


def monic_polys(p: int, degree: int):
    """All monic polynomials of the given degree over GF(p), low degree first."""
    for tail in itertools.product(range(p), repeat=degree):
        yield list(tail) + [1]


def is_irreducible(modulus, p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg/2."""
    m = _poly_trim(c % p for c in modulus)
    deg = len(m) - 1
    if deg < 1:
        return False
    for k in range(1, deg // 2 + 1):
        for cand in monic_polys(p, k):
            if not poly_mod(m, cand, p):
                return False
    return True


# Conway polynomials, low degree first, for p^l <= 64.
CONWAY_POLYNOMIALS = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


class GaloisField(Field):
    """GF(p^l) represented as GF(p)[x] / (modulus)."""

    tag = "GF"

    def __init__(self, p: int, l: int = 1, modulus=None):
        if not is_prime(p):
            raise InvalidField(f"{p} is not prime")
        if l < 1:
            raise InvalidField(f"extension degree must be >= 1, got {l}")
        if l == 1:
            modulus = (0, 1)
        elif modulus is None:
            if (p, l) not in CONWAY_POLYNOMIALS:
                raise InvalidField(f"no default modulus for GF({p}^{l}); supply one")
            modulus = CONWAY_POLYNOMIALS[(p, l)]
        modulus = tuple(int(c) % p for c in modulus)
        if len(_poly_trim(modulus)) != l + 1 or modulus[-1] != 1:
            raise InvalidField(f"modulus must be monic of degree {l}: {list(modulus)}")
        if l > 1 and not is_irreducible(modulus, p):
            raise InvalidField(f"modulus {list(modulus)} is reducible over GF({p})")
        self.p = p
        self.l = l
        self.modulus = modulus
        self.characteristic = p
        self.order = p ** l

    def __eq__(self, other):
        return (isinstance(other, GaloisField) and self.p == other.p
                and self.l == other.l and self.modulus == other.modulus)

    def __hash__(self):
        return hash(("GF", self.p, self.l, self.modulus))

    def _mul_coeffs(self, a, b):
        p, l = self.p, self.l
        if l == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * l - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        red = poly_mod(prod, self.modulus, p)
        return tuple(red + [0] * (l - len(red)))

    def from_int(self, n):
        return FFElem(self, [n % self.p] + [0] * (self.l - 1))

    def element(self, index: int) -> FFElem:
        """Element whose base-p digits (low first) are its coordinates."""
        coeffs = []
        for _ in range(self.l):
            index, digit = divmod(index, self.p)
            coeffs.append(digit)
        return FFElem(self, coeffs)

    def index(self, x: FFElem) -> int:
        self.check(x)
        return sum(c * self.p ** k for k, c in enumerate(x.coeffs))

    @cached_property
    def elements(self) -> tuple:
        return tuple(self.element(k) for k in range(self.order))

    def contains(self, x):
        return isinstance(x, FFElem) and x.field == self

    def parse(self, text):
        s = text.strip().replace(" ", "")
        if self.l == 1:
            if not re.fullmatch(r"\d+", s):
                raise ParseError(f"not a GF({self.p}) element: {text!r}")
            v = int(s)
            if v >= self.p:
                raise ParseError(f"{v} is outside [0, {self.p})")
            return self.from_int(v)
        if not (s.startswith("[") and s.endswith("]")):
            raise ParseError(f"GF({self.p}^{self.l}) element must be [a0,...]: {text!r}")
        parts = [t for t in s[1:-1].split(",") if t]
        if len(parts) != self.l or not all(re.fullmatch(r"\d+", t) for t in parts):
            raise ParseError(f"expected {self.l} coordinates in {text!r}")
        vals = [int(t) for t in parts]
        if any(v >= self.p for v in vals):
            raise ParseError(f"coordinate outside [0, {self.p}) in {text!r}")
        return FFElem(self, vals)

    def format(self, x):
        if self.l == 1:
            return str(x.coeffs[0])
        return "[" + ",".join(str(c) for c in x.coeffs) + "]"

    def spec_line(self):
        if self.l == 1:
            return f"field GF {self.p} 1"
        return f"field GF {self.p} {self.l} [{','.join(map(str, self.modulus))}]"


QQ = RationalField()
QQI = GaussianRationalField()


def parse_field(tokens) -> Field:
    """Parse the tokens after ``field``: ``Q`` | ``QI`` | ``GF p l [modulus]``."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    if not tokens:
        raise ParseError("missing field tag")
    tag = tokens[0]
    if tag == "Q" and len(tokens) == 1:
        return QQ
    if tag == "QI" and len(tokens) == 1:
        return QQI
    if tag == "GF" and len(tokens) in (2, 3, 4):
        try:
            p = int(tokens[1])
            l = int(tokens[2]) if len(tokens) > 2 else 1
        except ValueError as exc:
            raise ParseError(f"bad GF parameters: {tokens}") from exc
        modulus = None
        if len(tokens) == 4:
            m = tokens[3]
            if not (m.startswith("[") and m.endswith("]")):
                raise ParseError(f"modulus must be [c0,...,cl]: {m!r}")
            try:
                modulus = [int(t) for t in m[1:-1].split(",") if t]
            except ValueError as exc:
                raise ParseError(f"bad modulus {m!r}") from exc
        return GaloisField(p, l, modulus)
    raise ParseError(f"unknown field specification: {' '.join(tokens)}")


# ------------------------------------------------------- integer rings


class IntegerRing:
    """Z, the ring that rational matrices are cleared into."""

    tag = "Z"
    fraction_field = QQ

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def __repr__(self):
        return "Z"


class GaussianIntegerRing:
    """Z[i], the ring that Q(i) matrices are cleared into."""

    tag = "ZI"
    fraction_field = QQI

    def contains(self, x):
        return isinstance(x, GaussianInteger)

    def __repr__(self):
        return "Z[i]"


ZZ = IntegerRing()
ZZI = GaussianIntegerRing()
