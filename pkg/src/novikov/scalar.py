"""Exact arithmetic in F_2(q), the rational-function subfield of F_2((q)).

Polynomials over F_2 are plain nonnegative ints: bit i is the coefficient
of q^i, addition is XOR.  A :class:`NovikovScalar` is stored as
``q^shift * num / den`` with ``num`` and ``den`` both having a nonzero
constant term and ``gcd(num, den) = 1``; zero is ``(0, 1, 0)``.  With this
canonical form the q-adic valuation is just ``shift``.
"""

from __future__ import annotations

import math
import re

__all__ = [
    "NovikovScalar",
    "ZERO",
    "ONE",
    "Q",
    "monomial",
    "parse_scalar",
    "as_scalar",
    "poly_mul",
    "poly_divmod",
    "poly_gcd",
    "poly_str",
]


# --- F_2[q] as ints ---------------------------------------------------------

def poly_mul(a: int, b: int) -> int:
    """Carry-less product of two F_2 polynomials."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    c = 0
    while a:
        low = a & -a
        c ^= b << (low.bit_length() - 1)
        a ^= low
    return c


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    n = b.bit_length()
    quo = 0
    while a.bit_length() >= n:
        s = a.bit_length() - n
        a ^= b << s
        quo ^= 1 << s
    return quo, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def poly_square(a: int) -> int:
    # Frobenius: spread the bits, (sum a_i q^i)^2 = sum a_i q^{2i}
    c = 0
    i = 0
    while a:
        if a & 1:
            c |= 1 << (2 * i)
        a >>= 1
        i += 1
    return c


def _trailing_zeros(a: int) -> int:
    return (a & -a).bit_length() - 1


def poly_str(a: int) -> str:
    if a == 0:
        return "0"
    terms = []
    i = 0
    while a:
        if a & 1:
            terms.append("1" if i == 0 else "q" if i == 1 else f"q^{i}")
        a >>= 1
        i += 1
    return "+".join(terms)


# --- the field ---------------------------------------------------------------

class NovikovScalar:
    """An element of F_2(q) in canonical form ``q^shift * num / den``."""

    __slots__ = ("num", "den", "shift")

    def __init__(self, num: int = 0, den: int = 1, shift: int = 0):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            num, den, shift = 0, 1, 0
        else:
            tn, td = _trailing_zeros(num), _trailing_zeros(den)
            num >>= tn
            den >>= td
            shift += tn - td
            if den != 1:
                g = poly_gcd(num, den)
                if g != 1:
                    num = poly_divmod(num, g)[0]
                    den = poly_divmod(den, g)[0]
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "shift", shift)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovScalar is immutable")

    @classmethod
    def _raw(cls, num: int, den: int, shift: int) -> NovikovScalar:
        # caller guarantees canonical form
        obj = object.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        object.__setattr__(obj, "shift", shift)
        return obj

    @classmethod
    def laurent(cls, bits: int, low: int = 0) -> NovikovScalar:
        """The Laurent polynomial ``q^low * bits``."""
        return cls(bits, 1, low)

    # predicates and accessors

    def __bool__(self) -> bool:
        return self.num != 0

    def is_zero(self) -> bool:
        return self.num == 0

    def is_laurent(self) -> bool:
        return self.den == 1

    def is_monomial(self) -> bool:
        return self.den == 1 and self.num == 1

    def valuation(self) -> float | int:
        """Order of vanishing at q = 0; ``math.inf`` for zero."""
        return math.inf if self.num == 0 else self.shift

    def coefficient(self, k: int) -> int:
        """F_2 coefficient of q^k.  Only defined for Laurent polynomials."""
        if self.den != 1:
            raise ValueError(f"{self} is not a Laurent polynomial")
        j = k - self.shift
        return (self.num >> j) & 1 if j >= 0 else 0

    def exponents(self) -> list[int]:
        """Powers of q with coefficient 1 (Laurent polynomials only)."""
        if self.den != 1:
            raise ValueError(f"{self} is not a Laurent polynomial")
        out, a, i = [], self.num, self.shift
        while a:
            if a & 1:
                out.append(i)
            a >>= 1
            i += 1
        return out

    def series(self, terms: int) -> list[int]:
        """First ``terms`` coefficients of the q-adic expansion, starting at q^shift."""
        if self.num == 0:
            return [0] * terms
        # den has constant term 1, so long division by increasing powers works
        out = []
        r = self.num
        for _ in range(terms):
            bit = r & 1
            out.append(bit)
            if bit:
                r ^= self.den
            r >>= 1
        return out

    # arithmetic

    def __add__(self, other: NovikovScalar) -> NovikovScalar:
        if not isinstance(other, NovikovScalar):
            other = as_scalar(other)
        if self.num == 0:
            return other
        if other.num == 0:
            return self
        s = min(self.shift, other.shift)
        a = self.num << (self.shift - s)
        b = other.num << (other.shift - s)
        if self.den == 1 and other.den == 1:
            c = a ^ b
            if c == 0:
                return ZERO
            t = _trailing_zeros(c)
            return NovikovScalar._raw(c >> t, 1, s + t)
        if self.den == other.den:
            return NovikovScalar(a ^ b, self.den, s)
        return NovikovScalar(poly_mul(a, other.den) ^ poly_mul(b, self.den),
                             poly_mul(self.den, other.den), s)

    __sub__ = __add__
    __radd__ = __add__
    __rsub__ = __add__

    def __neg__(self) -> NovikovScalar:
        return self

    def __mul__(self, other: NovikovScalar) -> NovikovScalar:
        if not isinstance(other, NovikovScalar):
            other = as_scalar(other)
        if self.num == 0 or other.num == 0:
            return ZERO
        if self.den == 1 and other.den == 1:
            # product of odd polys is odd, so already canonical
            return NovikovScalar._raw(poly_mul(self.num, other.num), 1,
                                      self.shift + other.shift)
        return NovikovScalar(poly_mul(self.num, other.num),
                             poly_mul(self.den, other.den),
                             self.shift + other.shift)

    __rmul__ = __mul__

    def inv(self) -> NovikovScalar:
        if self.num == 0:
            raise ZeroDivisionError("inverse of zero in F_2(q)")
        return NovikovScalar._raw(self.den, self.num, -self.shift)

    def __truediv__(self, other: NovikovScalar) -> NovikovScalar:
        if not isinstance(other, NovikovScalar):
            other = as_scalar(other)
        return self * other.inv()

    def __rtruediv__(self, other) -> NovikovScalar:
        return as_scalar(other) * self.inv()

    def __pow__(self, e: int) -> NovikovScalar:
        if e < 0:
            return self.inv() ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def square(self) -> NovikovScalar:
        """Frobenius endomorphism; squaring is additive in characteristic 2."""
        if self.num == 0:
            return ZERO
        return NovikovScalar._raw(poly_square(self.num), poly_square(self.den),
                                  2 * self.shift)

    def shifted(self, k: int) -> NovikovScalar:
        """Multiply by q^k."""
        if self.num == 0 or k == 0:
            return self
        return NovikovScalar._raw(self.num, self.den, self.shift + k)

    # comparison / hashing

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other in (0, 1):
            other = as_scalar(other)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return (self.num == other.num and self.den == other.den
                and self.shift == other.shift)

    def __hash__(self) -> int:
        return hash((self.num, self.den, self.shift))

    def __repr__(self) -> str:
        return f"NovikovScalar({str(self)!r})"

    def __str__(self) -> str:
        if self.num == 0:
            return "0"
        parts = []
        if self.shift:
            parts.append("q" if self.shift == 1 else f"q^{self.shift}")
        if self.num != 1 or not parts:
            body = poly_str(self.num)
            wrap = "+" in body and (parts or self.den != 1)
            parts.append(f"({body})" if wrap else body)
        text = "*".join(parts)
        if self.den != 1:
            den = poly_str(self.den)
            text += f"/({den})" if "+" in den else f"/{den}"
        return text


def as_scalar(x) -> NovikovScalar:
    """Accept a scalar, its text form, or the ints 0 and 1."""
    if isinstance(x, NovikovScalar):
        return x
    if isinstance(x, int) and x in (0, 1):
        return ONE if x else ZERO
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as an element of F_2(q)")


ZERO = NovikovScalar._raw(0, 1, 0)
ONE = NovikovScalar._raw(1, 1, 0)
Q = NovikovScalar._raw(1, 1, 1)

_MONOMIALS: dict[int, NovikovScalar] = {}


def monomial(k: int) -> NovikovScalar:
    """q^k (cached)."""
    m = _MONOMIALS.get(k)
    if m is None:
        m = _MONOMIALS[k] = NovikovScalar._raw(1, 1, k)
    return m


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\^)|([-+*/()]))")


class _Parser:
    # expr := term (('+'|'-') term)*
    # term := power (('*'|'/')? power)*
    # power := atom ('^' ['-'] int)?
    # atom := int | 'q' | '(' expr ')'

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"bad scalar {self.text!r} at offset {pos}")
            self.tokens.append(m.group(m.lastindex))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"bad scalar {self.text!r}: expected {expected or 'token'}")
        self.i += 1
        return tok

    def parse(self) -> NovikovScalar:
        value = self.expr()
        if self.peek() is not None:
            raise ValueError(f"bad scalar {self.text!r}: trailing {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            self.take()
            value = value + self.term()
        return value

    def term(self):
        value = self.power()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                value = value * self.power()
            elif tok == "/":
                self.take()
                value = value / self.power()
            elif tok in ("q", "("):
                value = value * self.power()
            else:
                return value

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            exp = self.take()
            if not exp.isdigit():
                raise ValueError(f"bad exponent in {self.text!r}")
            return base ** (sign * int(exp))
        return base

    def atom(self):
        tok = self.take()
        if tok == "q":
            return Q
        if tok == "(":
            value = self.expr()
            self.take(")")
            return value
        if tok.isdigit():
            return ONE if int(tok) % 2 else ZERO
        raise ValueError(f"bad scalar {self.text!r}: unexpected {tok!r}")


def parse_scalar(text: str) -> NovikovScalar:
    """Parse the textual form, e.g. ``q^-1*(1+q^2)/(1+q)``.

    Integers are read mod 2, ``-`` is the same as ``+``, and juxtaposition
    means multiplication.  ``str()`` of any scalar parses back to itself.
    """
    return _Parser(text).parse()
