"""Exact arithmetic in the field Q(q) of rational functions in one variable q.

Values are kept fully normalized: a QRat is q^k * num(q)/den(q) with integer
polynomials num, den sharing no factor (including integer content), both with
nonzero constant term (powers of q are pulled out into k), and den having a
positive leading coefficient.  Equality is therefore structural.

Also provides the q-combinatorics ([m]_q, [m]!_q, q-binomials) and the
behaviour of a rational function at q = 1 (vanishing order and leading value),
which is what membership in the local ring at q - 1 is tested against.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

# ---------------------------------------------------------------------------
# integer polynomials, stored as tuples of coefficients, constant term first,
# no trailing (leading-coefficient) zeros; () is the zero polynomial
# ---------------------------------------------------------------------------


def _ptrim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    c = list(a)
    for i, x in enumerate(b):
        c[i] += x
    return _ptrim(c)


def _pneg(a):
    return tuple(-x for x in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    c = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                c[i + j] += x * y
    return _ptrim(c)


def _pcontent(a) -> int:
    g = 0
    for x in a:
        g = math.gcd(g, x)
        if g == 1:
            return 1
    return g


def _pdiv_int(a, n: int):
    return tuple(x // n for x in a)


def _prem(u, v):
    """Pseudo-remainder of u by v over Z (constant-term-first coefficient lists)."""
    u = list(u)
    dv = len(v)
    lv = v[-1]
    while len(u) >= dv and u:
        lu = u[-1]
        if lv != 1:
            for i in range(len(u)):
                u[i] *= lv
        shift = len(u) - dv
        for i in range(dv):
            u[shift + i] -= lu * v[i]
        while u and u[-1] == 0:
            u.pop()
    return u


def _pgcd(a, b):
    """gcd in Z[q] including integer content, normalized to positive leading coeff."""
    if not a:
        g = b
    elif not b:
        g = a
    elif len(a) == 1 or len(b) == 1:
        g = (math.gcd(_pcontent(a), _pcontent(b)),)
    else:
        ca, cb = _pcontent(a), _pcontent(b)
        u, v = list(_pdiv_int(a, ca)), list(_pdiv_int(b, cb))
        if len(u) < len(v):
            u, v = v, u
        while v:
            r = _prem(u, v)
            if r:
                c = _pcontent(r)
                if c != 1:
                    r = [x // c for x in r]
            u, v = v, r
        cu = _pcontent(u)
        cg = math.gcd(ca, cb)
        g = tuple(x // cu * cg for x in u)
    if g and g[-1] < 0:
        g = _pneg(g)
    return g


def _pquo_exact(a, b):
    """a // b when the division is exact over Z[q] and b has nonzero constant term."""
    if not a:
        return ()
    if b == (1,):
        return tuple(a)
    r = list(a)
    b0 = b[0]
    n = len(a) - len(b) + 1
    out = [0] * n
    for i in range(n):
        ri = r[i]
        if ri:
            c = ri // b0
            out[i] = c
            for j, y in enumerate(b):
                r[i + j] -= c * y
    assert not any(r), "non-exact polynomial division"
    return _ptrim(out)


def _pshift_count(a) -> int:
    n = 0
    while n < len(a) and a[n] == 0:
        n += 1
    return n


def _peval1(a) -> int:
    return sum(a)


def _pdiv_qminus1(a):
    """Divide by (q-1); requires a(1) = 0.  Synthetic division at root 1."""
    r = 0
    out = [0] * (len(a) - 1)
    for i in range(len(a) - 1, -1, -1):
        r += a[i]
        if i > 0:
            out[i - 1] = r
    assert r == 0
    return _ptrim(out)


class IntPoly:
    """Integer Laurent polynomial: coefficient tuple plus lowest-exponent offset."""

    __slots__ = ("coeffs", "offset")

    def __init__(self, coeffs, offset=0):
        c = list(coeffs)
        lead = _ptrim(c)
        low = _pshift_count(lead)
        self.coeffs = lead[low:]
        self.offset = offset + low if lead else 0

    def __eq__(self, other):
        return isinstance(other, IntPoly) and (self.coeffs, self.offset) == (other.coeffs, other.offset)

    def __repr__(self):
        return f"IntPoly({self.coeffs!r}, offset={self.offset})"


# ---------------------------------------------------------------------------
# QRat
# ---------------------------------------------------------------------------


class QRat:
    """Element of Q(q): q^k * num/den in lowest terms, structurally unique."""

    __slots__ = ("k", "num", "den", "_hash")

    def __init__(self, k: int, num: tuple, den: tuple, _normalized=False):
        if _normalized:
            self.k, self.num, self.den = k, num, den
            self._hash = None
            return
        if not num or not any(num):
            self.k, self.num, self.den = 0, (), (1,)
            self._hash = None
            return
        num = _ptrim(list(num))
        if den == (1,):
            sn = _pshift_count(num)
            self.k, self.num, self.den = k + sn, num[sn:], (1,)
            self._hash = None
            return
        den = _ptrim(list(den))
        if not den:
            raise ZeroDivisionError("zero denominator in Q(q)")
        sn, sd = _pshift_count(num), _pshift_count(den)
        k += sn - sd
        num, den = num[sn:], den[sd:]
        if den != (1,):
            g = _pgcd(num, den)
            if g != (1,):
                num, den = _pquo_exact(num, g), _pquo_exact(den, g)
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        self.k, self.num, self.den = k, num, den
        self._hash = None

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "QRat":
        return _small_int(n)

    @staticmethod
    def from_fraction(f: Fraction) -> "QRat":
        return QRat(0, (f.numerator,), (f.denominator,))

    @staticmethod
    def q_power(k: int) -> "QRat":
        return QRat(k, (1,), (1,), _normalized=True)

    @staticmethod
    def from_laurent(pairs) -> "QRat":
        """Sum of c * q^e over (e, c) pairs."""
        if not pairs:
            return ZERO
        lo = min(e for e, _ in pairs)
        hi = max(e for e, _ in pairs)
        c = [0] * (hi - lo + 1)
        for e, v in pairs:
            c[e - lo] += v
        return QRat(lo, tuple(c), (1,))

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    # -- ring/field operations -------------------------------------------------
    # the engine multiplies and adds the same values over and over, so the
    # binary operations are value-cached

    def __add__(self, other):
        if not isinstance(other, QRat):
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        key = (self, other)
        out = _ADD_CACHE.get(key)
        if out is not None:
            return out
        k = min(self.k, other.k)
        a = self.num if self.k == k else _pmul(self.num, _qpow_tuple(self.k - k))
        b = other.num if other.k == k else _pmul(other.num, _qpow_tuple(other.k - k))
        if self.den == other.den:
            out = QRat(k, _padd(a, b), self.den)
        else:
            out = QRat(k, _padd(_pmul(a, other.den), _pmul(b, self.den)), _pmul(self.den, other.den))
        _ADD_CACHE[key] = out
        return out

    def __neg__(self):
        if not self.num:
            return self
        return QRat(self.k, _pneg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        if not isinstance(other, QRat):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QRat):
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.den == (1,) and other.den == (1,):
            if len(self.num) == 1 and self.num[0] == 1:
                return QRat(self.k + other.k, other.num, (1,), _normalized=True)
            if len(other.num) == 1 and other.num[0] == 1:
                return QRat(self.k + other.k, self.num, (1,), _normalized=True)
            return QRat(self.k + other.k, _pmul(self.num, other.num), (1,), _normalized=True)
        key = (self, other)
        out = _MUL_CACHE.get(key)
        if out is not None:
            return out
        # cross-cancel before multiplying to keep intermediates small
        n1, d2 = self.num, other.den
        g = _pgcd(n1, d2)
        if g != (1,):
            n1, d2 = _pquo_exact(n1, g), _pquo_exact(d2, g)
        n2, d1 = other.num, self.den
        g = _pgcd(n2, d1)
        if g != (1,):
            n2, d1 = _pquo_exact(n2, g), _pquo_exact(d1, g)
        num, den = _pmul(n1, n2), _pmul(d1, d2)
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        out = QRat(self.k + other.k, num, den, _normalized=True)
        _MUL_CACHE[key] = out
        return out

    def inverse(self) -> "QRat":
        if not self.num:
            raise ZeroDivisionError("division by zero in Q(q)")
        num, den = self.den, self.num
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        return QRat(-self.k, num, den, _normalized=True)

    def __truediv__(self, other):
        if not isinstance(other, QRat):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure ---------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, QRat) and (self.k, self.num, self.den) == (other.k, other.num, other.den)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.k, self.num, self.den))
        return self._hash

    def numerator_laurent(self) -> IntPoly:
        return IntPoly(self.num, self.k if self.k > 0 else 0)

    def denominator_laurent(self) -> IntPoly:
        return IntPoly(self.den, -self.k if self.k < 0 else 0)

    # -- q = 1 behaviour -----------------------------------------------------------

    def at_q1(self):
        """Vanishing order at q = 1 and the value of self/(q-1)^order there.

        The zero element reports (+inf, 0).  Negative order means a pole.
        """
        if not self.num:
            return (math.inf, Fraction(0))
        num, den = self.num, self.den
        order = 0
        while _peval1(num) == 0:
            num = _pdiv_qminus1(num)
            order += 1
        while _peval1(den) == 0:
            den = _pdiv_qminus1(den)
            order -= 1
        return (order, Fraction(_peval1(num), _peval1(den)))

    def eval_fraction(self, q0: Fraction) -> Fraction:
        """Evaluate at a rational point q0 (useful as a fast rank pre-check)."""
        if not self.num:
            return Fraction(0)
        n = sum(Fraction(c) * q0**i for i, c in enumerate(self.num))
        d = sum(Fraction(c) * q0**i for i, c in enumerate(self.den))
        return q0**self.k * n / d

    # -- printing --------------------------------------------------------------------

    def __repr__(self):
        return f"QRat({self})"

    def __str__(self):
        num = _laurent_str(self.num, self.k)
        if self.den == (1,):
            return num
        den = _laurent_str(self.den, 0)
        if "+" in num or "-" in num[1:]:
            num = f"({num})"
        if "+" in den or "-" in den[1:] or den.startswith("-"):
            den = f"({den})"
        return f"{num}/{den}"


def _laurent_str(coeffs, k) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        e = i + k
        if e == 0:
            t = str(abs(c))
        else:
            body = "q" if e == 1 else f"q^{e}"
            t = body if abs(c) == 1 else f"{abs(c)}*{body}"
        terms.append(("- " if c < 0 else "+ ") + t)
    if not terms:
        return "0"
    head = terms[0]
    head = ("-" + head[2:]) if head.startswith("- ") else head[2:]
    return " ".join([head] + terms[1:])


_ADD_CACHE: dict = {}
_MUL_CACHE: dict = {}


@lru_cache(maxsize=None)
def _qpow_tuple(n: int) -> tuple:
    return tuple([0] * n + [1])


@lru_cache(maxsize=None)
def _small_int(n: int) -> QRat:
    if n == 0:
        return QRat(0, (), (1,), _normalized=True)
    return QRat(0, (n,), (1,), _normalized=True)


ZERO = _small_int(0)
ONE = _small_int(1)
Q = QRat.q_power(1)
QINV = QRat.q_power(-1)


def qrat_arith(a: QRat, b: QRat, op: str) -> QRat:
    """Dispatch form of the field operations; division by zero raises."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# q-combinatorics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def qint(m: int) -> QRat:
    """[m]_q = (q^m - q^-m)/(q - q^-1), a symmetric Laurent polynomial."""
    if m < 0:
        raise ValueError("qint needs m >= 0")
    if m == 0:
        return ZERO
    return QRat.from_laurent([(m - 1 - 2 * i, 1) for i in range(m)])


@lru_cache(maxsize=None)
def qfact(m: int) -> QRat:
    if m < 0:
        raise ValueError("qfact needs m >= 0")
    if m == 0:
        return ONE
    return qint(m) * qfact(m - 1)


def qbinom(m: int, k: int) -> QRat:
    if not 0 <= k <= m:
        raise ValueError("qbinom needs 0 <= k <= m")
    return qfact(m) / (qfact(k) * qfact(m - k))


def qnum(m: int, kind: str = "int", k: int | None = None) -> QRat:
    """q-integer, q-factorial or q-binomial, as in the defining recursions."""
    if kind == "int":
        return qint(m)
    if kind == "fact":
        return qfact(m)
    if kind == "binom":
        if k is None:
            raise ValueError("binom needs k")
        return qbinom(m, k)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# text grammar: integer literals, q, ^ with integer exponents, + - * /, parens
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|q|\^|\+|\-|\*|/|\(|\))")


def parse_qrat(text: str) -> QRat:
    """Parse the CLI expression grammar for Q(q) elements, e.g. '(q^2-1)/(q-1)'."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"bad token at {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    out, rest = _parse_sum(tokens)
    if rest:
        raise ValueError(f"trailing tokens {rest!r}")
    return out


def _parse_sum(toks):
    sign = 1
    if toks and toks[0] in "+-":
        sign = -1 if toks[0] == "-" else 1
        toks = toks[1:]
    acc, toks = _parse_product(toks)
    if sign < 0:
        acc = -acc
    while toks and toks[0] in "+-":
        neg = toks[0] == "-"
        term, toks = _parse_product(toks[1:])
        acc = acc - term if neg else acc + term
    return acc, toks


def _parse_product(toks):
    acc, toks = _parse_power(toks)
    while toks and toks[0] in "*/":
        div = toks[0] == "/"
        term, toks = _parse_power(toks[1:])
        acc = acc / term if div else acc * term
    return acc, toks


def _parse_power(toks):
    base, toks = _parse_atom(toks)
    if toks and toks[0] == "^":
        toks = toks[1:]
        sign = 1
        if toks and toks[0] == "-":
            sign, toks = -1, toks[1:]
        if not toks or not toks[0].isdigit():
            raise ValueError("exponent must be an integer")
        e = sign * int(toks[0])
        toks = toks[1:]
        base = base**e
    return base, toks


def _parse_atom(toks):
    if not toks:
        raise ValueError("unexpected end of expression")
    t = toks[0]
    if t == "(":
        inner, rest = _parse_sum(toks[1:])
        if not rest or rest[0] != ")":
            raise ValueError("unbalanced parenthesis")
        return inner, rest[1:]
    if t == "q":
        return Q, toks[1:]
    if t.isdigit():
        return QRat.from_int(int(t)), toks[1:]
    if t == "-":
        inner, rest = _parse_atom(toks[1:])
        return -inner, rest
    raise ValueError(f"unexpected token {t!r}")
