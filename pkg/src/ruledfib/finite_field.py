"""Exact arithmetic in F_{p^k}.

Elements are residues of F_p[x] modulo a fixed monic irreducible polynomial,
stored as little-endian coefficient tuples. The modulus for each (p, k) is the
least monic irreducible polynomial when polynomials are ordered by their
base-p integer encoding, so serialized elements are reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import DegreeOutOfRange, DivisionByZero, MixedFields, NonPrime

DEFAULT_MAX_FIELD = 2**20


def max_field_size() -> int:
    env = os.environ.get("RULEDFIB_MAX_FIELD")
    return int(env) if env else DEFAULT_MAX_FIELD


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# --- dense polynomials over F_p, little-endian lists -------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim([c % p for c in out])


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return _trim(q), a


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(base: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree k is irreducible iff gcd(x^(p^i) - x, f) = 1 for i <= k/2."""
    f = _trim(list(poly))
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    xp = [0, 1]
    for _ in range(k // 2):
        xp = _poly_powmod(xp, p, f, p)
        if len(_poly_gcd(f, _poly_sub(xp, [0, 1], p), p)) > 1:
            return False
    return True


def _int_to_coeffs(n: int, p: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, p)
        out.append(r)
    return out


# --- field descriptors --------------------------------------------------------

@dataclass(frozen=True)
class FieldDesc:
    """The field F_{p^k} presented as F_p[x]/(modulus)."""

    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.k

    def __repr__(self):
        return f"F_{self.p}^{self.k}" if self.k > 1 else f"F_{self.p}"

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.desc != self:
                raise MixedFields(f"{value.desc!r} element given to {self!r}")
            return value
        if isinstance(value, int):
            return FieldElement(self, (value % self.p,) + (0,) * (self.k - 1))
        return self.element(value)

    def element(self, coeffs: Sequence[int]) -> "FieldElement":
        coeffs = list(coeffs)
        if len(coeffs) > self.k:
            _, coeffs = _poly_divmod(coeffs, self.modulus, self.p)
        coeffs = [c % self.p for c in coeffs] + [0] * (self.k - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def from_int(self, n: int) -> "FieldElement":
        return FieldElement(self, tuple(_int_to_coeffs(n, self.p, self.k)))

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    @property
    def gen(self) -> "FieldElement":
        """The class of x (equal to -modulus[0] when k = 1)."""
        return self.element([0, 1])

    def elements(self) -> Iterator["FieldElement"]:
        for n in range(self.q):
            yield self.from_int(n)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k}


@lru_cache(maxsize=None)
def _least_irreducible(p: int, k: int) -> tuple[int, ...]:
    for n in range(p**k):
        cand = _int_to_coeffs(n, p, k) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable: one always exists


@lru_cache(maxsize=None)
def _make_field(p: int, k: int) -> FieldDesc:
    return FieldDesc(p, k, _least_irreducible(p, k))


def make_field(p: int, k: int = 1, max_size: int | None = None) -> FieldDesc:
    """Return F_{p^k} with the lexicographically least monic irreducible modulus."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if k < 1:
        raise DegreeOutOfRange(f"extension degree {k} < 1")
    cap = max_field_size() if max_size is None else max_size
    if p**k > cap:
        raise DegreeOutOfRange(f"field size {p}^{k} exceeds cap {cap}")
    return _make_field(p, k)


# --- elements -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldElement:
    desc: FieldDesc
    coeffs: tuple[int, ...]

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.desc(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.desc is not self.desc and other.desc != self.desc:
            raise MixedFields(f"cannot combine {self.desc!r} and {other.desc!r}")
        return other

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.desc(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.desc == other.desc

    def __hash__(self):
        return hash((self.desc.p, self.desc.k, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.desc.k == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(f"{c}{'*' if mono else ''}{mono}" if c != 1 or not mono else mono)
        return " + ".join(reversed(terms)) if terms else "0"

    def to_int(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.desc.p + c
        return n

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.desc.p
        return FieldElement(self.desc, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.desc.p
        return FieldElement(self.desc, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.desc.p
        return FieldElement(self.desc, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        d = self.desc
        if d.k == 1:
            return FieldElement(d, (self.coeffs[0] * other.coeffs[0] % d.p,))
        prod = _poly_mul(self.coeffs, other.coeffs, d.p)
        return d.element(prod)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Inverse by the extended Euclidean algorithm in F_p[x]."""
        d = self.desc
        if not self:
            raise DivisionByZero("inverse of zero")
        p = d.p
        if d.k == 1:
            return FieldElement(d, (pow(self.coeffs[0], p - 2, p),))
        r0, r1 = list(d.modulus), _trim(list(self.coeffs))
        s0, s1 = [], [1]
        while r1:
            quo, rem = _poly_divmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1, p), p)
        # r0 is a nonzero constant
        c = pow(r0[0], p - 2, p)
        return d.element([x * c for x in s0])

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if not other:
            raise DivisionByZero("division by zero in " + repr(self.desc))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.desc.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Functional form of the four field operations ("add", "sub", "mul", "div")."""
    if a.desc != b.desc:
        raise MixedFields(f"cannot combine {a.desc!r} and {b.desc!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def frobenius_power(a: FieldElement) -> FieldElement:
    """The p-power map a -> a^p."""
    return a ** a.desc.p


# --- embeddings into extensions ----------------------------------------------

@lru_cache(maxsize=None)
def _embedding_root(small: FieldDesc, big: FieldDesc) -> FieldElement:
    if small.k == 1:
        return big.zero
    for z in big.elements():
        acc = big.zero
        for c in reversed(small.modulus):
            acc = acc * z + c
        if not acc:
            return z
    raise AssertionError(f"{small!r} does not embed in {big!r}")


def extension(desc: FieldDesc, degree: int, max_size: int | None = None) -> FieldDesc:
    """The field F_{q^degree} containing ``desc`` (through :func:`embed`)."""
    return make_field(desc.p, desc.k * degree, max_size=max_size)


def embed(a: FieldElement, big: FieldDesc) -> FieldElement:
    """Image of ``a`` under the fixed embedding of its field into ``big``."""
    small = a.desc
    if small == big:
        return a
    if big.p != small.p or big.k % small.k:
        raise MixedFields(f"{small!r} does not embed in {big!r}")
    if small.k == 1:
        return big(a.coeffs[0])
    root = _embedding_root(small, big)
    acc = big.zero
    for c in reversed(a.coeffs):
        acc = acc * root + c
    return acc


def field_from_json(obj: dict) -> FieldDesc:
    return make_field(int(obj["p"]), int(obj.get("k", 1)))


def element_from_json(desc: FieldDesc, value) -> FieldElement:
    if isinstance(value, int):
        return desc(value)
    return desc.element([int(c) for c in value])


def element_to_json(a: FieldElement) -> list[int]:
    return list(a.coeffs)
