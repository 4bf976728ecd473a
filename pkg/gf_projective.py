"""
Projective Line Module
Arithmetic in F_p, the projective line PL(F_p) and Mobius maps acting on it.

Mobius maps act on points by z -> (m11*z + m12) / (m21*z + m22). Matrix
products (``@``) compose as functions, so ``(A @ B)(z) == A(B(z))``; the
right-action product used for permutations is ``A.then(B) == B @ A``.
"""

import logging
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple, Union

from errors import FieldError
from perm_core import INF, Perm, PointSet, _Infinity

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Trial-division primality test (moduli here are desk-scale)."""
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


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of n, ascending."""
    factors = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            factors.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        factors.append(n)
    return factors


def primes_up_to(limit: int) -> List[int]:
    return [n for n in range(2, limit + 1) if is_prime(n)]


def _certify_modulus(p: int) -> int:
    p = int(p)
    if not is_prime(p) or p == 2:
        raise FieldError(f"modulus {p} is not an odd prime")
    return p


class FieldElem:
    """
    An element of F_p.

    Comparison with a plain ``int`` compares against the reduced residue,
    and the hash is the residue's hash, so sets of elements compare equal
    to sets of residues.
    """

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        self.modulus = _certify_modulus(modulus)
        self.value = int(value) % self.modulus

    def _coerce(self, other: Union["FieldElem", int]) -> int:
        if isinstance(other, FieldElem):
            if other.modulus != self.modulus:
                raise FieldError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented  # type: ignore[return-value]

    def _new(self, value: int) -> "FieldElem":
        elem = object.__new__(FieldElem)
        elem.modulus = self.modulus
        elem.value = value % self.modulus
        return elem

    def __add__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else self._new(self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else self._new(self.value - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else self._new(v - self.value)

    def __mul__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else self._new(self.value * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self * self._new(v).inv()

    def __neg__(self) -> "FieldElem":
        return self._new(-self.value)

    def __pow__(self, exponent: int) -> "FieldElem":
        if exponent < 0:
            return self.inv() ** (-exponent)
        return self._new(pow(self.value, exponent, self.modulus))

    def inv(self) -> "FieldElem":
        if self.value == 0:
            raise FieldError(f"0 has no inverse mod {self.modulus}")
        return self._new(pow(self.value, -1, self.modulus))

    def is_square(self) -> bool:
        """Zero counts as a square."""
        return self.value == 0 or pow(self.value, (self.modulus - 1) // 2, self.modulus) == 1

    def sqrt_list(self) -> List["FieldElem"]:
        """All square roots, ascending by residue (0, 1 or 2 of them)."""
        if self.value == 0:
            return [self._new(0)]
        if not self.is_square():
            return []
        r = _tonelli_shanks(self.value, self.modulus)
        return sorted({self._new(r), self._new(-r)}, key=int)

    def __int__(self) -> int:
        return self.value

    __index__ = __int__

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElem):
            return self.value == other.value and self.modulus == other.modulus
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return f"FieldElem({self.value}, p={self.modulus})"

    def __str__(self) -> str:
        return str(self.value)


def _tonelli_shanks(n: int, p: int) -> int:
    """A square root of the nonzero square n mod the odd prime p."""
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


class PrimeField:
    """The field F_p; a small factory for its elements."""

    def __init__(self, p: int):
        self.p = _certify_modulus(p)

    def __call__(self, value: int) -> FieldElem:
        return FieldElem(value, self.p)

    def elements(self) -> Iterator[FieldElem]:
        for v in range(self.p):
            yield FieldElem(v, self.p)

    def points(self) -> PointSet:
        """PL(F_p) as a point set of integer residues plus INF."""
        return PointSet.projective_line(self.p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("F", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


def field_ops(a: FieldElem, b: FieldElem) -> dict:
    """
    The basic operations on a pair of field elements.

    Returns:
        Dict with keys add, sub, mul, inv (of ``a``) and sqrt_list (of ``a``).
    """
    if a.modulus != b.modulus:
        raise FieldError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    return {
        "add": a + b,
        "sub": a - b,
        "mul": a * b,
        "inv": a.inv(),
        "sqrt_list": a.sqrt_list(),
    }


PLPoint = Union[FieldElem, _Infinity]
Matrix = Tuple[Tuple[int, int], Tuple[int, int]]


class MobiusMap:
    """
    A linear fractional transformation of PL(F_p), stored as a 2x2 matrix.

    Equality is projective: two maps are equal when their matrices differ
    by a nonzero scalar.
    """

    __slots__ = ("p", "m11", "m12", "m21", "m22")

    def __init__(self, rows: Sequence[Sequence[int]], p: int):
        """
        Args:
            rows: Matrix rows [[m11, m12], [m21, m22]]; ints or FieldElems.
            p: Odd prime modulus.
        """
        self.p = _certify_modulus(p)
        (a, b), (c, d) = rows
        self.m11, self.m12, self.m21, self.m22 = (int(v) % self.p for v in (a, b, c, d))
        if self.det_value() == 0:
            raise FieldError(f"singular matrix {self.rows()} mod {self.p}")

    @classmethod
    def identity(cls, p: int) -> "MobiusMap":
        return cls([[1, 0], [0, 1]], p)

    def rows(self) -> Matrix:
        return ((self.m11, self.m12), (self.m21, self.m22))

    def det_value(self) -> int:
        return (self.m11 * self.m22 - self.m12 * self.m21) % self.p

    def trace_value(self) -> int:
        return (self.m11 + self.m22) % self.p

    def det(self) -> FieldElem:
        return FieldElem(self.det_value(), self.p)

    def trace(self) -> FieldElem:
        return FieldElem(self.trace_value(), self.p)

    def is_scalar(self) -> bool:
        return self.m12 == 0 and self.m21 == 0 and self.m11 == self.m22

    def _mul_rows(self, other: "MobiusMap") -> Matrix:
        if other.p != self.p:
            raise FieldError(f"modulus mismatch: {self.p} vs {other.p}")
        p = self.p
        return (((self.m11 * other.m11 + self.m12 * other.m21) % p,
                 (self.m11 * other.m12 + self.m12 * other.m22) % p),
                ((self.m21 * other.m11 + self.m22 * other.m21) % p,
                 (self.m21 * other.m12 + self.m22 * other.m22) % p))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        """Matrix product: apply ``other`` first, then ``self``."""
        return MobiusMap(self._mul_rows(other), self.p)

    def then(self, other: "MobiusMap") -> "MobiusMap":
        """Right-action product: apply ``self`` first, then ``other``."""
        return other @ self

    def __pow__(self, exponent: int) -> "MobiusMap":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = MobiusMap.identity(self.p)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def inverse(self) -> "MobiusMap":
        # adjugate; projectively equal to the inverse
        return MobiusMap([[self.m22, -self.m12], [-self.m21, self.m11]], self.p)

    def apply(self, z: Union[PLPoint, int]) -> PLPoint:
        """Image of a point of PL(F_p); the pole goes to INF."""
        p = self.p
        if z is INF:
            if self.m21 == 0:
                return INF
            return FieldElem(self.m11 * pow(self.m21, -1, p), p)
        v = int(z) % p
        num = (self.m11 * v + self.m12) % p
        den = (self.m21 * v + self.m22) % p
        if den == 0:
            return INF
        return FieldElem(num * pow(den, -1, p), p)

    __call__ = apply

    def to_perm(self) -> Perm:
        """Permutation of the p+1 points of PL(F_p)."""
        domain = PointSet.projective_line(self.p)
        images = []
        for z in domain:
            w = self.apply(z)
            images.append(domain.index(INF if w is INF else int(w)))
        return Perm(domain, images)

    def pgl_order(self) -> int:
        """
        Order in PGL(2, p): least m with a scalar m-th power.

        Starts from |PGL(2,p)| = p(p-1)(p+1) and strips prime factors while
        the reduced power stays scalar.
        """
        p = self.p
        n = p * (p - 1) * (p + 1)
        for q in prime_factors(n):
            while n % q == 0 and (self ** (n // q)).is_scalar():
                n //= q
        return n

    def theta(self) -> FieldElem:
        """tr^2 / det, invariant under rescaling."""
        return FieldElem(self.trace_value() ** 2 * pow(self.det_value(), -1, self.p), self.p)

    def normalized(self) -> Matrix:
        """Scalar multiple whose first nonzero entry is 1."""
        entries = (self.m11, self.m12, self.m21, self.m22)
        lead = next(v for v in entries if v)
        s = pow(lead, -1, self.p)
        a, b, c, d = (v * s % self.p for v in entries)
        return ((a, b), (c, d))

    def scaled(self, s: int) -> "MobiusMap":
        return MobiusMap([[self.m11 * s, self.m12 * s], [self.m21 * s, self.m22 * s]], self.p)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, MobiusMap) and other.p == self.p
                and other.normalized() == self.normalized())

    def __hash__(self) -> int:
        return hash((self.p, self.normalized()))

    def __repr__(self) -> str:
        return f"MobiusMap({[list(r) for r in self.rows()]}, p={self.p})"


def apply(m: MobiusMap, z: Union[PLPoint, int]) -> PLPoint:
    return m.apply(z)


def to_perm(m: MobiusMap) -> Perm:
    return m.to_perm()


def pgl_order(m: MobiusMap) -> int:
    return m.pgl_order()


def theta_of(m: MobiusMap) -> FieldElem:
    return m.theta()
