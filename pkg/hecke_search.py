"""
Hecke Search Module
Generator pairs (X, Y) for the action of the Hecke group Delta_k on PL(F_p).

An element of PGL(2, p) with theta = tr^2/det has order l exactly when theta
is a root of f_l that is not a root of f_d for a proper divisor d >= 2 of l.
X and Y are parametrised by (a, b, c, d, e, f):

    X = [[a, c*d], [c, -a]]        Y = [[e, f*d], [f, b - e]]

subject to nabla = -(a^2 + d*c^2) != 0, r = a(2e - b) + 2dcf,
1 + d*f^2 + e^2 - e*b = 0 and theta * nabla = r^2.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from embedding import TriangleAction, check_januarial
from errors import CertificationError, NoSolutionError, OrderMismatchError
from gf_projective import FieldElem, MobiusMap, _certify_modulus, prime_factors, primes_up_to

logger = logging.getLogger(__name__)

ORACLE_MAX_P = 200


@dataclass(frozen=True)
class FracPoly:
    """
    The integer polynomial f_l in theta.

    Attributes:
        ell: The order l the polynomial detects.
        coefficients: Leading coefficient first.
    """

    ell: int
    coefficients: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate_mod(self, p: int, values: np.ndarray) -> np.ndarray:
        """Horner evaluation mod p over an integer array."""
        coeffs = [c % p for c in self.coefficients]
        acc = np.zeros_like(values, dtype=np.int64)
        for c in coeffs:
            acc = (acc * values + c) % p
        return acc

    def roots_mod(self, p: int) -> FrozenSet[int]:
        """All roots in F_p by exhaustive evaluation."""
        values = np.arange(p, dtype=np.int64)
        return frozenset(int(v) for v in values[self.evaluate_mod(p, values) == 0])

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coefficients):
            if c == 0:
                continue
            power = self.degree - j
            mag = abs(c)
            body = "θ" if power == 1 else (f"θ^{power}" if power else "")
            coeff = "" if (mag == 1 and power) else str(mag)
            sign = "-" if c < 0 else "+"
            terms.append((sign, coeff + body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            out += f" {sign} {term}"
        return out


@lru_cache(maxsize=None)
def f_poly(ell: int) -> FracPoly:
    """
    Build f_l.

    Coefficient j is (-1)^j * C(l-1-j, j) on consecutive descending powers;
    the degree is (l-1)/2 for odd l and l/2 - 1 for even l. f_2 is theta
    (order-2 elements have trace 0).
    """
    if ell < 2:
        raise ValueError(f"f_l is defined for l >= 2, got {ell}")
    if ell == 2:
        return FracPoly(2, (1, 0))
    degree = (ell - 1) // 2 if ell % 2 else ell // 2 - 1
    coeffs = tuple((-1) ** j * comb(ell - 1 - j, j) for j in range(degree + 1))
    return FracPoly(ell, coeffs)


def proper_divisors(ell: int) -> List[int]:
    """Divisors d of l with 2 <= d < l."""
    return [d for d in range(2, ell) if ell % d == 0]


@lru_cache(maxsize=None)
def _primitive_roots(ell: int, p: int) -> FrozenSet[int]:
    roots = set(f_poly(ell).roots_mod(p))
    for d in proper_divisors(ell):
        roots -= f_poly(d).roots_mod(p)
    return frozenset(roots)


def primitive_roots(ell: int, p: int) -> FrozenSet[FieldElem]:
    """
    Roots of f_l mod p that detect order exactly l.

    Args:
        ell: Target order (normally (p+1)/2 for januarials).
        p: Odd prime.

    Returns:
        Field elements; compares equal to the set of their residues.
    """
    p = _certify_modulus(p)
    return frozenset(FieldElem(v, p) for v in _primitive_roots(ell, p))


@dataclass(frozen=True)
class HeckeParams:
    """
    One parameter tuple with its derived quantities, as residues mod p.
    """

    p: int
    k: int
    ell: int
    theta: int
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    nabla: int
    r: int

    @property
    def key(self) -> Tuple[int, int, int, int, int, int]:
        """Enumeration order (b, a, c, d, e, f)."""
        return (self.b, self.a, self.c, self.d, self.e, self.f)

    def x_map(self) -> MobiusMap:
        return MobiusMap([[self.a, self.c * self.d], [self.c, -self.a]], self.p)

    def y_map(self) -> MobiusMap:
        return MobiusMap([[self.e, self.f * self.d], [self.f, self.b - self.e]], self.p)

    def violations(self) -> List[str]:
        """Names of the defining constraints that fail (empty when valid)."""
        p = self.p
        a, b, c, d, e, f = self.a, self.b, self.c, self.d, self.e, self.f
        bad = []
        if 2 * self.ell != p + 1:
            bad.append("2l = p+1")
        if (-(a * a + d * c * c)) % p != self.nabla or self.nabla == 0:
            bad.append("nabla")
        if (a * (2 * e - b) + 2 * d * c * f) % p != self.r:
            bad.append("r")
        if (1 + d * f * f + e * e - e * b) % p:
            bad.append("1 + df^2 + e^2 - eb = 0")
        if (self.theta * self.nabla - self.r * self.r) % p:
            bad.append("theta * nabla = r^2")
        return bad

    def as_dict(self) -> Dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "e": self.e, "f": self.f,
                "nabla": self.nabla, "r": self.r}


def valid_b_values(p: int, k: int) -> List[int]:
    """b in F_p with b^2 a primitive root of f_k, ascending."""
    roots = _primitive_roots(k, p)
    return [b for b in range(p) if (b * b) % p in roots]


def solve_params(p: int, k: int, theta: int, cap: Optional[int] = None,
                 b: Optional[int] = None) -> List[HeckeParams]:
    """
    Enumerate parameter tuples for (p, k, theta).

    Every tuple satisfies the four constraints and gives Y of order exactly k
    (b^2 a primitive root of f_k, Y not scalar) and XY without fixed points
    on PL(F_p). Results are ordered
    lexicographically in (b, a, c, d, e, f) and cut to ``cap``.

    Args:
        p: Odd prime.
        k: Order of Y.
        theta: Primitive root of f_l with l = (p+1)/2.
        cap: Maximum number of tuples to return.
        b: Restrict to a single value of b.

    Raises:
        NoSolutionError: theta is not a primitive root, or nothing solves.
    """
    p = _certify_modulus(p)
    theta = int(theta) % p
    ell = (p + 1) // 2
    if ell < 2 or theta not in _primitive_roots(ell, p):
        raise NoSolutionError(f"theta={theta} is not a primitive root of f_{ell} mod {p}")

    b_values = valid_b_values(p, k)
    if b is not None:
        b_values = [v for v in b_values if v == int(b) % p]
    if not b_values:
        raise NoSolutionError(f"no b with b^2 a primitive root of f_{k} mod {p}")

    solutions: List[HeckeParams] = []
    for b_val in b_values:
        found = _solve_for_b(p, k, ell, theta, b_val)
        found.sort(key=lambda s: s.key)
        solutions.extend(found)
        if cap is not None and len(solutions) >= cap:
            break

    if cap is not None:
        solutions = solutions[:cap]
    if not solutions:
        raise NoSolutionError(f"no parameters for p={p}, k={k}, theta={theta}")
    logger.debug("p=%d k=%d theta=%d: %d parameter tuples", p, k, theta, len(solutions))
    return solutions


def _solve_for_b(p: int, k: int, ell: int, theta: int, b: int) -> List[HeckeParams]:
    """All tuples with the given b, vectorised over (f, a, c) for each e."""
    grid = np.arange(p, dtype=np.int64)
    A = grid[None, :, None]
    C = grid[None, None, :]
    A2 = (A * A) % p
    C2 = (C * C) % p
    inv_sq = np.zeros(p, dtype=np.int64)
    for f in range(1, p):
        inv_sq[f] = pow(f * f, -1, p)

    # keep each block near a million cells
    block = max(1, 1_000_000 // (p * p))
    out: List[HeckeParams] = []

    for e in range(p):
        # rows of (d, f) pairs solving 1 + d f^2 + e^2 - e b = 0
        rhs = (e * b - e * e - 1) % p
        fs = np.arange(1, p, dtype=np.int64)
        ds = (rhs * inv_sq[1:]) % p
        if (e * e - e * b + 1) % p == 0:
            # f = 0 leaves d free
            fs = np.concatenate([np.zeros(p, dtype=np.int64), fs])
            ds = np.concatenate([np.arange(p, dtype=np.int64), ds])

        for start in range(0, len(fs), block):
            f_blk = fs[start:start + block][:, None, None]
            d_blk = ds[start:start + block][:, None, None]
            nabla = (-(A2 + d_blk * C2)) % p
            r = (A * ((2 * e - b) % p) + ((2 * d_blk * f_blk) % p) * C) % p
            ok = (nabla != 0) & ((theta * nabla - r * r) % p == 0)
            idx_f, idx_a, idx_c = np.nonzero(ok)
            for i, a, c in zip(idx_f.tolist(), idx_a.tolist(), idx_c.tolist()):
                f = int(f_blk[i, 0, 0])
                d = int(d_blk[i, 0, 0])
                if f == 0 and (2 * e - b) % p == 0:
                    continue  # Y scalar
                nab, tr = int(nabla[i, a, c]), int(r[i, a, c])
                if xy_has_fixed_points(p, tr, nab):
                    continue
                out.append(HeckeParams(p=p, k=k, ell=ell, theta=theta, a=a, b=b, c=c, d=d, e=e, f=f,
                                       nabla=nab, r=tr))
    return out


def xy_has_fixed_points(p: int, r: int, nabla: int) -> bool:
    """
    Whether XY fixes a point of PL(F_p).

    The fixed points are the roots of the characteristic polynomial, so they
    exist exactly when r^2 - 4*nabla is a square mod p (zero included). Only
    l = 2 (p = 3) can reach this: for l > 2 an element of order l dividing
    p+1 is elliptic.
    """
    disc = (r * r - 4 * nabla) % p
    return disc == 0 or pow(disc, (p - 1) // 2, p) == 1


def build_action(params: HeckeParams) -> TriangleAction:
    """
    Permutation action of (X, Y) on PL(F_p) with certified orders.

    Raises:
        CertificationError: A constraint or order fails; indicates a solver bug.
    """
    bad = params.violations()
    if bad:
        raise CertificationError(f"invalid parameters {params.as_dict()}: {', '.join(bad)}")

    X = params.x_map()
    Y = params.y_map()
    XY = X.then(Y)
    p = params.p
    if Y.det_value() != 1 or Y.trace_value() != params.b % p:
        raise CertificationError(f"det(Y)={Y.det_value()}, tr(Y)={Y.trace_value()}, b={params.b}")
    if XY.trace_value() != params.r or XY.det_value() != params.nabla:
        raise CertificationError(f"tr(XY)={XY.trace_value()} vs r={params.r}, "
                                 f"det(XY)={XY.det_value()} vs nabla={params.nabla}")

    try:
        action = TriangleAction(X.to_perm(), Y.to_perm(), k=params.k, ell=params.ell,
                                name=f"D({p},{p},{params.k})", p=p)
    except OrderMismatchError as exc:
        raise CertificationError(f"orders did not certify for {params.as_dict()}: {exc}") from exc
    if action.x.order() != 2:
        raise CertificationError("x is the identity")
    info = check_januarial(action)
    if not info.is_januarial:
        raise CertificationError(f"not a januarial for {params.as_dict()}: "
                                 f"xy orbits {info.xy_orbit_sizes}")
    return action


@lru_cache(maxsize=None)
def _pgl_theta_by_order(p: int) -> Dict[int, FrozenSet[int]]:
    """theta values of PGL(2, p) grouped by element order (brute force)."""
    n_group = p * (p - 1) * (p + 1)
    factors = prime_factors(n_group)

    def mul(m, n):
        a, b, c, d = m
        e, f, g, h = n
        return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)

    def power(m, k):
        result = (1, 0, 0, 1)
        while k:
            if k & 1:
                result = mul(result, m)
            m = mul(m, m)
            k >>= 1
        return result

    def scalar(m):
        return m[1] == 0 and m[2] == 0 and m[0] == m[3]

    by_order: Dict[int, set] = {}

    def record(m):
        order = n_group
        for q in factors:
            while order % q == 0 and scalar(power(m, order // q)):
                order //= q
        det = (m[0] * m[3] - m[1] * m[2]) % p
        tr = (m[0] + m[3]) % p
        by_order.setdefault(order, set()).add(tr * tr * pow(det, -1, p) % p)

    # one representative per projective class: lower-left 1, or lower-left 0 and lower-right 1
    for a in range(p):
        for d in range(p):
            for b in range(p):
                if (a * d - b) % p:
                    record((a, b, 1, d))
    for a in range(1, p):
        for b in range(p):
            record((a, b, 0, 1))

    return {order: frozenset(vals) for order, vals in by_order.items()}


def theta_oracle(p: int, ell: int) -> FrozenSet[FieldElem]:
    """
    theta = tr^2/det of every element of PGL(2, p) with order exactly l.

    Brute force over the whole group; an independent check on f_l.

    Raises:
        ValueError: p above the desk-scale bound.
    """
    p = _certify_modulus(p)
    if p > ORACLE_MAX_P:
        raise ValueError(f"theta_oracle is limited to p <= {ORACLE_MAX_P}")
    return frozenset(FieldElem(v, p) for v in _pgl_theta_by_order(p).get(ell, frozenset()))


def januarial_primes(p_max: int) -> List[int]:
    """Odd primes p <= p_max (for which l = (p+1)/2 >= 2)."""
    return [p for p in primes_up_to(p_max) if p > 2]
