"""
Permutation Core Module
Exact permutations of finite labelled point sets, written in cycle form.

Labels are integers or the projective point ``INF``. Composition is a right
action: ``p * q`` (and ``compose(p, q)``) applies ``p`` first, so
``(p * q)(z) == q(p(z))``.
"""

import math
import re
from functools import reduce
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import ParseError, PermutationError


class _Infinity:
    """The point at infinity of a projective line. Use the ``INF`` singleton."""

    _instance: Optional["_Infinity"] = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self) -> int:
        return hash("inf")


INF = _Infinity()

Label = Union[int, _Infinity]

_INF_TOKENS = {"inf", "oo", "∞", "infinity"}


def label_key(label: Label) -> Tuple[int, int]:
    """Sort key placing integers in order and ``INF`` last."""
    if label is INF:
        return (1, 0)
    return (0, int(label))


def parse_label(token: str) -> Label:
    """
    Parse one point label.

    Args:
        token: Integer text or one of "inf", "oo", "∞".

    Returns:
        The integer label or ``INF``.
    """
    text = token.strip()
    if text.lower() in _INF_TOKENS:
        return INF
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"invalid point label {token!r}") from None


def format_label(label: Label) -> str:
    return "inf" if label is INF else str(label)


class PointSet:
    """
    An ordered finite set of distinct point labels.

    Iteration follows the canonical order (integers ascending, ``INF`` last),
    which fixes the index of each label inside permutation arrays.
    """

    __slots__ = ("_labels", "_index")

    def __init__(self, labels: Iterable[Label]):
        items = list(labels)
        if not items:
            raise PermutationError("a point set must be nonempty")
        for label in items:
            if label is not INF and not isinstance(label, (int, np.integer)):
                raise PermutationError(f"unsupported label {label!r}")
        items = [label if label is INF else int(label) for label in items]
        if len(set(items)) != len(items):
            raise PermutationError("point labels must be distinct")
        self._labels: Tuple[Label, ...] = tuple(sorted(items, key=label_key))
        self._index: Dict[Label, int] = {label: i for i, label in enumerate(self._labels)}

    @classmethod
    def interval(cls, start: int, stop: int) -> "PointSet":
        """Points start, start+1, ..., stop (inclusive)."""
        return cls(range(start, stop + 1))

    @classmethod
    def projective_line(cls, p: int) -> "PointSet":
        """The p+1 points 0, ..., p-1, inf of PL(F_p)."""
        return cls(list(range(p)) + [INF])

    @classmethod
    def parse(cls, text: str) -> "PointSet":
        """
        Parse a point-set description.

        Accepted forms: ``pl:P`` (projective line over F_P), ``A..B``
        (integer interval) or a comma-separated label list.
        """
        spec = text.strip()
        if spec.lower().startswith("pl:"):
            try:
                return cls.projective_line(int(spec[3:]))
            except ValueError:
                raise ParseError(f"invalid projective line {text!r}") from None
        if ".." in spec:
            lo, _, hi = spec.partition("..")
            try:
                return cls.interval(int(lo), int(hi))
            except ValueError:
                raise ParseError(f"invalid interval {text!r}") from None
        return cls(parse_label(tok) for tok in spec.split(",") if tok.strip())

    @property
    def labels(self) -> Tuple[Label, ...]:
        return self._labels

    def describe(self) -> str:
        """Shortest text that ``parse`` turns back into this set."""
        labels = self._labels
        if labels[-1] is INF:
            p = len(labels) - 1
            if p >= 2 and labels[:-1] == tuple(range(p)):
                return f"pl:{p}"
        elif len(labels) > 2 and labels == tuple(range(labels[0], labels[-1] + 1)):
            return f"{labels[0]}..{labels[-1]}"
        return ",".join(format_label(label) for label in labels)

    def index(self, label: Label) -> int:
        """Position of ``label``; raises PermutationError if absent."""
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise PermutationError(f"label {format_label(label)} is not in the domain") from None

    def relabel(self, mapping: Dict[Label, Label]) -> "PointSet":
        return PointSet(mapping[label] for label in self._labels)

    def __contains__(self, label: object) -> bool:
        try:
            return label in self._index
        except TypeError:
            return False

    def __iter__(self) -> Iterator[Label]:
        return iter(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PointSet) and self._labels == other._labels

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        shown = ", ".join(format_label(label) for label in self._labels[:6])
        more = ", ..." if len(self._labels) > 6 else ""
        return f"PointSet({shown}{more}; n={len(self._labels)})"


def parse_cycles(text: str) -> List[List[Label]]:
    """
    Parse cycle notation such as ``(0,7)(1,5)(12,inf)``.

    Whitespace is ignored. An empty string (or "()" alone, or "e") means
    the identity and yields no cycles.
    """
    compact = re.sub(r"\s+", "", text)
    if compact in ("", "()", "e", "id"):
        return []
    if not re.fullmatch(r"(\([^()]+\))+", compact):
        raise ParseError(f"malformed cycle notation {text!r}")
    return [[parse_label(tok) for tok in body.split(",")]
            for body in re.findall(r"\(([^()]+)\)", compact)]


class Perm:
    """
    A bijection of a PointSet.

    The images are kept as a read-only numpy index array aligned with the
    domain's canonical order. Instances are immutable.
    """

    __slots__ = ("_domain", "_images", "_hash")

    def __init__(self, domain: PointSet, images: Sequence[int]):
        """
        Args:
            domain: Point set the permutation acts on.
            images: ``images[i]`` is the index of the image of the i-th label.
        """
        arr = np.asarray(images, dtype=np.int64).copy()
        n = len(domain)
        if arr.shape != (n,):
            raise PermutationError(f"expected {n} images, got shape {arr.shape}")
        if n and (arr.min() < 0 or arr.max() >= n or len(np.unique(arr)) != n):
            raise PermutationError("images do not form a bijection")
        arr.flags.writeable = False
        self._domain = domain
        self._images = arr
        self._hash: Optional[int] = None

    # Construction

    @classmethod
    def identity(cls, domain: PointSet) -> "Perm":
        return cls(domain, np.arange(len(domain)))

    @classmethod
    def from_mapping(cls, domain: PointSet, mapping: Dict[Label, Label]) -> "Perm":
        """Build from a total label-to-label dictionary."""
        images = [domain.index(mapping.get(label, label)) for label in domain]
        return cls(domain, images)

    @classmethod
    def from_cycles(cls, domain: PointSet, cycles: Iterable[Sequence[Label]]) -> "Perm":
        """
        Build from disjoint cycles; unlisted labels are fixed.

        Raises:
            PermutationError: A label repeats or lies outside the domain.
        """
        images = np.arange(len(domain))
        seen = set()
        for cycle in cycles:
            idx = [domain.index(label) for label in cycle]
            for i in idx:
                if i in seen:
                    raise PermutationError(
                        f"label {format_label(domain.labels[i])} appears in more than one cycle")
                seen.add(i)
            for pos, i in enumerate(idx):
                images[i] = idx[(pos + 1) % len(idx)]
        return cls(domain, images)

    @classmethod
    def parse(cls, domain: PointSet, text: str) -> "Perm":
        return cls.from_cycles(domain, parse_cycles(text))

    # Access

    @property
    def domain(self) -> PointSet:
        return self._domain

    @property
    def images(self) -> np.ndarray:
        """Read-only index array of images."""
        return self._images

    def __call__(self, label: Label) -> Label:
        return self._domain.labels[self._images[self._domain.index(label)]]

    def as_dict(self) -> Dict[Label, Label]:
        labels = self._domain.labels
        return {labels[i]: labels[j] for i, j in enumerate(self._images)}

    # Algebra

    def _check_domain(self, other: "Perm") -> None:
        if not isinstance(other, Perm):
            raise TypeError(f"cannot compose Perm with {type(other).__name__}")
        if self._domain != other._domain:
            raise PermutationError("permutations act on different domains")

    def compose(self, other: "Perm") -> "Perm":
        """Apply ``self`` first, then ``other``."""
        self._check_domain(other)
        return Perm(self._domain, other._images[self._images])

    __mul__ = compose

    def inverse(self) -> "Perm":
        inv = np.empty_like(self._images)
        inv[self._images] = np.arange(len(self._images))
        return Perm(self._domain, inv)

    def __pow__(self, exponent: int) -> "Perm":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = np.arange(len(self._images))
        base = self._images
        e = exponent
        while e:
            if e & 1:
                result = base[result]
            base = base[base]
            e >>= 1
        return Perm(self._domain, result)

    def conjugate_by(self, relabel: Dict[Label, Label]) -> "Perm":
        """The same permutation written on relabelled points."""
        new_domain = self._domain.relabel(relabel)
        return Perm.from_mapping(new_domain, {relabel[a]: relabel[b] for a, b in self.as_dict().items()})

    # Cycle structure

    def _index_cycles(self) -> List[List[int]]:
        seen = np.zeros(len(self._images), dtype=bool)
        cycles = []
        for start in range(len(self._images)):
            if seen[start]:
                continue
            cycle = []
            i = start
            while not seen[i]:
                seen[i] = True
                cycle.append(i)
                i = int(self._images[i])
            cycles.append(cycle)
        return cycles

    def orbits(self) -> List[Tuple[Label, ...]]:
        """
        All cycles including fixed points.

        Each orbit starts at its least label and follows the permutation;
        orbits are ordered by least label (``INF`` last).
        """
        labels = self._domain.labels
        # the canonical domain order makes the first index of a cycle its least label
        return [tuple(labels[i] for i in cycle) for cycle in self._index_cycles()]

    def to_cycles(self, include_fixed: bool = False) -> List[Tuple[Label, ...]]:
        """Canonical cycle form; singletons only when ``include_fixed``."""
        return [c for c in self.orbits() if include_fixed or len(c) > 1]

    def cycle_string(self, include_fixed: bool = False) -> str:
        cycles = self.to_cycles(include_fixed)
        if not cycles:
            return "()"
        return "".join("(" + ",".join(format_label(z) for z in c) + ")" for c in cycles)

    def cycle_type(self) -> List[int]:
        """Cycle lengths in decreasing order, fixed points included."""
        return sorted((len(c) for c in self._index_cycles()), reverse=True)

    def order(self) -> int:
        """Least m >= 1 with p**m the identity (lcm of cycle lengths)."""
        return reduce(math.lcm, (len(c) for c in self._index_cycles()), 1)

    def fixed_points(self) -> frozenset:
        labels = self._domain.labels
        return frozenset(labels[i] for i in np.flatnonzero(self._images == np.arange(len(self._images))))

    def support(self) -> frozenset:
        labels = self._domain.labels
        return frozenset(labels[i] for i in np.flatnonzero(self._images != np.arange(len(self._images))))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(len(self._images))))

    def is_involution(self) -> bool:
        return bool(np.array_equal(self._images[self._images], np.arange(len(self._images))))

    # Dunder plumbing

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Perm) and self._domain == other._domain
                and bool(np.array_equal(self._images, other._images)))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._domain, self._images.tobytes()))
        return self._hash

    def __str__(self) -> str:
        return self.cycle_string()

    def __repr__(self) -> str:
        return f"Perm({self.cycle_string()!r}, n={len(self._domain)})"


def from_cycles(domain: PointSet, cycles: Iterable[Sequence[Label]]) -> Perm:
    return Perm.from_cycles(domain, cycles)


def compose(p: Perm, q: Perm) -> Perm:
    return p.compose(q)


def inverse(p: Perm) -> Perm:
    return p.inverse()


def orbits(p: Perm) -> List[Tuple[Label, ...]]:
    return p.orbits()


def order(p: Perm) -> int:
    return p.order()


def fixed_points(p: Perm) -> frozenset:
    return p.fixed_points()
