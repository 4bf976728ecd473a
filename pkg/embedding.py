"""
Embedding Module
Coset diagrams of triangle-group actions, their canonical 2-cell embedding
and genus.

A diagram has one vertex per point, an undirected x-edge for every 2-cycle
of x and a directed y-edge z -> y(z) for every point moved by y. Each vertex
carries up to three darts, rotated as (incoming y, x, outgoing y). Tracing
faces with ``next = rotation(opposite(dart))`` yields the y-faces (cycles of
y) and the xy-faces (orbits of xy).
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from errors import (DisconnectedDiagramError, IdentityViolation, NotJanuarialError,
                    OrderMismatchError, PermutationError)
from perm_core import Label, Perm, PointSet, format_label, label_key, parse_cycles

logger = logging.getLogger(__name__)


# Dart kinds
Y_IN = "y_in"
X_END = "x"
Y_OUT = "y_out"

ROTATION_ORDER = (Y_IN, X_END, Y_OUT)

Dart = Tuple[str, Label]


class TriangleAction:
    """
    A pair (x, y) of permutations with certified orders (2, k, l).

    ``k`` and ``l`` default to the orders of y and xy; when given they must
    be exact.
    """

    def __init__(self, x: Perm, y: Perm, k: Optional[int] = None,
                 ell: Optional[int] = None, name: Optional[str] = None,
                 p: Optional[int] = None):
        if x.domain != y.domain:
            raise PermutationError("x and y act on different point sets")
        if not x.is_involution():
            raise OrderMismatchError(f"x has order {x.order()}, expected 1 or 2")
        xy = x * y
        y_order = y.order()
        xy_order = xy.order()
        if k is not None and y_order != k:
            raise OrderMismatchError(f"y has order {y_order}, expected exactly {k}")
        if ell is not None and xy_order != ell:
            raise OrderMismatchError(f"xy has order {xy_order}, expected exactly {ell}")

        self.x = x
        self.y = y
        self.xy = xy
        self.k = y_order
        self.ell = xy_order
        self.name = name
        self.p = p

    @classmethod
    def parse(cls, x_text: str, y_text: str, domain: Optional[PointSet] = None,
              **kwargs) -> "TriangleAction":
        """
        Build from cycle strings.

        Without an explicit domain the points are the labels mentioned in
        either string.
        """
        x_cycles = parse_cycles(x_text)
        y_cycles = parse_cycles(y_text)
        if domain is None:
            labels = {z for c in x_cycles + y_cycles for z in c}
            if not labels:
                raise PermutationError("cannot infer a point set from empty cycles")
            domain = PointSet(labels)
        return cls(Perm.from_cycles(domain, x_cycles), Perm.from_cycles(domain, y_cycles), **kwargs)

    @property
    def domain(self) -> PointSet:
        return self.x.domain

    @property
    def eta_x(self) -> int:
        """Number of points fixed by x."""
        return len(self.x.fixed_points())

    @property
    def eta_y(self) -> int:
        """Number of points fixed by y."""
        return len(self.y.fixed_points())

    def relabel(self, mapping: Dict[Label, Label]) -> "TriangleAction":
        """The same action on renamed points."""
        return TriangleAction(self.x.conjugate_by(mapping), self.y.conjugate_by(mapping),
                              k=self.k, ell=self.ell, name=self.name)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TriangleAction) and self.x == other.x and self.y == other.y

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __repr__(self) -> str:
        tag = f"{self.name}: " if self.name else ""
        return f"TriangleAction({tag}x={self.x.cycle_string()}, y={self.y.cycle_string()}, k={self.k}, l={self.ell})"


@dataclass(frozen=True)
class JanuarialCheck:
    """Result of the two-xy-orbits test."""

    is_januarial: bool
    xy_orbit_sizes: Tuple[int, ...]


def check_januarial(action: TriangleAction) -> JanuarialCheck:
    """
    Test for exactly two xy-orbits, each holding half of the points.

    Args:
        action: The triangle-group action.

    Returns:
        JanuarialCheck with the orbit sizes in orbit order.
    """
    sizes = tuple(len(o) for o in action.xy.orbits())
    n = len(action.domain)
    ok = len(sizes) == 2 and sizes[0] == sizes[1] == n // 2 and n % 2 == 0
    return JanuarialCheck(is_januarial=ok, xy_orbit_sizes=sizes)


@dataclass(frozen=True)
class Face:
    """
    A traced face.

    Attributes:
        kind: "y" or "xy".
        darts: Dart sequence along the boundary.
        points: Points labelling the face (the y-cycle or the xy-orbit).
        word_length: n for a y^n face, m for an (xy)^m face.
    """

    kind: str
    darts: Tuple[Dart, ...]
    points: FrozenSet[Label]
    word_length: int


@dataclass(frozen=True)
class EmbeddedDiagram:
    """A coset diagram with its rotation system, faces and genus."""

    action: TriangleAction
    x_edges: Tuple[Tuple[Label, Label], ...]
    y_edges: Tuple[Tuple[Label, Label], ...]
    rotation: Dict[Label, Tuple[Dart, ...]]
    faces: Tuple[Face, ...]
    components: Tuple[FrozenSet[Label], ...]
    component_genera: Tuple[int, ...]

    @property
    def vertices(self) -> PointSet:
        return self.action.domain

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    @property
    def y_faces(self) -> Tuple[Face, ...]:
        return tuple(f for f in self.faces if f.kind == "y")

    @property
    def xy_faces(self) -> Tuple[Face, ...]:
        return tuple(f for f in self.faces if f.kind == "xy")

    @property
    def num_edges(self) -> int:
        return len(self.x_edges) + len(self.y_edges)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.num_edges + len(self.faces)

    @property
    def genus(self) -> int:
        """Genus of the embedding surface; defined for connected diagrams."""
        if not self.is_connected:
            raise DisconnectedDiagramError(
                f"diagram has {len(self.components)} components with genera {list(self.component_genera)}")
        return self.component_genera[0]


def _darts_at(action: TriangleAction, z: Label) -> Tuple[Dart, ...]:
    moved_by_y = action.y(z) != z
    moved_by_x = action.x(z) != z
    present = {Y_IN: moved_by_y, X_END: moved_by_x, Y_OUT: moved_by_y}
    return tuple((kind, z) for kind in ROTATION_ORDER if present[kind])


def trace_faces(action: TriangleAction,
                rotation: Dict[Label, Tuple[Dart, ...]]) -> List[Tuple[Dart, ...]]:
    """
    Orbits of the face permutation on darts.

    Returns:
        Dart cycles, each started at its first unvisited dart in vertex order.
    """
    succ: Dict[Dart, Dart] = {}
    for darts in rotation.values():
        for i, dart in enumerate(darts):
            succ[dart] = darts[(i + 1) % len(darts)]

    y_inv = action.y.inverse()
    visited = set()
    faces = []
    for z in action.domain:
        for start in rotation[z]:
            if start in visited:
                continue
            cycle = []
            dart = start
            while dart not in visited:
                visited.add(dart)
                cycle.append(dart)
                kind, w = dart
                if kind == X_END:
                    opp = (X_END, action.x(w))
                elif kind == Y_OUT:
                    opp = (Y_IN, action.y(w))
                else:
                    opp = (Y_OUT, y_inv(w))
                dart = succ[opp]
            if dart != start:
                raise IdentityViolation("faces", "face tracing did not close", {"start": start})
            faces.append(tuple(cycle))
    return faces


def _face_from_darts(action: TriangleAction, darts: Tuple[Dart, ...]) -> Face:
    if all(kind == Y_IN for kind, _ in darts):
        points = frozenset(z for _, z in darts)
        return Face("y", darts, points, len(points))
    points = set()
    for kind, z in darts:
        if kind == X_END:
            points.add(z)
        elif kind == Y_OUT:
            points.add(action.y(z))
    return Face("xy", darts, frozenset(points), len(points))


def build_diagram(action: TriangleAction, allow_disconnected: bool = False) -> EmbeddedDiagram:
    """
    Embed the coset diagram of ``action`` with the canonical rotation system.

    Args:
        action: Certified triangle-group action.
        allow_disconnected: Return per-component genera instead of raising.

    Returns:
        The embedded diagram.

    Raises:
        DisconnectedDiagramError: More than one component and not allowed.
        IdentityViolation: Faces fail to match the cycles of y and xy.
    """
    domain = action.domain
    x_edges = tuple(tuple(c) for c in action.x.to_cycles())
    y_edges = tuple((z, action.y(z)) for z in domain if action.y(z) != z)
    rotation = {z: _darts_at(action, z) for z in domain}

    faces = tuple(_face_from_darts(action, d) for d in trace_faces(action, rotation))
    _check_faces(action, faces, x_edges, y_edges)

    graph = nx.Graph()
    graph.add_nodes_from(domain)
    graph.add_edges_from(x_edges)
    graph.add_edges_from(y_edges)
    components = tuple(sorted((frozenset(c) for c in nx.connected_components(graph)),
                              key=lambda c: min(label_key(z) for z in c)))

    genera = []
    for comp in components:
        e = sum(1 for u, _ in x_edges if u in comp) + sum(1 for u, _ in y_edges if u in comp)
        f = sum(1 for face in faces if face.darts[0][1] in comp)
        if e == 0:
            genera.append(0)  # isolated point, a sphere
            continue
        twice = 2 - len(comp) + e - f
        if twice < 0 or twice % 2:
            raise IdentityViolation("euler", "non-integral genus",
                                    {"V": len(comp), "E": e, "F": f})
        genera.append(twice // 2)

    if len(components) > 1:
        logger.info("diagram for %r has %d components", action, len(components))
        if not allow_disconnected:
            raise DisconnectedDiagramError(
                f"diagram has {len(components)} components with genera {genera}")

    return EmbeddedDiagram(
        action=action,
        x_edges=x_edges,
        y_edges=y_edges,
        rotation=rotation,
        faces=faces,
        components=components,
        component_genera=tuple(genera),
    )


def _check_faces(action: TriangleAction, faces: Sequence[Face],
                 x_edges: Sequence[Tuple[Label, Label]],
                 y_edges: Sequence[Tuple[Label, Label]]) -> None:
    """Faces must use every dart once and reproduce the cycles of y and xy."""
    total = sum(len(f.darts) for f in faces)
    expected = 2 * (len(x_edges) + len(y_edges))
    if total != expected:
        raise IdentityViolation("faces", "face boundaries do not cover each edge-side once",
                                {"boundary_total": total, "two_E": expected})

    y_cycles = {frozenset(c) for c in action.y.to_cycles()}
    traced_y = {f.points for f in faces if f.kind == "y"}
    if traced_y != y_cycles or len(traced_y) != sum(1 for f in faces if f.kind == "y"):
        raise IdentityViolation("faces", "y-faces differ from the cycles of y")

    xy_orbits = {frozenset(o) for o in action.xy.orbits() if len(o) > 1
                 or action.x(o[0]) != o[0] or action.y(o[0]) != o[0]}
    traced_xy = [f.points for f in faces if f.kind == "xy"]
    if set(traced_xy) != xy_orbits or len(traced_xy) != len(xy_orbits):
        raise IdentityViolation("faces", "xy-faces differ from the orbits of xy")

    for f in faces:
        bound = action.k if f.kind == "y" else action.ell
        if bound % f.word_length:
            raise IdentityViolation("faces", f"{f.kind}-face length {f.word_length} does not divide {bound}")


def lemma1_genus(diagram: EmbeddedDiagram) -> int:
    """
    Genus from x-edges and y-faces: (E - V) / 2.

    E counts x-edges (2-cycles of x); V counts all cycles of y, fixed
    points included.

    Raises:
        NotJanuarialError: The action is not a januarial.
        IdentityViolation: E - V is odd.
    """
    action = diagram.action
    if not check_januarial(action).is_januarial:
        raise NotJanuarialError("the x-edge genus count applies to januarials only")
    e = len(diagram.x_edges)
    v = len(action.y.orbits())
    if (e - v) % 2:
        raise IdentityViolation("lemma1", "odd difference of x-edges and y-faces", {"E": e, "V": v})
    return (e - v) // 2


def diagram_to_dot(diagram: EmbeddedDiagram, name: str = "coset_diagram") -> str:
    """
    Graphviz text for a diagram.

    x-edges are plain undirected segments, y-edges bold arrows; faces and
    genus are listed in comments.
    """
    def q(z: Label) -> str:
        return f'"{format_label(z)}"'

    lines = [f"// {diagram.action!r}"]
    for face in diagram.faces:
        pts = ",".join(format_label(z) for z in sorted(face.points, key=label_key))
        lines.append(f"// {face.kind}-face length={face.word_length}: {pts}")
    if diagram.is_connected:
        lines.append(f"// genus = {diagram.genus}")
    else:
        lines.append(f"// component genera = {list(diagram.component_genera)}")
    lines.append(f"digraph {name} {{")
    lines.append("  node [shape=circle, fontsize=10];")
    for z in diagram.vertices:
        lines.append(f"  {q(z)};")
    for u, v in diagram.x_edges:
        lines.append(f"  {q(u)} -> {q(v)} [dir=none, style=solid, label=x];")
    for u, v in diagram.y_edges:
        lines.append(f"  {q(u)} -> {q(v)} [style=bold];")
    lines.append("}")
    return "\n".join(lines) + "\n"
