"""
Topology Module
Companion diagram, common graph and circuit partition of a januarial, with
the genus bookkeeping that ties them together.

Collapsing every y-face of a januarial to a point leaves the companion
graph: one vertex per cycle of y (fixed points included) and one edge per
2-cycle of x. The two xy-faces become two discs whose boundaries run along
those edges; the edges crossed once by each disc form the common graph.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from embedding import EmbeddedDiagram, TriangleAction, build_diagram, check_januarial, lemma1_genus
from errors import IdentityViolation, NotJanuarialError, ParseError
from perm_core import Label, PointSet, format_label, label_key

logger = logging.getLogger(__name__)

SIMPLE = "simple"
GENERAL = "general"


@dataclass(frozen=True)
class Traversal:
    """One pass of a disc boundary along an x-edge, from ``start`` to ``end``."""

    edge: int
    start: Label
    end: Label


@dataclass(frozen=True)
class CompanionComplex:
    """
    The diagram with its y-faces collapsed.

    Attributes:
        diagram: The embedded januarial.
        vertices: Cycles of y, fixed points included, in canonical order.
        edges: 2-cycles of x; an edge joins the cycles holding its two ends.
        rotation: Per vertex, the x-edge ends met walking round the y-cycle.
        orbits: The two xy-orbits; disc 1 holds the least point.
        disc_boundaries: Per disc, the x-edge traversals in xy-orbit order.
    """

    diagram: EmbeddedDiagram
    vertices: Tuple[Tuple[Label, ...], ...]
    edges: Tuple[Tuple[Label, Label], ...]
    rotation: Tuple[Tuple[Label, ...], ...]
    orbits: Tuple[Tuple[Label, ...], Tuple[Label, ...]]
    disc_boundaries: Tuple[Tuple[Traversal, ...], Tuple[Traversal, ...]]
    vertex_of: Dict[Label, int] = field(repr=False)
    disc_of: Dict[Label, int] = field(repr=False)
    edge_of: Dict[Label, int] = field(repr=False)

    @property
    def action(self) -> TriangleAction:
        return self.diagram.action

    def endpoints(self, edge: int) -> Tuple[int, int]:
        u, w = self.edges[edge]
        return self.vertex_of[u], self.vertex_of[w]

    def disc_vertex_count(self, disc: int) -> int:
        """V_i: cycles of y meeting the orbit of disc ``disc``."""
        return len({self.vertex_of[z] for z in self.orbits[disc - 1]})

    def disc_edge_count(self, disc: int) -> int:
        """E_i: x-edges with at least one end in the orbit of disc ``disc``."""
        return len({self.edge_of[z] for z in self.orbits[disc - 1] if z in self.edge_of})


@dataclass(frozen=True)
class CommonGraph:
    """
    Edges traversed once by each disc, as a multigraph on companion vertices.

    Edge keys are companion edge indices; a loop adds 2 to its vertex's
    valency.
    """

    graph: nx.MultiGraph
    edges: FrozenSet[int]
    isolated_shared: FrozenSet[int]

    @property
    def v(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def alpha(self) -> int:
        return self.v - self.e

    def valencies(self) -> Dict[int, int]:
        return dict(self.graph.degree())

    @property
    def is_empty(self) -> bool:
        return not self.edges


@dataclass(frozen=True)
class CircuitPartition:
    """
    Circuits of the common graph, traced once per disc direction.

    Each circuit is a tuple of traversals. ``P1`` uses the directions of
    disc 1, ``P2`` those of disc 2; |P1| = h2 and |P2| = h1.
    """

    P1: Tuple[Tuple[Traversal, ...], ...]
    P2: Tuple[Tuple[Traversal, ...], ...]

    @property
    def h1(self) -> int:
        return len(self.P2)

    @property
    def h2(self) -> int:
        return len(self.P1)


def companion(diagram: EmbeddedDiagram) -> CompanionComplex:
    """
    Collapse the y-faces of a januarial diagram.

    Raises:
        NotJanuarialError: The action does not have two equal xy-orbits.
    """
    action = diagram.action
    if not check_januarial(action).is_januarial:
        raise NotJanuarialError(f"{action!r} does not have two equal xy-faces")

    vertices = tuple(action.y.orbits())
    vertex_of = {z: i for i, cycle in enumerate(vertices) for z in cycle}
    edges = tuple((c[0], c[1]) for c in action.x.to_cycles())
    edge_of = {z: i for i, pair in enumerate(edges) for z in pair}

    orbits = tuple(action.xy.orbits())
    # orbits() is sorted by least label, so the first is disc 1
    disc_of = {z: i + 1 for i, orbit in enumerate(orbits) for z in orbit}

    rotation = tuple(tuple(z for z in cycle if z in edge_of) for cycle in vertices)
    boundaries = tuple(
        tuple(Traversal(edge_of[w], w, action.x(w)) for w in orbit if w in edge_of)
        for orbit in orbits
    )
    total = sum(len(b) for b in boundaries)
    if total != 2 * len(edges):
        raise IdentityViolation("companion", "disc boundaries do not traverse every edge twice",
                                {"traversals": total, "edges": len(edges)})

    return CompanionComplex(
        diagram=diagram,
        vertices=vertices,
        edges=edges,
        rotation=rotation,
        orbits=(orbits[0], orbits[1]),
        disc_boundaries=(boundaries[0], boundaries[1]),
        vertex_of=vertex_of,
        disc_of=disc_of,
        edge_of=edge_of,
    )


def common_graph(c: CompanionComplex) -> CommonGraph:
    """
    Edges whose two ends lie in different discs, plus shared vertices.

    A vertex meeting both discs without a common edge is kept as an
    isolated vertex; it counts towards v.
    """
    graph = nx.MultiGraph()
    common = set()
    for i, (u, w) in enumerate(c.edges):
        if c.disc_of[u] != c.disc_of[w]:
            common.add(i)
            graph.add_edge(c.vertex_of[u], c.vertex_of[w], key=i)

    isolated = set()
    for vid, cycle in enumerate(c.vertices):
        if len({c.disc_of[z] for z in cycle}) == 2 and vid not in graph:
            isolated.add(vid)
            graph.add_node(vid)
    if isolated:
        logger.info("isolated shared vertices %s in %r", sorted(isolated), c.action)

    return CommonGraph(graph=graph, edges=frozenset(common), isolated_shared=frozenset(isolated))


def _common_ends(c: CompanionComplex, upsilon: CommonGraph) -> Dict[int, Tuple[Label, ...]]:
    return {vid: tuple(z for z in ends if c.edge_of[z] in upsilon.edges)
            for vid, ends in enumerate(c.rotation)}


def _trace_disc(c: CompanionComplex, upsilon: CommonGraph, disc: int,
                ends_at: Dict[int, Tuple[Label, ...]]) -> Tuple[Tuple[Traversal, ...], ...]:
    x = c.action.x
    # leaving end of every common edge in this disc's direction
    leaving = {}
    for i in upsilon.edges:
        u, w = c.edges[i]
        start = u if c.disc_of[u] == disc else w
        leaving[i] = Traversal(i, start, x(start))

    succ: Dict[int, int] = {}
    for i, trav in leaving.items():
        ends = ends_at[c.vertex_of[trav.end]]
        pos = ends.index(trav.end)
        nxt = ends[(pos + 1) % len(ends)]
        if c.disc_of[nxt] != disc or nxt == trav.end:
            raise IdentityViolation("partition", "common ends do not alternate between discs",
                                    {"arrival": format_label(trav.end), "next": format_label(nxt),
                                     "disc": disc})
        succ[i] = c.edge_of[nxt]

    if sorted(succ.values()) != sorted(succ):
        raise IdentityViolation("partition", "right-most successor is not a bijection", {"disc": disc})

    circuits = []
    seen = set()
    for start in sorted(leaving, key=lambda i: label_key(leaving[i].start)):
        if start in seen:
            continue
        circuit = []
        i = start
        while i not in seen:
            seen.add(i)
            circuit.append(leaving[i])
            i = succ[i]
        if i != start:
            raise IdentityViolation("partition", "path did not close into a circuit", {"disc": disc})
        circuits.append(tuple(circuit))
    return tuple(circuits)


def circuit_partition(c: CompanionComplex, upsilon: CommonGraph) -> CircuitPartition:
    """
    Partition the common graph into circuits by the right-most rule.

    Arriving at a collapsed vertex along a common edge, the walk leaves by
    the first common end met going forward round the y-cycle from the
    arrival end.

    Raises:
        IdentityViolation: The walk fails to close or to partition the edges.
    """
    ends_at = _common_ends(c, upsilon)
    p1 = _trace_disc(c, upsilon, 1, ends_at)
    p2 = _trace_disc(c, upsilon, 2, ends_at)
    partition = CircuitPartition(P1=p1, P2=p2)
    if not partition_covers(partition, upsilon):
        raise IdentityViolation("partition", "circuits do not partition the common graph")
    return partition


def partition_covers(partition: CircuitPartition, upsilon: CommonGraph) -> bool:
    """Both families are edge-disjoint and cover the common graph exactly."""
    for family in (partition.P1, partition.P2):
        used = [t.edge for circuit in family for t in circuit]
        if len(used) != len(set(used)) or set(used) != set(upsilon.edges):
            return False
    return True


def disc_genera(c: CompanionComplex, partition: CircuitPartition) -> Tuple[int, int]:
    """
    Genera of the two disc neighbourhoods.

    g_i = (E_i - V_i - h_i + 1) / 2 with V_i, E_i the companion vertices and
    edges visited by disc i.

    Raises:
        IdentityViolation: A genus is negative or not an integer.
    """
    out = []
    for disc, h in ((1, partition.h1), (2, partition.h2)):
        v = c.disc_vertex_count(disc)
        e = c.disc_edge_count(disc)
        twice = e - v - h + 1
        if twice < 0 or twice % 2:
            raise IdentityViolation("disc_genus", f"disc {disc} has no integral genus",
                                    {"V": v, "E": e, "h": h})
        out.append(twice // 2)
    return out[0], out[1]


def hecke_genus_formula(p: int, k: int, eta_x: int, eta_y: int) -> Fraction:
    """g = -(p+1-eta_y)/(2k) + (p+1-2*eta_y-eta_x)/4, exactly."""
    return Fraction(-(p + 1 - eta_y), 2 * k) + Fraction(p + 1 - 2 * eta_y - eta_x, 4)


def _edge_text(t: Traversal) -> str:
    return f"{format_label(t.start)}->{format_label(t.end)}"


@dataclass
class JanuarialReport:
    """Classification of one januarial with every identity it was checked against."""

    k: int
    ell: int
    type: str
    h1: int
    h2: int
    g1: int
    g2: int
    alpha: int
    genus: int
    eta_x: int
    eta_y: int
    V1: int
    E1: int
    V2: int
    E2: int
    checks: Dict[str, bool]
    x: str
    y: str
    points: str
    p: Optional[int] = None
    circuits: Dict[str, List[List[str]]] = field(default_factory=dict)
    theta: Optional[int] = None
    params: Optional[Dict[str, int]] = None

    @property
    def is_simple(self) -> bool:
        return self.type == SIMPLE

    @property
    def h(self) -> int:
        """Common circuit count of a simple januarial."""
        if not self.is_simple:
            raise ValueError("h is defined for simple januarials; use h1 and h2")
        return self.h1

    def signature(self) -> str:
        if self.is_simple:
            return f"({self.h1},{self.g1},{self.g2})"
        return f"(({self.h1},{self.g1}),({self.h2},{self.g2}))"

    def conserved_sum(self) -> Fraction:
        """g1 + g2 + (h1 + h2 + alpha)/2; equals g + 1."""
        return self.g1 + self.g2 + Fraction(self.h1 + self.h2 + self.alpha, 2)

    def action(self) -> TriangleAction:
        return TriangleAction.parse(self.x, self.y, domain=PointSet.parse(self.points), p=self.p)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        if self.p is not None:
            out["p"] = self.p
        out["k"] = self.k
        out["l"] = self.ell
        out["type"] = self.type
        out["h"] = self.h1 if self.is_simple else [self.h1, self.h2]
        out.update({"g1": self.g1, "g2": self.g2, "alpha": self.alpha, "genus": self.genus,
                    "eta_x": self.eta_x, "eta_y": self.eta_y,
                    "V1": self.V1, "E1": self.E1, "V2": self.V2, "E2": self.E2})
        out["checks"] = dict(self.checks)
        out["circuits"] = {name: [list(c) for c in circuits] for name, circuits in self.circuits.items()}
        out["action"] = {"x": self.x, "y": self.y, "points": self.points}
        if self.theta is not None:
            out["theta"] = self.theta
        if self.params is not None:
            out["params"] = dict(self.params)
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JanuarialReport":
        try:
            h = data["h"]
            h1, h2 = (h, h) if isinstance(h, int) else (int(h[0]), int(h[1]))
            return cls(
                p=data.get("p"), k=data["k"], ell=data["l"], type=data["type"],
                h1=h1, h2=h2, g1=data["g1"], g2=data["g2"], alpha=data["alpha"],
                genus=data["genus"], eta_x=data["eta_x"], eta_y=data["eta_y"],
                V1=data["V1"], E1=data["E1"], V2=data["V2"], E2=data["E2"],
                checks=dict(data["checks"]),
                circuits={name: [list(c) for c in v] for name, v in data.get("circuits", {}).items()},
                x=data["action"]["x"], y=data["action"]["y"], points=data["action"]["points"],
                theta=data.get("theta"), params=data.get("params"),
            )
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ParseError(f"malformed report: {exc!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "JanuarialReport":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"report is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("report must be a JSON object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class Classification:
    """Everything computed on the way to a report, kept for exporters."""

    diagram: EmbeddedDiagram
    companion: CompanionComplex
    upsilon: CommonGraph
    partition: CircuitPartition
    report: JanuarialReport


def analyze(action: TriangleAction, p: Optional[int] = None, theta: Optional[int] = None,
            params: Optional[Dict[str, int]] = None) -> Classification:
    """
    Run the whole pipeline on one action.

    Raises:
        NotJanuarialError: Not two equal xy-orbits.
        DisconnectedDiagramError: The diagram falls apart.
        IdentityViolation: A genus identity failed.
    """
    if not check_januarial(action).is_januarial:
        raise NotJanuarialError(f"{action!r} is not a januarial "
                                f"(xy-orbit sizes {list(check_januarial(action).xy_orbit_sizes)})")
    diagram = build_diagram(action)
    comp = companion(diagram)
    upsilon = common_graph(comp)
    partition = circuit_partition(comp, upsilon)
    report = classify(diagram, comp, upsilon, partition, p=p if p is not None else action.p,
                      theta=theta, params=params)
    return Classification(diagram, comp, upsilon, partition, report)


def classify(diagram: EmbeddedDiagram, c: CompanionComplex, upsilon: CommonGraph,
             partition: CircuitPartition, p: Optional[int] = None, theta: Optional[int] = None,
             params: Optional[Dict[str, int]] = None) -> JanuarialReport:
    """
    Decide simple or general type and check every genus identity.

    Simple type means every common-graph vertex has valency exactly 2 (and
    none is isolated); the common graph is then a union of h disjoint
    simple circuits with h1 = h2 = h.

    Raises:
        IdentityViolation: Any check fails; the exception carries a dump.
    """
    action = diagram.action
    g = diagram.genus
    g1, g2 = disc_genera(c, partition)
    h1, h2 = partition.h1, partition.h2
    alpha = upsilon.alpha
    valencies = upsilon.valencies()
    simple = bool(valencies) and all(v == 2 for v in valencies.values())

    checks: Dict[str, bool] = {}
    checks["faces"] = True  # build_diagram raises otherwise
    checks["lemma1"] = lemma1_genus(diagram) == g
    if simple:
        checks["lemma2"] = (h1 == h2 and alpha == 0 and g == g1 + g2 + h1 - 1)
    checks["lemma4"] = 2 * g == 2 * g1 + 2 * g2 + h1 + h2 + alpha - 2
    checks["prop8"] = all(v % 2 == 0 for v in valencies.values())
    if action.k == 3:
        checks["thm9"] = simple
    checks["partition"] = partition_covers(partition, upsilon)
    if p is not None:
        checks["formula"] = hecke_genus_formula(p, action.k, action.eta_x, action.eta_y) == g

    dump = {
        "x": action.x.cycle_string(), "y": action.y.cycle_string(),
        "genus": g, "g1": g1, "g2": g2, "h1": h1, "h2": h2, "alpha": alpha,
        "valencies": valencies, "checks": checks,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        logger.error("identity failure %s: %s", failed, dump)
        raise IdentityViolation(failed[0], f"failed checks {failed}", dump)

    return JanuarialReport(
        p=p, k=action.k, ell=action.ell, type=SIMPLE if simple else GENERAL,
        h1=h1, h2=h2, g1=g1, g2=g2, alpha=alpha, genus=g,
        eta_x=action.eta_x, eta_y=action.eta_y,
        V1=c.disc_vertex_count(1), E1=c.disc_edge_count(1),
        V2=c.disc_vertex_count(2), E2=c.disc_edge_count(2),
        checks=checks,
        circuits={"P1": [[_edge_text(t) for t in circ] for circ in partition.P1],
                  "P2": [[_edge_text(t) for t in circ] for circ in partition.P2]},
        x=action.x.cycle_string(), y=action.y.cycle_string(),
        points=action.domain.describe(),
        theta=theta, params=params,
    )


def conservation_check(reports: Sequence[JanuarialReport]) -> bool:
    """
    Check g1 + g2 + (h1 + h2 + alpha)/2 = g_pk + 1 across one (p, k) group.

    g_pk is the common genus of the group; a group whose genera differ
    fails too.

    Raises:
        ValueError: Reports from different (p, k).
    """
    if not reports:
        return True
    keys = {(r.p, r.k) for r in reports}
    if len(keys) != 1:
        raise ValueError(f"conservation_check needs a single (p, k) group, got {sorted(keys, key=str)}")
    g_pk = reports[0].genus
    ok = True
    for r in reports:
        if r.genus != g_pk or r.conserved_sum() != g_pk + 1:
            logger.warning("conservation fails for %s: sum=%s, g_pk=%d", r.signature(),
                           r.conserved_sum(), g_pk)
            ok = False
    return ok


def reference_report(report: JanuarialReport) -> JanuarialReport:
    """Recompute a report from its stored action."""
    return analyze(report.action(), p=report.p, theta=report.theta, params=report.params).report