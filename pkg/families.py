"""
Families Module
Simple januarials with a single common circuit for every k, and a random
harness for the simplicity of 3-januarials.

Even k: two k-gons joined by two x-edges, an action of Delta(2,k,k) on 2k
points. Odd k: four k-gons joined in a ring, an action of Delta(2,k,2k) on
4k points, found by a bounded search and cached as plain cycle text.
"""

import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import Settings
from embedding import TriangleAction, check_januarial
from errors import (CertificationError, DisconnectedDiagramError, IdentityViolation,
                    JanuarialError, ParseError, SearchExhaustedError)
from perm_core import Perm, PointSet
from topology import Classification, JanuarialReport, analyze

logger = logging.getLogger(__name__)

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class FamilySpec:
    """Shape of the family member for one k."""

    k: int
    parity: str
    point_count: int
    ell: int

    @classmethod
    def for_k(cls, k: int) -> "FamilySpec":
        if k < 3:
            raise ValueError(f"k must be at least 3, got {k}")
        if k % 2 == 0:
            return cls(k=k, parity=EVEN, point_count=2 * k, ell=k)
        return cls(k=k, parity=ODD, point_count=4 * k, ell=2 * k)


def polygons(k: int, count: int) -> List[Tuple[int, ...]]:
    """Consecutive k-cycles (1..k)(k+1..2k)... on count*k points."""
    return [tuple(range(j * k + 1, j * k + k + 1)) for j in range(count)]


def even_family(k: int) -> TriangleAction:
    """
    Two k-gons joined by (1, 3k/2+1) and (k/2+1, k+1).

    Raises:
        ValueError: k odd or below 4.
        CertificationError: The result is not a januarial.
    """
    if k < 4 or k % 2:
        raise ValueError(f"even_family needs an even k >= 4, got {k}")
    domain = PointSet.interval(1, 2 * k)
    x = Perm.from_cycles(domain, [(1, 3 * k // 2 + 1), (k // 2 + 1, k + 1)])
    y = Perm.from_cycles(domain, polygons(k, 2))
    action = TriangleAction(x, y, k=k, ell=k, name=f"even family k={k}")
    if not check_januarial(action).is_januarial:
        raise CertificationError(f"even family k={k} is not a januarial")
    return action


def ring_candidates(k: int) -> Iterator[Tuple[int, ...]]:
    """
    Ring involutions on four k-gons, lexicographically.

    Offset s_j in [1, k-1] picks the point of polygon j joined to the first
    point of polygon j+1 (indices mod 4). Yields the four offsets.
    """
    return itertools.product(range(1, k), repeat=4)


def ring_action(k: int, offsets: Sequence[int]) -> TriangleAction:
    """The ring action for the given offsets; xy order is not forced."""
    polys = polygons(k, 4)
    pairs = [(polys[j][offsets[j]], polys[(j + 1) % 4][0]) for j in range(4)]
    domain = PointSet.interval(1, 4 * k)
    x = Perm.from_cycles(domain, pairs)
    y = Perm.from_cycles(domain, polys)
    return TriangleAction(x, y, k=k, name=f"odd family k={k}")


def check_odd_contract(action: TriangleAction, k: int) -> Optional[JanuarialReport]:
    """
    Full contract for an odd-family witness.

    x an involution, y four k-cycles, xy of exact order 2k with two orbits
    of 2k points, and a simple classification with one common circuit.

    Returns:
        The report when the contract holds, otherwise None.
    """
    if len(action.domain) != 4 * k or action.k != k or action.ell != 2 * k:
        return None
    if sorted(action.y.cycle_type()) != [k] * 4 or not action.x.is_involution():
        return None
    if check_januarial(action).xy_orbit_sizes != (2 * k, 2 * k):
        return None
    try:
        report = analyze(action).report
    except DisconnectedDiagramError:
        return None
    if not report.is_simple or report.h != 1:
        return None
    return report


def load_witnesses(path: Path) -> Dict[int, Tuple[str, str]]:
    """
    Read a witness file of lines ``k x=<cycles> y=<cycles>``.

    Blank lines and lines starting with '#' are skipped.

    Raises:
        ParseError: A line does not follow the format.
    """
    out: Dict[int, Tuple[str, str]] = {}
    if not path.exists():
        return out
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if (len(parts) != 3 or not parts[1].startswith("x=") or not parts[2].startswith("y=")):
            raise ParseError(f"{path}:{lineno}: expected 'k x=... y=...'")
        try:
            k = int(parts[0])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: invalid k {parts[0]!r}") from None
        out[k] = (parts[1][2:], parts[2][2:])
    return out


def save_witness(path: Path, k: int, action: TriangleAction) -> None:
    """Add or replace the witness for k, keeping the file sorted by k."""
    witnesses = load_witnesses(path)
    witnesses[k] = (action.x.cycle_string(), action.y.cycle_string())
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# odd-k single-circuit januarials: k x=<cycles> y=<cycles>"]
    lines += [f"{kk} x={xs} y={ys}" for kk, (xs, ys) in sorted(witnesses.items())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class OddFamilySearch:
    """
    Bounded search for odd-k witnesses.

    Candidates are ring involutions of exactly four transpositions, checked
    in lexicographic offset order; with several workers they are checked in
    ordered chunks so the first witness found is the same as a
    single-threaded run.

    ``max_transpositions`` only gates that space: below four nothing is
    admitted, and every value from four up searches the same candidates.
    """

    CHUNK_SIZE = 64
    RING_TRANSPOSITIONS = 4

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self._stop_event = threading.Event()
        self._lock = threading.Lock()
        self._checked = 0
        self._progress_callback: Optional[Callable[[int, int], None]] = None
        self._error_callback: Optional[Callable[[str], None]] = None

    def set_progress_callback(self, callback: Callable[[int, int], None]) -> None:
        """Set callback for search progress (receives k, candidates checked)."""
        self._progress_callback = callback

    def set_error_callback(self, callback: Callable[[str], None]) -> None:
        """Set callback for candidates that raise while being checked."""
        self._error_callback = callback

    def stop(self) -> None:
        self._stop_event.set()

    @property
    def checked(self) -> int:
        return self._checked

    def _check(self, k: int, offsets: Tuple[int, ...]) -> Optional[TriangleAction]:
        if self._stop_event.is_set():
            return None
        try:
            action = ring_action(k, offsets)
            found = action if check_odd_contract(action, k) is not None else None
        except JanuarialError as e:
            found = None
            if isinstance(e, IdentityViolation) and self._error_callback:
                self._error_callback(f"candidate {offsets} for k={k}: {e}")
        with self._lock:
            self._checked += 1
            if self._progress_callback:
                self._progress_callback(k, self._checked)
        return found

    def _check_chunk(self, k: int, chunk: List[Tuple[int, ...]]) -> Optional[TriangleAction]:
        for offsets in chunk:
            found = self._check(k, offsets)
            if found is not None:
                return found
        return None

    def run(self, k: int, max_candidates: Optional[int] = None,
            max_transpositions: Optional[int] = None) -> TriangleAction:
        """
        Find the first ring witness for odd k.

        Raises:
            ValueError: k even or below 3.
            SearchExhaustedError: Nothing within the bounds passes the contract.
        """
        if k < 3 or k % 2 == 0:
            raise ValueError(f"odd_family needs an odd k >= 3, got {k}")
        max_candidates = (self.settings.odd_search_max_candidates
                          if max_candidates is None else max_candidates)
        max_transpositions = (self.settings.odd_search_max_transpositions
                              if max_transpositions is None else max_transpositions)
        self._stop_event.clear()
        self._checked = 0

        if max_transpositions < self.RING_TRANSPOSITIONS:
            raise SearchExhaustedError(
                f"search exhausted for k={k}: no ring involution has <= {max_transpositions} transpositions")
        if max_transpositions > self.RING_TRANSPOSITIONS:
            logger.debug("odd family k=%d: rings use %d transpositions, bound %d admits them all",
                         k, self.RING_TRANSPOSITIONS, max_transpositions)

        candidates = list(itertools.islice(ring_candidates(k), max_candidates))
        chunks = [candidates[i:i + self.CHUNK_SIZE] for i in range(0, len(candidates), self.CHUNK_SIZE)]
        workers = max(1, self.settings.workers)

        winner: Optional[TriangleAction] = None
        if workers == 1:
            for chunk in chunks:
                winner = self._check_chunk(k, chunk)
                if winner is not None:
                    break
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                # map yields in submission order
                for found in pool.map(lambda ch: self._check_chunk(k, ch), chunks):
                    if found is not None:
                        winner = found
                        self._stop_event.set()
                        break

        if winner is None:
            raise SearchExhaustedError(
                f"search exhausted for k={k} after {self._checked} of {len(candidates)} candidates")
        logger.info("odd family k=%d: witness %s after %d candidates",
                    k, winner.x.cycle_string(), self._checked)
        return TriangleAction(winner.x, winner.y, k=k, ell=2 * k, name=f"odd family k={k}")


def odd_family(k: int, settings: Optional[Settings] = None, use_cache: bool = True,
               max_candidates: Optional[int] = None,
               max_transpositions: Optional[int] = None) -> TriangleAction:
    """
    A certified simple januarial with one common circuit on 4k points.

    Cached witnesses are re-verified before use; a witness found by search
    is written back to the cache.

    Raises:
        SearchExhaustedError: The bounded search found nothing.
    """
    settings = settings or Settings.from_env()
    if k < 3 or k % 2 == 0:
        raise ValueError(f"odd_family needs an odd k >= 3, got {k}")
    path = settings.witness_path

    if use_cache and max_transpositions is None:
        cached = load_witnesses(path).get(k)
        if cached is not None:
            try:
                action = TriangleAction.parse(cached[0], cached[1], domain=PointSet.interval(1, 4 * k),
                                              k=k, ell=2 * k, name=f"odd family k={k}")
                if check_odd_contract(action, k) is not None:
                    logger.debug("odd family k=%d: cache hit in %s", k, path)
                    return action
            except JanuarialError as e:
                logger.warning("ignoring cached witness for k=%d: %s", k, e)
            else:
                logger.warning("cached witness for k=%d fails the contract; searching", k)
        logger.debug("odd family k=%d: cache miss in %s", k, path)

    action = OddFamilySearch(settings).run(k, max_candidates=max_candidates,
                                          max_transpositions=max_transpositions)
    if use_cache:
        try:
            save_witness(path, k, action)
        except OSError as e:
            logger.warning("could not cache witness for k=%d in %s: %s", k, path, e)
    return action


def family_action(k: int, settings: Optional[Settings] = None) -> TriangleAction:
    """Parity-appropriate family member for k."""
    spec = FamilySpec.for_k(k)
    if spec.parity == EVEN:
        return even_family(k)
    return odd_family(k, settings=settings)


def six_point_example() -> TriangleAction:
    """Delta(2,3,3) on six points: a spherical januarial."""
    return TriangleAction.parse("(1,5)(3,4)", "(1,2,3)(4,5,6)", domain=PointSet.interval(1, 6),
                                k=3, ell=3, name="six-point example")


@dataclass
class ThreePropertyResult:
    trials: int
    januarials: int
    failures: List[Dict]
    attempts: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures and self.januarials >= self.trials


def random_three_action(rng: np.random.Generator, max_points: int) -> TriangleAction:
    """
    Random involution against a fixed product of 3-cycles.

    The point count is a multiple of 6 so two equal xy-orbits are possible,
    and x has between n/3 and n/2 transpositions, enough to join the n/3
    triangles.
    """
    if max_points < 6:
        raise ValueError(f"max_points must be at least 6, got {max_points}")
    n = 6 * int(rng.integers(1, max_points // 6 + 1))
    domain = PointSet.interval(1, n)
    y = Perm.from_cycles(domain, polygons(3, n // 3))
    points = [int(z) for z in rng.permutation(np.arange(1, n + 1))]
    t = int(rng.integers(n // 3, n // 2 + 1))
    pairs = [(points[2 * i], points[2 * i + 1]) for i in range(t)]
    x = Perm.from_cycles(domain, pairs)
    return TriangleAction(x, y)


def run_three_property(trials: int, seed: int, max_points: int = 30, strict: bool = False,
                       max_attempts: Optional[int] = None) -> ThreePropertyResult:
    """
    Classify ``trials`` random connected 3-januarials and collect any that are
    not simple.

    Draws that are not januarials or have a disconnected diagram do not count
    as trials. Drawing stops after ``max_attempts`` (default 1000 per trial);
    a short run does not pass.

    Raises:
        IdentityViolation: A counterexample, when ``strict``.
    """
    if max_attempts is None:
        max_attempts = 1000 * trials
    rng = np.random.default_rng(seed)
    found = 0
    attempts = 0
    failures: List[Dict] = []
    while found < trials and attempts < max_attempts:
        attempts += 1
        action = random_three_action(rng, max_points)
        if not check_januarial(action).is_januarial:
            continue
        try:
            result: Classification = analyze(action)
        except DisconnectedDiagramError:
            logger.debug("skipping disconnected %r", action)
            continue
        except IdentityViolation as e:
            logger.error("3-januarial counterexample: %s", e.dump)
            failures.append(e.dump)
            if strict:
                raise
            continue
        found += 1
        if not result.report.is_simple:
            dump = {"x": result.report.x, "y": result.report.y, "valencies": result.upsilon.valencies()}
            logger.error("3-januarial of general type: %s", dump)
            failures.append(dump)
            if strict:
                raise IdentityViolation("thm9", "3-januarial of general type", dump)
    if found < trials:
        logger.warning("three property: only %d of %d januarials after %d draws", found, trials, attempts)
    logger.info("three property: %d januarials from %d draws, %d failures", found, attempts, len(failures))
    return ThreePropertyResult(trials=trials, januarials=found, failures=failures, attempts=attempts)


def three_property(trials: int, seed: int, max_points: int = 30) -> bool:
    """True iff ``trials`` random connected 3-januarials all classify simple."""
    return run_three_property(trials, seed, max_points=max_points).passed
