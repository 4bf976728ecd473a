"""
Census Engine Module
Runs the Hecke construction over ranges of (p, k) and checks the
conservation law inside every (p, k) group.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from config import Settings
from errors import CertificationError, DisconnectedDiagramError, IdentityViolation, NoSolutionError
from hecke_search import build_action, januarial_primes, primitive_roots, solve_params, valid_b_values
from topology import JanuarialReport, analyze, conservation_check

logger = logging.getLogger(__name__)


class CensusState(Enum):
    IDLE = "idle"
    RUNNING = "running"
    FINISHED = "finished"
    STOPPED = "stopped"


@dataclass
class CensusRow:
    """One constructed januarial."""

    p: int
    k: int
    ell: int
    theta: int
    report: JanuarialReport

    @property
    def status(self) -> str:
        return "ok" if all(self.report.checks.values()) else "FAIL"

    def to_dict(self) -> Dict:
        return self.report.to_dict()


@dataclass(frozen=True)
class GroupSummary:
    """Conservation data for one (p, k) group."""

    p: int
    k: int
    g_pk: Optional[int]
    rows: int
    simple: int
    general: int
    conserved_sum: Optional[Fraction]
    conserved: bool

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "k": self.k,
            "g_pk": self.g_pk,
            "rows": self.rows,
            "simple": self.simple,
            "general": self.general,
            "conserved_sum": None if self.conserved_sum is None else str(self.conserved_sum),
            "conserved": self.conserved,
        }


def hecke_rows(p: int, k: int, theta: Optional[int] = None, b: Optional[int] = None,
               max_solutions: Optional[int] = None) -> List[CensusRow]:
    """
    Build and classify every distinct Hecke januarial for (p, k).

    Parameter tuples giving the same pair of maps (up to scalars) give the
    same action and are classified once. At most ``max_solutions`` actions
    are kept per theta.

    Raises:
        NoSolutionError: No primitive root or no parameters at all.
        IdentityViolation: A genus identity or the conservation law failed.
    """
    ell = (p + 1) // 2
    thetas = sorted(int(t) for t in primitive_roots(ell, p)) if ell >= 2 else []
    if theta is not None:
        thetas = [t for t in thetas if t == int(theta) % p]
    if not thetas:
        raise NoSolutionError(f"f_{ell} has no primitive roots mod {p}")
    b_values = valid_b_values(p, k)
    if b is not None:
        b_values = [v for v in b_values if v == int(b) % p]
    if not b_values:
        raise NoSolutionError(f"y cannot have order {k} in PGL(2,{p})")

    rows: List[CensusRow] = []
    seen = set()
    for t in thetas:
        kept = 0
        for b_val in b_values:
            if max_solutions is not None and kept >= max_solutions:
                break
            try:
                params_list = solve_params(p, k, t, b=b_val)
            except NoSolutionError:
                continue
            for params in params_list:
                if max_solutions is not None and kept >= max_solutions:
                    break
                key = (params.x_map().normalized(), params.y_map().normalized())
                if key in seen:
                    continue
                seen.add(key)
                action = build_action(params)
                try:
                    result = analyze(action, p=p, theta=t, params=params.as_dict())
                except DisconnectedDiagramError as e:
                    logger.warning("skipping p=%d k=%d theta=%d %s: %s", p, k, t, params.as_dict(), e)
                    continue
                rows.append(CensusRow(p=p, k=k, ell=ell, theta=t, report=result.report))
                kept += 1

    if not rows:
        raise NoSolutionError(f"no januarials for p={p}, k={k}")
    summary = summarize(p, k, rows)
    if not summary.conserved:
        raise IdentityViolation("prop6", f"conservation fails for p={p}, k={k}", summary.to_dict())
    return rows


def summarize(p: int, k: int, rows: List[CensusRow]) -> GroupSummary:
    """Run the conservation check on a group and record it on every row."""
    reports = [r.report for r in rows]
    ok = conservation_check(reports)
    for report in reports:
        report.checks["prop6"] = ok
    sums = {r.conserved_sum() for r in reports}
    return GroupSummary(
        p=p, k=k,
        g_pk=reports[0].genus if reports else None,
        rows=len(reports),
        simple=sum(1 for r in reports if r.is_simple),
        general=sum(1 for r in reports if not r.is_simple),
        conserved_sum=sums.pop() if len(sums) == 1 else None,
        conserved=ok,
    )


class CensusEngine:
    """
    Sweeps primes p <= p_max and 3 <= k <= k_max.

    Cells run on a thread pool; results are merged in (p, k) order
    whatever the worker timing.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self._state = CensusState.IDLE
        self._stop_event = threading.Event()
        self._lock = threading.Lock()
        self._done = 0
        self._progress_callback: Optional[Callable[[int, int, int, int], None]] = None
        self._error_callback: Optional[Callable[[str], None]] = None

    def set_progress_callback(self, callback: Callable[[int, int, int, int], None]) -> None:
        """Set callback for finished cells (receives p, k, cells done, cells total)."""
        self._progress_callback = callback

    def set_error_callback(self, callback: Callable[[str], None]) -> None:
        """Set callback for cells that fail."""
        self._error_callback = callback

    @property
    def state(self) -> CensusState:
        return self._state

    def stop(self) -> None:
        self._stop_event.set()

    @staticmethod
    def cells(p_max: int, k_max: int) -> List[Tuple[int, int]]:
        return [(p, k) for p in januarial_primes(p_max) for k in range(3, k_max + 1)]

    def _run_cell(self, cell: Tuple[int, int], total: int,
                  max_solutions: Optional[int]) -> List[CensusRow]:
        p, k = cell
        rows: List[CensusRow] = []
        if not self._stop_event.is_set():
            try:
                rows = hecke_rows(p, k, max_solutions=max_solutions)
            except NoSolutionError as e:
                logger.debug("census cell p=%d k=%d empty: %s", p, k, e)
            except (IdentityViolation, CertificationError) as e:
                if self._error_callback:
                    self._error_callback(f"p={p} k={k}: {e}")
                raise
        with self._lock:
            self._done += 1
            if self._progress_callback:
                self._progress_callback(p, k, self._done, total)
        return rows

    def run(self, p_max: int, k_max: int,
            max_solutions: Optional[int] = None) -> Tuple[List[CensusRow], List[GroupSummary]]:
        """
        Run the sweep.

        Returns:
            All rows and one summary per non-empty (p, k) group, both in
            (p, k) order.
        """
        if max_solutions is None:
            max_solutions = self.settings.census_max_solutions
        cells = self.cells(p_max, k_max)
        self._stop_event.clear()
        self._done = 0
        self._state = CensusState.RUNNING
        logger.info("census over %d cells with %d workers", len(cells), self.settings.workers)

        try:
            if self.settings.workers > 1:
                with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
                    per_cell = list(pool.map(
                        lambda cell: self._run_cell(cell, len(cells), max_solutions), cells))
            else:
                per_cell = [self._run_cell(cell, len(cells), max_solutions) for cell in cells]
        except Exception:
            self._state = CensusState.IDLE
            raise

        rows: List[CensusRow] = []
        summaries: List[GroupSummary] = []
        for (p, k), cell_rows in zip(cells, per_cell):
            if not cell_rows:
                continue
            rows.extend(cell_rows)
            summaries.append(summarize(p, k, cell_rows))

        self._state = CensusState.STOPPED if self._stop_event.is_set() else CensusState.FINISHED
        return rows, summaries
