import dataclasses

import pytest

from census_engine import CensusEngine, CensusState, hecke_rows, summarize
from errors import NoSolutionError


def test_hecke_rows_contain_d17_example(d17_params):
    rows = hecke_rows(17, 8, theta=16, b=8)
    matching = [r for r in rows if r.report.params == d17_params.as_dict()]
    assert len(matching) == 1
    r = matching[0].report
    assert r.to_dict()["h"] == [2, 1]
    assert (r.genus, r.alpha, r.theta) == (2, -1, 16)
    assert r.checks["prop6"] and r.checks["formula"]
    assert all(row.status == "ok" for row in rows)


def test_hecke_rows_drop_rescaled_duplicates():
    rows = hecke_rows(17, 8, theta=16, b=8)
    actions = [(r.report.x, r.report.y) for r in rows]
    assert len(actions) == len(set(actions))
    # negating a and c gives the same involution
    negated = {"a": 16, "b": 8, "c": 7, "d": 1, "e": 0, "f": 4, "nabla": 1, "r": 13}
    assert all(r.report.params != negated for r in rows)


def test_hecke_rows_cap():
    rows = hecke_rows(17, 8, theta=16, max_solutions=3)
    assert len(rows) == 3
    assert all(r.ell == 9 and r.theta == 16 for r in rows)


def test_hecke_rows_share_genus():
    rows = hecke_rows(17, 8, theta=16, b=8)
    summary = summarize(17, 8, rows)
    assert summary.g_pk == 2
    assert summary.conserved and summary.conserved_sum == 3
    assert summary.simple + summary.general == summary.rows == len(rows)
    assert summary.to_dict()["conserved_sum"] == "3"


def test_hecke_rows_without_solutions():
    with pytest.raises(NoSolutionError):
        hecke_rows(7, 100)
    with pytest.raises(NoSolutionError):
        hecke_rows(17, 8, theta=3)


def test_cells():
    assert CensusEngine.cells(2, 5) == []
    assert CensusEngine.cells(7, 4) == [(3, 3), (3, 4), (5, 3), (5, 4), (7, 3), (7, 4)]


def test_empty_census(tmp_settings):
    engine = CensusEngine(tmp_settings)
    assert engine.state == CensusState.IDLE
    assert engine.run(2, 8) == ([], [])
    assert engine.state == CensusState.FINISHED


def test_small_census_is_ordered_and_conserved(tmp_settings):
    done = []
    engine = CensusEngine(tmp_settings)
    engine.set_progress_callback(lambda p, k, n, total: done.append((p, k, n, total)))
    rows, summaries = engine.run(13, 5, max_solutions=2)
    assert [(r.p, r.k) for r in rows] == sorted((r.p, r.k) for r in rows)
    assert all(s.conserved for s in summaries)
    assert len(done) == len(CensusEngine.cells(13, 5))
    assert done[-1][2] == done[-1][3]


def test_census_is_deterministic_across_workers(tmp_settings):
    serial = CensusEngine(tmp_settings).run(13, 5, max_solutions=2)
    parallel = CensusEngine(dataclasses.replace(tmp_settings, workers=3)).run(13, 5, max_solutions=2)
    assert [r.to_dict() for r in serial[0]] == [r.to_dict() for r in parallel[0]]
    assert serial[1] == parallel[1]


@pytest.mark.slow
def test_census_over_p17():
    rows, summaries = CensusEngine().run(17, 8)
    by_cell = {(s.p, s.k): s for s in summaries}
    assert by_cell[(17, 8)].g_pk == 2
    assert all(s.conserved for s in summaries)
    assert all(r.report.genus == 2 for r in rows if (r.p, r.k) == (17, 8))


@pytest.mark.slow
def test_three_genus_counts_agree_up_to_p50():
    rows, _ = CensusEngine().run(50, 6, max_solutions=1)
    assert rows
    for row in rows:
        checks = row.report.checks
        assert checks["lemma1"] and checks["formula"] and checks["faces"], (row.p, row.k)


def test_p3_cells_are_empty(tmp_settings):
    rows, summaries = CensusEngine(tmp_settings).run(5, 4)
    assert {(s.p, s.k) for s in summaries} <= {(5, 3), (5, 4)}
    assert all(r.p == 5 for r in rows)
    with pytest.raises(NoSolutionError):
        hecke_rows(3, 3)


@pytest.mark.slow
def test_census_up_to_p50_k10():
    rows, summaries = CensusEngine().run(50, 10)
    assert rows and summaries
    assert all(s.conserved for s in summaries)
    for row in rows:
        checks = row.report.checks
        assert checks["lemma1"] and checks["formula"] and checks["prop8"], (row.p, row.k)
        assert checks["prop6"]
