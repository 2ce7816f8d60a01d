import numpy as np
import pytest

from proxhull.study import COLUMNS, StudyConfig, StudyRow, build_problem, run_row, run_study, write_rows


@pytest.mark.parametrize("kwargs", [
    dict(hs=[], lams=[1.0]),
    dict(hs=[0.1], lams=[0.0]),
    dict(hs=[-0.1], lams=[1.0]),
    dict(hs=[0.1], lams=[1.0], scheme="fast"),
    dict(hs=[0.1], lams=[1.0], oracle="ex3d"),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        StudyConfig(**kwargs)


def test_schemes_property():
    assert StudyConfig([0.1], [1.0], scheme="both").schemes == ("moreau", "convex")
    assert StudyConfig([0.1], [1.0]).schemes == ("moreau",)


class TestProblems:
    def test_ex1d_grid(self):
        p = build_problem("ex1d", 0.1, 1.0)
        assert p.field.dims == (41,) and p.framed and p.mask.all()
        assert p.field.values[0] == pytest.approx(1.0) and p.field.values[20] == pytest.approx(1.0)

    def test_ex2d_grid(self):
        p = build_problem("ex2d", 0.1, 1.0)
        assert p.field.dims == (51, 51)
        assert p.field.values[25, 25] == pytest.approx(1.0)
        assert p.field.values[0, 0] == 0

    def test_inf_extensions(self):
        p = build_problem("ex1d_inf", 0.05, 2.0, big_m=1e3)
        assert p.extra["a"] == 0.25 and not p.framed
        assert np.all(p.field.values[~p.mask] == 1e3)
        q = build_problem("ex2d_inf", 0.1, 1.0, extension=0.5)
        assert q.field.dims == (51, 51) and q.extra["a"] == 0.5

    def test_unknown(self):
        with pytest.raises(ValueError):
            build_problem("nope", 0.1, 1.0)


def test_rows_and_csv(tmp_path):
    cfg = StudyConfig([0.1], [1.0], scheme="both")
    rows = run_study(cfg)
    assert [r.scheme for r in rows] == ["moreau", "convex"]
    moreau, convex = rows
    assert moreau.linf_error <= 0.1 and convex.linf_error <= 0.12
    assert convex.m > moreau.m
    out = tmp_path / "rows.csv"
    text = write_rows(rows, out)
    assert out.read_text() == text
    head, *body = text.splitlines()
    assert tuple(head.split(",")) == COLUMNS and len(body) == 2


def test_timeout_row_prints_dashes():
    cfg = StudyConfig([0.01], [2.0], scheme="convex", convex_time_limit=0.0)
    row = run_row(cfg, 0.01, 2.0, "convex")
    assert row.m is None and row.cells()[3:] == ["-", "-"]


def test_row_formatting():
    assert StudyRow(0.05, 1.0, "moreau", 20, 0.0203122412).cells() == \
        ["0.05", "1.0", "moreau", "20", "0.02031224"]


def test_progress_callback():
    seen = []
    run_study(StudyConfig([0.1, 0.05], [1.0]), progress=seen.append)
    assert [r.h for r in seen] == [0.1, 0.05]
