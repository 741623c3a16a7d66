import math
import os

import pytest

import sysnr

DATA = os.environ.get("SYSNR_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


def test_builtin_summary_and_lr_anchor():
    s = sysnr.murthy_summary()
    assert s.N == 176 and s.n == 16
    assert s.rho_y == pytest.approx(0.958912, abs=5e-7)
    nr = sysnr.NonResponse(0.1, 2.0, 0.75 * s.s2_y)
    assert sysnr.theory_lr(s, nr).pre == pytest.approx(407.4884, rel=5e-4)
    assert sysnr.theory_hh(s, nr).pre == pytest.approx(100.0)


def test_reference_table_matches_published_cells():
    s = sysnr.murthy_summary()
    rows = sysnr.theory_table(s, sysnr.murthy_grid(), weights="reference", flag_published=True)
    assert len(rows) == 64
    published = {(c["k_rate"], c["l_factor"]): c for c in sysnr.murthy_published()}
    order = ["lr", "t1", "t2", "t3"]
    flagged = 0
    for r in rows:
        cell = published[(r["k_rate"], r["l_factor"])]
        col = order.index(r["estimator"])
        if r["suspect"]:
            flagged += 1
            continue
        assert abs(r["pre"] - cell["pre"][col]) / cell["pre"][col] < 5e-4
    assert flagged == 6


def test_optimum_and_supplied_weights():
    s = sysnr.murthy_summary()
    nr = sysnr.NonResponse(0.2, 3.0, 0.75 * s.s2_y)
    t1 = sysnr.theory_t1(s, nr)
    w = (t1.constants["w11"], t1.constants["w12"])
    assert sysnr.theory_t1(s, nr, weights=w).mse == pytest.approx(t1.mse, rel=1e-12)
    assert sysnr.theory_t1(s, nr, weights=(1.0, 0.0)).mse == pytest.approx(sysnr.var_hh(s, nr), rel=1e-12)
    assert sysnr.theory_t2(s, nr).pre >= t1.pre
    assert sysnr.theory_t3(s, nr, gamma=1.0).mse == pytest.approx(sysnr.theory_lr(s, nr).mse, rel=1e-12)


def test_load_and_summarize():
    pop = sysnr.load_population(os.path.join(DATA, "twelve.csv"))
    assert len(pop) == 12
    s = sysnr.summarize(pop, sysnr.Design(12, 3))
    assert s.ybar == pytest.approx(sum(pop.y) / 12)
    with pytest.raises(sysnr.ParseError):
        sysnr.load_population(os.path.join(DATA, "bad_number.csv"))
    with pytest.raises(sysnr.DomainError):
        sysnr.Design(10, 3)


def test_simulation_is_deterministic():
    pop = sysnr.generate_population()
    d = sysnr.Design(288, 16)
    a = sysnr.simulate(pop, d, k_rate=0.25, reps=400, seed=5)
    b = sysnr.simulate(pop, d, k_rate=0.25, reps=400, seed=5, threads=4)
    assert [r["empirical_mse"] for r in a["rows"]] == [r["empirical_mse"] for r in b["rows"]]
    assert [r["estimator"] for r in a["rows"]] == ["hh", "lr", "t1", "t2", "t3"]
    assert a["mean_realized_l"] == pytest.approx(2.0)
    assert all(math.isfinite(r["theory_mse"]) for r in a["rows"])


def test_errors_are_typed():
    s = sysnr.murthy_summary()
    nr = sysnr.NonResponse(0.1, 2.0, 100.0)
    with pytest.raises(sysnr.SpecError):
        sysnr.theory_t2(s, nr, alpha=2.0)
    with pytest.raises(sysnr.DomainError):
        sysnr.NonResponse(1.5, 2.0, 1.0)
    with pytest.raises(sysnr.DomainError):
        sysnr.generate_population(rho_y=0.95)
