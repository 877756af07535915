import csv
import io
import json

import pytest

from alccat.harness import (
    Budgets, DiffReport, GenConfig, Instance, InstanceResult, generate, run_diff, run_instance,
    sample_arrows, write_report,
)
from alccat.syntax import And, Exists, Forall, Name, _children
from support import EMPTY, P, onto


def walk(c):
    yield c
    for x in _children(c):
        yield from walk(x)


def test_generation_is_deterministic():
    cfg = GenConfig(seed=1, count=1)
    assert generate(cfg) == generate(cfg)
    assert generate(GenConfig(seed=1, count=20)) != generate(GenConfig(seed=2, count=20))
    # instance i does not depend on how many instances were requested
    assert generate(GenConfig(seed=9, count=30))[:10] == generate(GenConfig(seed=9, count=10))


def test_generation_bounds():
    for inst in generate(GenConfig(seed=4, count=50, n_concept_names=2, n_roles=1,
                                   max_depth=2, n_axioms=3)):
        assert len(inst.ontology.axioms) <= 3
        for c in [inst.concept] + [s for ax in inst.ontology.axioms for s in (ax.lhs, ax.rhs)]:
            for x in walk(c):
                if isinstance(x, Name):
                    assert x.id in ("A", "B")
                if isinstance(x, (Exists, Forall)):
                    assert x.role == "R"
        assert inst.to_json()["nnf"]


def test_depth_zero_is_atomic():
    for inst in generate(GenConfig(seed=2, count=20, max_depth=0)):
        assert isinstance(inst.concept, Name)


def test_conjunction_only_weights():
    w = {"atom": 0, "not": 0, "and": 1, "or": 0, "some": 0, "all": 0}
    for inst in generate(GenConfig.with_weights(w, seed=3, count=10, max_depth=2)):
        assert all(isinstance(x, (And, Name)) for x in walk(inst.concept))
        assert isinstance(inst.concept, And) and isinstance(inst.concept.left, And)


@pytest.mark.parametrize("kw", [
    {"n_concept_names": 5}, {"n_roles": 3}, {"max_depth": 5}, {"n_axioms": 6}, {"count": -1},
    {"n_concept_names": 0},
])
def test_config_bounds(kw):
    with pytest.raises(ValueError):
        GenConfig(**kw)
    with pytest.raises(ValueError):
        GenConfig.with_weights({"xor": 1.0})


def test_single_instances():
    r = run_instance(Instance(0, P("(and A (not A))"), EMPTY))
    assert (r.tableau, r.cat_syntactic, r.cat_guided, r.model) == ("unsat", "unsat", "unsat", "none")
    assert r.certificate == "verified" and not r.discrepancies
    r = run_instance(Instance(1, P("A"), EMPTY))
    assert (r.tableau, r.cat_syntactic, r.cat_guided) == ("sat", "open", "open")
    assert r.model == "found" and r.model_size == 1 and r.model_valid
    assert not r.discrepancies


def test_budget_exhaustion_is_skipped_not_agreement():
    inst = Instance(0, P("(and (some R A) (all R (not A)))"), EMPTY)
    r = run_instance(inst, Budgets(secs=0.0))
    assert r.skipped and r.tableau == "skipped"
    assert not r.discrepancies


def test_agreement_matrix_flags_contradictions():
    from alccat.harness import _judge
    r = InstanceResult(0, "A", "", tableau="sat", cat_syntactic="unsat", cat_guided="open",
                       model="found", model_valid=True, p1=True, p2=True)
    _judge(r)
    assert any("syntactic" in d for d in r.discrepancies)
    r = InstanceResult(0, "A", "", tableau="unsat", cat_syntactic="open", cat_guided="open",
                       model="none", certificate="verified", p1=True, p2=True)
    _judge(r)
    assert r.discrepancies == ["tableau unsat but guided category does not derive c0 -> bot"]
    r = InstanceResult(0, "A", "", tableau="unsat", cat_syntactic="open", cat_guided="unsat",
                       model="none", certificate="verified", p1=True, p2=True)
    _judge(r)
    assert not r.discrepancies


def fixture_corpus():
    hand = [("(and A (not A))", EMPTY), ("A", onto(("A", "bot"))),
            ("(or A B)", onto(("A", "bot"), ("B", "bot"))),
            ("(and (some R A) (all R (not A)))", EMPTY),
            ("(and A (some R B))", onto(("A", "(all R (not B))"))),
            ("A", onto(("A", "(some R A)"))),
            ("(and (some R A) (all R B))", onto(("B", "C")))]
    return [Instance(i, P(c), o) for i, (c, o) in enumerate(hand)]


def test_fixture_corpus_agrees(tmp_path):
    rep = run_diff(fixture_corpus())
    assert rep.ok and not rep.skipped
    s = rep.summary()
    assert s["tableau_unsat"] == 5 and s["certificates_verified"] == 5
    paths = write_report(rep, str(tmp_path / "out"))
    names = sorted(p.rsplit("/", 1)[1] for p in paths)
    assert names == ["certificates.png", "report.csv", "report.json", "summary.txt",
                     "timing.png", "verdicts.png"]
    data = json.loads((tmp_path / "out" / "report.json").read_text())
    assert data["summary"]["discrepancies"] == 0 and len(data["results"]) == 7
    rows = list(csv.DictReader(io.StringIO((tmp_path / "out" / "report.csv").read_text())))
    assert len(rows) == 7 and rows[0]["tableau"] == "unsat"
    assert (tmp_path / "out" / "verdicts.png").read_bytes()[:4] == b"\x89PNG"
    assert "discrepancies           0" in rep.to_text()


def test_report_lists_discrepancies():
    rep = DiffReport([InstanceResult(3, "A", "", discrepancies=["x"])])
    assert not rep.ok and rep.discrepancies == [(3, "x")]
    assert "#3: x" in rep.to_text()


def test_arrow_samples_are_entailed():
    corpus = generate(GenConfig(seed=8, count=10))
    samples = sample_arrows(corpus, n=60, seed=1)
    assert len(samples) == 60
    assert all(s.entailed for s in samples)
    assert sample_arrows(corpus, n=60, seed=1) == samples


def test_budgets_from_env(monkeypatch):
    monkeypatch.setenv("ALC_BUDGET_SECS", "2.5")
    assert Budgets.from_env().secs == 2.5
    assert Budgets.from_env(secs=1.0).secs == 1.0


def test_unsat_heavy_corpus_agrees():
    # negation- and restriction-heavy weights give far more refutations than
    # the default mix, so certificates and guided saturation get exercised
    w = {"atom": 2, "not": 2, "and": 3, "or": 1, "some": 2, "all": 2}
    cfg = GenConfig.with_weights(w, seed=13, count=80, n_concept_names=2, n_axioms=5)
    rep = run_diff(generate(cfg))
    s = rep.summary()
    assert rep.ok
    assert s["tableau_unsat"] >= 8
    assert s["certificates_verified"] == s["tableau_unsat"]
    assert s["skipped"] <= 2
