"""Random instances and the three-way differential run.

Every instance is decided by the tableau, by saturation over the syntactic
universe, by saturation over the certificate-guided universe, and probed with
the bounded model finder.  Disagreements that contradict soundness or
completeness are reported as discrepancies.
"""
from __future__ import annotations

import csv
import io
import json
import os
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .category import UniverseConfig, build_universe, saturate
from .certificate import check_certificate, extract_certificate
from .semantics import BudgetExceeded, eval_concept, find_model, satisfies
from .syntax import (
    BOT, TOP, And, Concept, Exists, Forall, GCI, Name, Not, Ontology, Or,
    Signature, canonicalize, nnf, print_concept,
)
from .tableau import (
    DEFAULT_MAX_NODES, DEFAULT_MAX_TREES, check_p1, check_p2, decide_sat,
)

CONNECTIVES = ("atom", "not", "and", "or", "some", "all")
DEFAULT_WEIGHTS = {"atom": 3.0, "not": 1.0, "and": 2.0, "or": 2.0, "some": 1.5, "all": 1.5}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    count: int = 100
    n_concept_names: int = 3
    n_roles: int = 2
    max_depth: int = 3
    n_axioms: int = 4
    weights: tuple = tuple(sorted(DEFAULT_WEIGHTS.items()))

    def __post_init__(self):
        if not 1 <= self.n_concept_names <= 4:
            raise ValueError("n_concept_names must be in 1..4")
        if not 1 <= self.n_roles <= 2:
            raise ValueError("n_roles must be in 1..2")
        if not 0 <= self.max_depth <= 4:
            raise ValueError("max_depth must be in 0..4")
        if not 0 <= self.n_axioms <= 5:
            raise ValueError("n_axioms must be in 0..5")
        if self.count < 0:
            raise ValueError("count must be >= 0")
        w = dict(self.weights)
        if set(w) - set(CONNECTIVES) or any(v < 0 for v in w.values()):
            raise ValueError(f"weights are non-negative and keyed by {CONNECTIVES}")
        if not any(w.values()):
            raise ValueError("at least one connective needs a positive weight")
        object.__setattr__(self, "weights", tuple(sorted(w.items())))

    @classmethod
    def with_weights(cls, weights: dict, **kw) -> "GenConfig":
        return cls(weights=tuple(sorted(weights.items())), **kw)

    @property
    def signature(self) -> Signature:
        return Signature(tuple("ABCD"[: self.n_concept_names]),
                         tuple("RS"[: self.n_roles]))


@dataclass(frozen=True)
class Instance:
    index: int
    concept: Concept
    ontology: Ontology

    @property
    def nnf(self) -> Concept:
        return canonicalize(nnf(self.concept))

    def to_json(self) -> dict:
        return {"index": self.index, "concept": print_concept(self.concept),
                "nnf": print_concept(self.nnf), "ontology": self.ontology.to_text()}


def _gen_concept(rng: random.Random, cfg: GenConfig, depth: int) -> Concept:
    sig = cfg.signature
    w = dict(cfg.weights)
    if depth == 0:
        return Name(rng.choice(sig.concept_names))
    kinds = [k for k in CONNECTIVES if w.get(k, 0) > 0]
    kind = rng.choices(kinds, [w[k] for k in kinds])[0]
    if kind == "atom":
        return Name(rng.choice(sig.concept_names))
    if kind == "not":
        return Not(_gen_concept(rng, cfg, depth - 1))
    if kind in ("and", "or"):
        op = And if kind == "and" else Or
        return op(_gen_concept(rng, cfg, depth - 1), _gen_concept(rng, cfg, depth - 1))
    op = Exists if kind == "some" else Forall
    return op(rng.choice(sig.role_names), _gen_concept(rng, cfg, depth - 1))


def generate(cfg: GenConfig) -> list[Instance]:
    """Seed-reproducible instances; each one draws from its own stream."""
    out = []
    sig = cfg.signature
    for i in range(cfg.count):
        rng = random.Random(f"{cfg.seed}:{i}")
        c = _gen_concept(rng, cfg, cfg.max_depth)
        axioms = tuple(
            GCI(_gen_concept(rng, cfg, rng.randint(0, cfg.max_depth)),
                _gen_concept(rng, cfg, rng.randint(0, cfg.max_depth)))
            for _ in range(rng.randint(0, cfg.n_axioms)))
        out.append(Instance(i, c, Ontology(sig, axioms)))
    return out


# -- budgets / results ---------------------------------------------------------

@dataclass(frozen=True)
class Budgets:
    secs: float = 10.0
    max_nodes: int = DEFAULT_MAX_NODES
    max_trees: int = DEFAULT_MAX_TREES
    max_objects: int = 10_000
    model_size: int = 3
    model_cap: int = 2 ** 20

    @classmethod
    def from_env(cls, **kw) -> "Budgets":
        if "ALC_BUDGET_SECS" in os.environ and "secs" not in kw:
            kw["secs"] = float(os.environ["ALC_BUDGET_SECS"])
        return cls(**kw)


@dataclass
class InstanceResult:
    index: int
    concept: str
    ontology: str
    tableau: str = "skipped"          # sat | unsat | skipped
    cat_syntactic: str = "skipped"    # unsat | open | skipped
    cat_guided: str = "skipped"
    model: str = "skipped"            # found | none | skipped
    model_size: Optional[int] = None
    model_valid: Optional[bool] = None
    certificate: str = "n/a"          # verified | rejected | n/a | skipped
    cert_steps: int = 0
    p1: Optional[bool] = None
    p2: Optional[bool] = None
    trees: int = 0
    nodes: int = 0
    objects: int = 0
    guided_objects: int = 0
    seconds: float = 0.0
    skipped: str = ""
    discrepancies: list = field(default_factory=list)


CSV_FIELDS = [f for f in InstanceResult.__dataclass_fields__ if f != "ontology"]


@dataclass
class DiffReport:
    results: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def discrepancies(self) -> list:
        return [(r.index, d) for r in self.results for d in r.discrepancies]

    @property
    def skipped(self) -> list:
        return [r.index for r in self.results if r.skipped]

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def summary(self) -> dict:
        rs = self.results
        count = lambda f, v: sum(1 for r in rs if getattr(r, f) == v)
        return {
            "instances": len(rs),
            "tableau_sat": count("tableau", "sat"),
            "tableau_unsat": count("tableau", "unsat"),
            "syntactic_unsat": count("cat_syntactic", "unsat"),
            "guided_unsat": count("cat_guided", "unsat"),
            "models_found": count("model", "found"),
            "certificates_verified": count("certificate", "verified"),
            "skipped": len(self.skipped),
            "discrepancies": len(self.discrepancies),
            "seconds": round(sum(r.seconds for r in rs), 3),
        }

    def to_json(self) -> dict:
        return {"config": self.config, "summary": self.summary(),
                "discrepancies": [{"index": i, "what": d} for i, d in self.discrepancies],
                "results": [asdict(r) for r in self.results]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore")
        w.writeheader()
        for r in self.results:
            row = asdict(r)
            row["discrepancies"] = "; ".join(r.discrepancies)
            w.writerow(row)
        return buf.getvalue()

    def to_text(self) -> str:
        s = self.summary()
        lines = ["differential run", "----------------"]
        lines += [f"{k:<24}{v}" for k, v in s.items()]
        lines.append("")
        lines.append(f"{'tableau':<10}{'syntactic':<11}{'guided':<9}{'model':<8}"
                     f"{'certificate':<13}count")
        combos: dict = {}
        for r in self.results:
            key = (r.tableau, r.cat_syntactic, r.cat_guided, r.model, r.certificate)
            combos[key] = combos.get(key, 0) + 1
        for key in sorted(combos):
            t, sy, g, m, c = key
            lines.append(f"{t:<10}{sy:<11}{g:<9}{m:<8}{c:<13}{combos[key]}")
        if self.discrepancies:
            lines.append("")
            lines.append("discrepancies:")
            lines += [f"  #{i}: {d}" for i, d in self.discrepancies]
        if self.skipped:
            lines.append("")
            lines.append("skipped: " + ", ".join(f"#{i}" for i in self.skipped))
        return "\n".join(lines) + "\n"


# -- the run -------------------------------------------------------------------

def _cat_verdict(c: Concept, o: Ontology, cfg: UniverseConfig) -> tuple[str, int]:
    cat = build_universe(c, o, cfg)
    saturate(cat)
    return ("unsat" if cat.has(canonicalize(nnf(c)), BOT) else "open"), len(cat.concepts)


def run_instance(inst: Instance, budgets: Budgets = Budgets()) -> InstanceResult:
    c, o = inst.concept, inst.ontology
    r = InstanceResult(inst.index, print_concept(c), o.to_text())
    start = time.monotonic()
    deadline = start + budgets.secs
    cert = None
    try:
        v = decide_sat(c, o, max_nodes=budgets.max_nodes, max_trees=budgets.max_trees,
                       deadline=deadline)
        r.tableau = "sat" if v.satisfiable else "unsat"
        r.p1, r.p2 = check_p1(v.meta_tree), check_p2(v.meta_tree)
        r.trees, r.nodes = v.tree_count, v.node_count
        if not v.satisfiable:
            try:
                cert = extract_certificate(v.meta_tree, c, o)
                res = check_certificate(cert, c, o)
                r.certificate = "verified" if res else "rejected"
                r.cert_steps = len(cert.steps)
            except Exception as e:  # extraction failure is a finding, not a crash
                r.certificate = "rejected"
                r.discrepancies.append(f"certificate extraction failed: {e!r}")
        ucfg = UniverseConfig(max_objects=budgets.max_objects, deadline=deadline)
        r.cat_syntactic, r.objects = _cat_verdict(c, o, ucfg)
        if cert is not None and cert.steps:
            gcfg = UniverseConfig(tuple(cert.concepts()), max_objects=budgets.max_objects,
                                  deadline=deadline)
            r.cat_guided, r.guided_objects = _cat_verdict(c, o, gcfg)
        else:
            r.cat_guided, r.guided_objects = r.cat_syntactic, r.objects
    except BudgetExceeded as e:
        r.skipped = str(e)
    try:
        m = find_model(c, o, budgets.model_size, cap=budgets.model_cap,
                       deadline=time.monotonic() + budgets.secs)
        if m is None:
            r.model = "none"
        else:
            r.model, r.model_size = "found", m.domain_size
            r.model_valid = satisfies(o, m) and bool(eval_concept(c, m))
    except BudgetExceeded:
        r.model = "skipped"
    r.seconds = round(time.monotonic() - start, 4)
    _judge(r)
    return r


def _judge(r: InstanceResult) -> None:
    d = r.discrepancies
    if r.model == "found":
        if not r.model_valid:
            d.append("model finder returned an invalid witness")
        for name, verdict in (("tableau", r.tableau), ("syntactic category", r.cat_syntactic),
                              ("guided category", r.cat_guided)):
            if verdict == "unsat":
                d.append(f"{name} refutes a concept with a model")
    if r.skipped:
        return
    if r.tableau == "unsat":
        if r.certificate != "verified":
            d.append("tableau unsat but no verified certificate")
        if r.cat_guided != "unsat":
            d.append("tableau unsat but guided category does not derive c0 -> bot")
    if r.tableau == "sat":
        for name, verdict in (("syntactic", r.cat_syntactic), ("guided", r.cat_guided)):
            if verdict == "unsat":
                d.append(f"{name} category derives c0 -> bot for a satisfiable concept")
    if r.p1 is False:
        d.append("clash at an inner completion-tree node")
    if r.p2 is False:
        d.append("split order violates ancestor-first branching")


def run_diff(corpus, budgets: Budgets = Budgets(), progress=None) -> DiffReport:
    rep = DiffReport(config={"budgets": asdict(budgets)})
    for inst in corpus:
        rep.results.append(run_instance(inst, budgets))
        if progress is not None:
            progress(rep.results[-1])
    return rep


# -- arrow soundness sampling -----------------------------------------------------

@dataclass
class ArrowSample:
    index: int
    src: str
    dst: str
    entailed: Optional[bool]  # None when the tableau ran out of budget


def sample_arrows(corpus, n: int = 1000, seed: int = 0, budgets: Budgets = Budgets(),
                  guided: bool = True) -> list[ArrowSample]:
    """Check ``x ⊓ ¬y`` unsatisfiable for ``n`` saturated concept arrows x → y.

    Arrows from ⊥, into ⊤ and identities are left out; every remaining arrow
    of every instance's category is equally likely to be drawn.
    """
    pool = []
    for inst in corpus:
        c, o = inst.concept, inst.ontology
        extra = ()
        if guided:
            try:
                v = decide_sat(c, o, deadline=time.monotonic() + budgets.secs)
                if not v.satisfiable:
                    extra = tuple(extract_certificate(v.meta_tree, c, o).concepts())
            except BudgetExceeded:
                pass
        cat = build_universe(c, o, UniverseConfig(extra, max_objects=budgets.max_objects))
        saturate(cat)
        for a, b in sorted(cat.arrow_pairs()):
            x, y = cat.concepts[a], cat.concepts[b]
            if x == BOT or y == TOP:
                continue
            pool.append((inst.index, o, x, y))
    rng = random.Random(seed)
    picks = rng.sample(pool, min(n, len(pool)))
    out = []
    for idx, o, x, y in picks:
        try:
            v = decide_sat(And(x, Not(y)), o, deadline=time.monotonic() + budgets.secs)
            ok = not v.satisfiable
        except BudgetExceeded:
            ok = None
        out.append(ArrowSample(idx, print_concept(x), print_concept(y), ok))
    return out


def write_report(rep: DiffReport, outdir: str, figures: bool = True) -> list[str]:
    """JSON, CSV and text summary (plus PNG figures) into ``outdir``."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name, text in (("report.json", json.dumps(rep.to_json(), indent=1)),
                       ("report.csv", rep.to_csv()),
                       ("summary.txt", rep.to_text())):
        p = os.path.join(outdir, name)
        with open(p, "w") as f:
            f.write(text)
        paths.append(p)
    if figures:
        from .plotting import render_figures
        paths += render_figures(rep, outdir)
    return paths
