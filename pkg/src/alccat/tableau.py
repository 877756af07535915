"""Completion-tree tableau for ALC concept satisfiability w.r.t. a TBox.

The ⊔-rule copies the whole completion tree into two children of a *meta
tree*, so every branch is kept for certificate extraction.  Rules fire in the
fixed order ⊑, ⊓, ∀, ⊔, ∃; each rule goes to the shallowest (then oldest)
node where it applies, and the ∃-rule is withheld at nodes whose label equals
the label of a strict ancestor (equality blocking).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .semantics import BudgetExceeded
from .syntax import (
    BOT, And, Concept, Exists, Forall, Name, Not, Ontology, Or,
    axiom_object, canonicalize, nnf, print_concept, sub_closure,
)

RULE_ORDER = ("subsume", "and", "forall", "or", "exists")
DEFAULT_MAX_NODES = 2 ** 16
DEFAULT_MAX_TREES = 2 ** 16


@dataclass
class Node:
    id: int
    parent: Optional[int]
    role: Optional[str]
    depth: int
    # concept -> (rule that added it, what triggered it)
    label: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    # concept -> ids of the splits whose choices it relies on
    deps: dict = field(default_factory=dict)
    edge_deps: frozenset = frozenset()

    def copy(self) -> "Node":
        return Node(self.id, self.parent, self.role, self.depth, dict(self.label),
                    list(self.children), dict(self.deps), self.edge_deps)


@dataclass(frozen=True)
class Clash:
    node: int
    kind: str  # "bot" or "complement"
    name: Optional[str] = None


@dataclass(frozen=True)
class TraceEntry:
    tree: int
    rule: str
    node: int
    added: tuple

    def __str__(self) -> str:
        added = " ".join(print_concept(c) for c in self.added)
        return f"tree={self.tree} rule={self.rule} node={self.node} added={added}"


_AGENDA_RULES = ("subsume", "and", "forall", "or", "exists")


@dataclass
class CompletionTree:
    nodes: list
    clash: Optional[Clash] = None
    # rule applications made in this tree itself (not inherited from the parent)
    trace: list = field(default_factory=list)
    # rule -> ids of nodes where the rule may still apply; a node outside the
    # set certainly has no instance of that rule
    agenda: Optional[dict] = field(default=None, repr=False)
    # nodes are shared with the parent tree until written (copy on write)
    owned: Optional[set] = field(default=None, repr=False)

    def __post_init__(self):
        ids = {n.id for n in self.nodes}
        if self.agenda is None:
            self.agenda = {r: set(ids) for r in _AGENDA_RULES}
        if self.owned is None:
            self.owned = ids

    def copy(self) -> "CompletionTree":
        return CompletionTree(list(self.nodes), self.clash, [],
                              {r: set(v) for r, v in self.agenda.items()}, set())

    def mut(self, nid: int) -> Node:
        """The node ``nid``, made private to this tree."""
        if nid not in self.owned:
            self.nodes[nid] = self.nodes[nid].copy()
            self.owned.add(nid)
        return self.nodes[nid]

    def touched(self, nid: int) -> None:
        for r in ("and", "forall", "or", "exists"):
            self.agenda[r].add(nid)

    def add_node(self, node: Node) -> None:
        self.nodes.append(node)
        self.owned.add(node.id)
        for r in _AGENDA_RULES:
            self.agenda[r].add(node.id)
        self.mut(node.parent).children.append(node.id)
        self.agenda["forall"].add(node.parent)

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def ancestors(self, nid: int) -> Iterator[Node]:
        p = self.nodes[nid].parent
        while p is not None:
            yield self.nodes[p]
            p = self.nodes[p].parent

    def is_ancestor(self, a: int, b: int) -> bool:
        """Whether ``a`` is a strict ancestor of ``b``."""
        return any(n.id == a for n in self.ancestors(b))

    def blocked(self, nid: int) -> Optional[int]:
        lab = self.nodes[nid].label.keys()
        for anc in self.ancestors(nid):
            if anc.label.keys() == lab:
                return anc.id
        return None

    def hypotheses(self, nid: int) -> list:
        """Label members not derivable inside the node's own label."""
        return [c for c, (rule, _) in self.nodes[nid].label.items()
                if rule in ("init", "exists", "forall", "or")]

    def to_json(self) -> dict:
        return {
            "clash": None if self.clash is None else {
                "node": self.clash.node, "kind": self.clash.kind, "name": self.clash.name},
            "nodes": [
                {"id": n.id, "parent": n.parent, "role": n.role,
                 "label": [print_concept(c) for c in n.label],
                 "blocked_by": self.blocked(n.id)}
                for n in self.nodes
            ],
        }


@dataclass(frozen=True)
class Split:
    node: int
    disjunction: Concept
    left: Concept
    right: Concept


@dataclass
class MetaNode:
    id: int
    tree: CompletionTree
    parent: Optional[int] = None
    children: tuple = ()
    split: Optional[Split] = None
    # "open", "clashed", "complete", "split" or "pruned"
    status: str = "open"
    # splits the refutation of this subtree relies on (None until refuted)
    deps: Optional[frozenset] = None


@dataclass
class MetaTree:
    c0: Concept
    ontology: Ontology
    axiom_objects: tuple
    closure: frozenset
    nodes: list
    open_leaves: list
    rule_order: tuple = RULE_ORDER
    steps: int = 0
    trace: list = field(default_factory=list)

    @property
    def root(self) -> MetaNode:
        return self.nodes[0]

    def leaves(self) -> list:
        return [m for m in self.nodes if not m.children]

    def path(self, mid: int) -> list:
        out = []
        while mid is not None:
            out.append(self.nodes[mid])
            mid = self.nodes[mid].parent
        return out[::-1]

    def to_json(self) -> dict:
        return {
            "concept": print_concept(self.c0),
            "rule_order": list(self.rule_order),
            "trees": [
                {"id": m.id, "parent": m.parent, "children": list(m.children),
                 "status": m.status,
                 "split": None if m.split is None else {
                     "node": m.split.node,
                     "disjunction": print_concept(m.split.disjunction)},
                 **m.tree.to_json()}
                for m in self.nodes
            ],
        }


@dataclass
class TableauVerdict:
    satisfiable: bool
    meta_tree: MetaTree
    witness_tree: Optional[CompletionTree] = None

    @property
    def tree_count(self) -> int:
        return len(self.meta_tree.nodes)

    @property
    def node_count(self) -> int:
        return max(len(m.tree.nodes) for m in self.meta_tree.nodes)


_NO_DEPS = frozenset()


def _clash_deps(node: Node, clash: Clash) -> frozenset:
    if clash.kind == "bot":
        return node.deps.get(BOT, _NO_DEPS)
    a = Name(clash.name)
    return node.deps.get(a, _NO_DEPS) | node.deps.get(Not(a), _NO_DEPS)


def _clash_at(label: dict, nid: int) -> Optional[Clash]:
    if BOT in label:
        return Clash(nid, "bot")
    for c in label:
        if isinstance(c, Not) and isinstance(c.arg, Name) and c.arg in label:
            return Clash(nid, "complement", c.arg.id)
    return None


def init_tableau(c0: Concept, o: Ontology) -> MetaTree:
    c = canonicalize(nnf(c0))
    root = Node(0, None, None, 0, {c: ("init", None)})
    tree = CompletionTree([root], _clash_at(root.label, 0))
    meta = MetaNode(0, tree)
    if tree.clash is not None:
        meta.status = "clashed"
        meta.deps = _NO_DEPS
    axioms = tuple(dict.fromkeys(axiom_object(ax) for ax in o.axioms))
    return MetaTree(c, o, axioms, frozenset(sub_closure(c0, o)), [meta],
                    [] if tree.clash else [0])


class _Engine:
    def __init__(self, mt: MetaTree, max_nodes: int, max_trees: int, deadline,
                 prune: bool = True):
        self.mt = mt
        self.prune = prune
        self.max_nodes = max_nodes
        self.max_trees = max_trees
        self.deadline = deadline

    def _find(self, tree: CompletionTree):
        """First rule (in order) with an instance; shallowest, then oldest node."""
        nodes = tree.nodes
        key = lambda i: (nodes[i].depth, i)
        for rule in RULE_ORDER[:-1]:
            cands = tree.agenda[rule]
            finder = getattr(self, "_" + rule)
            while cands:
                nid = min(cands, key=key)
                hit = finder(tree, nodes[nid])
                if hit is not None:
                    return rule, nodes[nid], hit
                cands.discard(nid)
        cands = tree.agenda["exists"]
        for nid in sorted(cands, key=key):
            hit = self._open_exists(tree, nodes[nid])
            if hit is None:
                cands.discard(nid)
            elif tree.blocked(nid) is None:
                return "exists", nodes[nid], hit
        return None

    # each finder returns the rule instance or None
    def _subsume(self, tree, node):
        for ax in self.mt.axiom_objects:
            if ax not in node.label:
                return ax
        return None

    def _and(self, tree, node):
        for c in node.label:
            if isinstance(c, And) and (c.left not in node.label or c.right not in node.label):
                return c
        return None

    def _forall(self, tree, node):
        for c in node.label:
            if isinstance(c, Forall):
                for cid in node.children:
                    child = tree.nodes[cid]
                    if child.role == c.role and c.filler not in child.label:
                        return c, cid
        return None

    def _or(self, tree, node):
        for c in node.label:
            if isinstance(c, Or) and c.left not in node.label and c.right not in node.label:
                return c
        return None

    def _open_exists(self, tree, node):
        for c in node.label:
            if isinstance(c, Exists) and not any(
                tree.nodes[cid].role == c.role and c.filler in tree.nodes[cid].label
                for cid in node.children
            ):
                return c
        return None

    def _exists(self, tree, node):
        todo = self._open_exists(tree, node)
        if todo is None or tree.blocked(node.id) is not None:
            return None
        return todo

    def step(self) -> None:
        mt = self.mt
        mid = mt.open_leaves[0]
        meta = mt.nodes[mid]
        tree = meta.tree
        found = self._find(tree)
        mt.steps += 1
        if found is None:
            meta.status = "complete"
            mt.open_leaves.pop(0)
            return
        rule, node, hit = found
        if rule == "or":
            self._split(meta, node, hit)
            return
        touched = node = tree.mut(node.id)
        if rule == "subsume":
            node.label[hit] = ("axiom", hit)
            added = (hit,)
        elif rule == "and":
            added = tuple(x for x in (hit.left, hit.right) if x not in node.label)
            for x in added:
                node.label[x] = ("and", hit)
                node.deps[x] = node.deps.get(hit, _NO_DEPS)
        elif rule == "forall":
            c, cid = hit
            touched = tree.mut(cid)
            touched.label[c.filler] = ("forall", c)
            touched.deps[c.filler] = node.deps.get(c, _NO_DEPS) | touched.edge_deps
            added = (c.filler,)
        else:
            if len(tree.nodes) >= self.max_nodes:
                raise BudgetExceeded(f"completion tree exceeded {self.max_nodes} nodes")
            edge = node.deps.get(hit, _NO_DEPS)
            touched = Node(len(tree.nodes), node.id, hit.role, node.depth + 1,
                           {hit.filler: ("exists", hit)}, deps={hit.filler: edge},
                           edge_deps=edge)
            tree.add_node(touched)
            added = (hit.filler,)
        if rule != "exists":
            tree.touched(touched.id)
        entry = TraceEntry(mid, rule, touched.id, added)
        tree.trace.append(entry)
        mt.trace.append(entry)
        clash = _clash_at(touched.label, touched.id)
        if clash is not None:
            tree.clash = clash
            meta.status = "clashed"
            meta.deps = _clash_deps(touched, clash)
            mt.open_leaves.pop(0)
            self._bubble(meta)

    def _bubble(self, meta: MetaNode) -> None:
        """Pass a finished refutation up the meta tree.

        A right sibling is left unexpanded (pruned) when the left refutation
        never used the left disjunct; it would be refuted the same way.
        """
        mt = self.mt
        while meta.parent is not None:
            parent = mt.nodes[meta.parent]
            if parent.deps is not None:
                return
            left, right = (mt.nodes[k] for k in parent.children)
            if left.deps is None:
                return
            if self.prune and parent.id not in left.deps:
                deps = left.deps
                if right.deps is None:
                    self._cut(right)
            elif right.deps is None:
                return
            elif self.prune and parent.id not in right.deps:
                deps = right.deps
            else:
                deps = (left.deps | right.deps) - {parent.id}
            parent.deps = deps
            meta = parent

    def _cut(self, meta: MetaNode) -> None:
        assert meta.status == "open" and not meta.children
        meta.status = "pruned"
        self.mt.open_leaves.remove(meta.id)

    def _split(self, meta: MetaNode, node: Node, disj: Or) -> None:
        mt = self.mt
        if len(mt.nodes) + 2 > self.max_trees:
            raise BudgetExceeded(f"meta tree exceeded {self.max_trees} completion trees")
        meta.split = Split(node.id, disj, disj.left, disj.right)
        meta.status = "split"
        kids = []
        for chosen in (disj.left, disj.right):
            t = meta.tree.copy()
            x = t.mut(node.id)
            x.label[chosen] = ("or", disj)
            x.deps[chosen] = x.deps.get(disj, _NO_DEPS) | {meta.id}
            t.touched(node.id)
            kid = MetaNode(len(mt.nodes), t, meta.id)
            entry = TraceEntry(kid.id, "or", node.id, (chosen,))
            t.trace.append(entry)
            mt.trace.append(entry)
            t.clash = _clash_at(x.label, node.id)
            if t.clash is not None:
                kid.status = "clashed"
                kid.deps = _clash_deps(x, t.clash)
            mt.nodes.append(kid)
            kids.append(kid)
        meta.children = tuple(k.id for k in kids)
        mt.open_leaves[0:1] = [k.id for k in kids if k.status == "open"]
        done = [k for k in kids if k.deps is not None]
        if done:
            self._bubble(done[0])

    def run(self, exhaustive: bool) -> Optional[MetaNode]:
        mt = self.mt
        while mt.open_leaves:
            if self.deadline is not None and mt.steps % 64 == 0 and time.monotonic() > self.deadline:
                raise BudgetExceeded("tableau ran out of time")
            mid = mt.open_leaves[0]
            self.step()
            m = mt.nodes[mid]
            if m.status == "complete" and not exhaustive:
                return m
        done = [m for m in mt.nodes if m.status == "complete"]
        return done[0] if done else None


def step(mt: MetaTree, max_nodes: int = DEFAULT_MAX_NODES,
         max_trees: int = DEFAULT_MAX_TREES, prune: bool = True) -> MetaTree:
    """Apply one rule instance in the leftmost open leaf tree (in place)."""
    if not mt.open_leaves:
        raise ValueError("meta tree has no open leaf")
    _Engine(mt, max_nodes, max_trees, None, prune).step()
    return mt


def run_to_completion(mt: MetaTree, *, exhaustive: bool = True, prune: bool = True,
                      max_nodes: int = DEFAULT_MAX_NODES,
                      max_trees: int = DEFAULT_MAX_TREES,
                      deadline: float | None = None) -> TableauVerdict:
    """Expand until every leaf is final (or, if not ``exhaustive``, until the
    first complete clash-free leaf is found).

    With ``prune`` a right branch is skipped when the left branch was refuted
    without using its disjunct; ``prune=False`` expands every branch.
    """
    found = _Engine(mt, max_nodes, max_trees, deadline, prune).run(exhaustive)
    return TableauVerdict(found is not None, mt, found.tree if found else None)


def decide_sat(c0: Concept, o: Ontology, *, exhaustive: bool = False, prune: bool = True,
               max_nodes: int = DEFAULT_MAX_NODES, max_trees: int = DEFAULT_MAX_TREES,
               deadline: float | None = None) -> TableauVerdict:
    return run_to_completion(init_tableau(c0, o), exhaustive=exhaustive, prune=prune,
                             max_nodes=max_nodes, max_trees=max_trees, deadline=deadline)


def entails(o: Ontology, x: Concept, y: Concept, **kw) -> bool:
    return not decide_sat(And(x, Not(y)), o, **kw).satisfiable


# -- calculus properties ------------------------------------------------------

def check_p1(mt: MetaTree) -> bool:
    """Every clash sits at a leaf of its completion tree."""
    return all(not m.tree.nodes[m.tree.clash.node].children
               for m in mt.nodes if m.tree.clash is not None)


def check_p2(mt: MetaTree) -> bool:
    """Along each meta path no split happens at a strict ancestor of an earlier
    split node (ancestor disjunction nodes branch first)."""
    for leaf in mt.leaves():
        path = mt.path(leaf.id)
        tree = leaf.tree
        splits = [m.split.node for m in path if m.split is not None]
        for i, a in enumerate(splits):
            for b in splits[i + 1:]:
                if tree.is_ancestor(b, a):
                    return False
    return True


def check_labels(mt: MetaTree) -> bool:
    """Labels stay inside the closure and only grow along meta paths."""
    for m in mt.nodes:
        for n in m.tree.nodes:
            if not set(n.label) <= mt.closure:
                return False
        if m.parent is not None:
            parent = mt.nodes[m.parent].tree
            for n in parent.nodes:
                if not set(n.label) <= set(m.tree.nodes[n.id].label):
                    return False
    return True


def count_splits(mt: MetaTree) -> int:
    return sum(1 for m in mt.nodes if m.split is not None)
