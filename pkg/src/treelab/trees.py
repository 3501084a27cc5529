"""Rooted unordered trees with named nodes.

Parsing and printing of tree literals, structural validation, canonical
codes (the single isomorphism authority), exhaustive enumeration of all
non-isomorphic rooted unordered trees of a given size, disjoint unions,
and DOT export.

All types are immutable after construction; operations return new objects.
Children are unordered everywhere: algorithms never depend on sibling order
or on node display names, only on structure (and labels, when present).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import BudgetError, InvalidTreeError, ParseError, TreeError

NAME_PATTERN = re.compile(r"[A-Za-z0-9_]+")

#: Largest size `enumerate_trees` accepts unless the caller raises the cap.
ENUM_CAP_DEFAULT = 14


def node_str(v) -> str:
    """Human-readable form of a node id (handles origin-tagged tuples)."""
    if isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], int):
        return f"{v[0]}:{v[1]}"
    return str(v)


@dataclass(frozen=True)
class StructureViolation:
    """One violated tree invariant, as reported by `validate`."""

    kind: str
    subject: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return self.message

    def to_json(self) -> dict:
        return {"kind": self.kind, "subject": list(self.subject), "reason": self.message}


def structure_violations(nodes, arcs, root=None, check_names: bool = False) -> list[StructureViolation]:
    """Check the rooted-tree invariants on raw node/arc data.

    Reports every violation instead of stopping at the first: multi-parent
    nodes, extra or missing roots, self-loops, dangling arcs, unreachable
    nodes (which covers cycles).  With `root=None` the root is inferred as
    the unique in-degree-0 node, if any.
    """
    out = []
    nodes = set(nodes)
    arcs = {(a, b) for (a, b) in arcs}

    if check_names:
        for v in sorted(nodes, key=node_str):
            if not (isinstance(v, str) and NAME_PATTERN.fullmatch(v)):
                out.append(StructureViolation(
                    "bad_name", (node_str(v),),
                    f"node name {node_str(v)!r} is not of the form [A-Za-z0-9_]+"))

    usable = set()
    for a, b in sorted(arcs, key=lambda p: (node_str(p[0]), node_str(p[1]))):
        if a == b:
            out.append(StructureViolation(
                "self_loop", (node_str(a),), f"arc {node_str(a)}->{node_str(a)} is a self-loop"))
        elif a not in nodes or b not in nodes:
            out.append(StructureViolation(
                "dangling_arc", (node_str(a), node_str(b)),
                f"arc {node_str(a)}->{node_str(b)} has an endpoint outside the node set"))
        else:
            usable.add((a, b))

    indeg = {v: 0 for v in nodes}
    succ = {v: [] for v in nodes}
    for a, b in usable:
        indeg[b] += 1
        succ[a].append(b)

    zero = sorted((v for v in nodes if indeg[v] == 0), key=node_str)
    if root is not None:
        if root not in nodes:
            out.append(StructureViolation(
                "root_missing", (node_str(root),), f"declared root {node_str(root)} is not a node"))
        elif indeg[root] > 0:
            out.append(StructureViolation(
                "root_has_parent", (node_str(root),),
                f"declared root {node_str(root)} has in-degree {indeg[root]}"))
        for v in zero:
            if v != root:
                out.append(StructureViolation(
                    "extra_root", (node_str(v),),
                    f"node {node_str(v)} has in-degree 0 but is not the root"))
    elif nodes:
        if not zero:
            out.append(StructureViolation(
                "no_root", (), "every node has a parent (the graph contains a cycle)"))
        elif len(zero) > 1:
            out.append(StructureViolation(
                "multi_root", tuple(node_str(v) for v in zero),
                f"{len(zero)} nodes have in-degree 0: {', '.join(node_str(v) for v in zero)}"))

    for v in sorted(nodes, key=node_str):
        if indeg[v] >= 2:
            out.append(StructureViolation(
                "multi_parent", (node_str(v),),
                f"node {node_str(v)} has in-degree {indeg[v]}"))

    start = None
    if root is not None and root in nodes:
        start = root
    elif len(zero) == 1:
        start = zero[0]
    if start is not None:
        seen = {start}
        stack = [start]
        while stack:
            for w in succ[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        missing = sorted((v for v in nodes if v not in seen), key=node_str)
        if missing:
            out.append(StructureViolation(
                "unreachable", tuple(node_str(v) for v in missing),
                f"nodes not reachable from the root: {', '.join(node_str(v) for v in missing)}"))
    return out


class Tree:
    """Immutable rooted unordered tree.

    `nodes` is a set of unique display names, `arcs` point from parent to
    child, and `root` is the unique in-degree-0 node (``None`` only for the
    empty tree).  Optional `labels` and `region_tags` map node names to
    strings; labels take part in isomorphism, region tags are provenance
    annotations only.
    """

    __slots__ = ("root", "labels", "region_tags", "_nodes", "_arcs", "_children",
                 "_parent", "_preorder", "_tin", "_tout", "_depth", "_code",
                 "_desc_cache")

    def __init__(self, nodes: Iterable[str], arcs: Iterable[tuple[str, str]],
                 root: str | None = None, labels: Mapping[str, str] | None = None,
                 region_tags: Mapping[str, str] | None = None):
        node_set = frozenset(nodes)
        arc_set = frozenset((a, b) for (a, b) in arcs)
        if root is None and node_set:
            raise InvalidTreeError([StructureViolation(
                "root_missing", (), "non-empty tree needs a root")])
        violations = structure_violations(node_set, arc_set, root, check_names=True)
        if violations:
            raise InvalidTreeError(violations)
        for name, extra in (("label", labels), ("region tag", region_tags)):
            for v in (extra or {}):
                if v not in node_set:
                    raise TreeError(f"{name} given for unknown node {v!r}")

        self.root = root
        self.labels = dict(labels or {})
        self.region_tags = dict(region_tags or {})
        self._nodes = node_set
        self._arcs = arc_set
        self._code: str | None = None
        self._desc_cache: dict[str, tuple[str, ...]] = {}

        kids: dict[str, list[str]] = {v: [] for v in node_set}
        parent: dict[str, str] = {}
        for a, b in arc_set:
            kids[a].append(b)
            parent[b] = a
        self._children = {v: tuple(sorted(c)) for v, c in kids.items()}
        self._parent = parent

        order: list[str] = []
        tin: dict[str, int] = {}
        depth: dict[str, int] = {}
        if root is not None:
            stack = [root]
            depth[root] = 0
            while stack:
                v = stack.pop()
                tin[v] = len(order)
                order.append(v)
                for c in reversed(self._children[v]):
                    depth[c] = depth[v] + 1
                    stack.append(c)
        self._preorder = tuple(order)
        self._tin = tin
        self._depth = depth
        # tout[v] = tin[v] + subtree size, so descendant tests are O(1)
        size = {v: 1 for v in node_set}
        for v in reversed(order):
            p = parent.get(v)
            if p is not None:
                size[p] += size[v]
        self._tout = {v: tin[v] + size[v] for v in order}

    # -- basic accessors ---------------------------------------------------

    @property
    def nodes(self) -> frozenset[str]:
        return self._nodes

    @property
    def arcs(self) -> frozenset[tuple[str, str]]:
        return self._arcs

    @property
    def size(self) -> int:
        return len(self._nodes)

    @property
    def preorder(self) -> tuple[str, ...]:
        """Nodes in root-first order, children visited in sorted-name order."""
        return self._preorder

    def _known(self, v: str) -> None:
        if v not in self._nodes:
            raise TreeError(f"unknown node {v!r}")

    def children(self, v: str) -> tuple[str, ...]:
        self._known(v)
        return self._children[v]

    def parent(self, v: str) -> str | None:
        self._known(v)
        return self._parent.get(v)

    def depth(self, v: str) -> int:
        self._known(v)
        return self._depth[v]

    @property
    def height(self) -> int:
        """Arc count of the longest root-to-leaf path (0 for a single node)."""
        return max(self._depth.values(), default=0)

    @property
    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v in sorted(self._nodes) if not self._children[v])

    # -- reachability ------------------------------------------------------

    def reaches(self, a: str, b: str) -> bool:
        """True iff a directed path a ⇝ b exists (the trivial a ⇝ a counts)."""
        self._known(a)
        self._known(b)
        return self._tin[a] <= self._tin[b] < self._tout[a]

    def path(self, a: str, b: str) -> tuple[str, ...]:
        """The unique path a ⇝ b as a node sequence; error when none exists."""
        if not self.reaches(a, b):
            raise TreeError(f"no path {a} ~> {b}")
        back = [b]
        while back[-1] != a:
            back.append(self._parent[back[-1]])
        return tuple(reversed(back))

    def strict_descendants(self, v: str) -> tuple[str, ...]:
        """Proper descendants of v, sorted by name."""
        self._known(v)
        cached = self._desc_cache.get(v)
        if cached is None:
            cached = tuple(sorted(u for u in self._nodes
                                  if u != v and self.reaches(v, u)))
            self._desc_cache[v] = cached
        return cached

    # -- derived trees -----------------------------------------------------

    def relabel(self, mapping: Mapping[str, str]) -> "Tree":
        """Rename every node through an injective total mapping."""
        missing = self._nodes - set(mapping)
        if missing:
            raise TreeError(f"relabel mapping misses nodes: {sorted(missing)}")
        if len(set(mapping[v] for v in self._nodes)) != len(self._nodes):
            raise TreeError("relabel mapping is not injective")
        return Tree(
            (mapping[v] for v in self._nodes),
            ((mapping[a], mapping[b]) for a, b in self._arcs),
            mapping[self.root] if self.root is not None else None,
            {mapping[v]: s for v, s in self.labels.items()},
            {mapping[v]: s for v, s in self.region_tags.items()},
        )

    def with_region_tags(self, tags: Mapping[str, str]) -> "Tree":
        return Tree(self._nodes, self._arcs, self.root, self.labels, tags)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        """Node-for-node identity (names, arcs, root, labels); not isomorphism."""
        if not isinstance(other, Tree):
            return NotImplemented
        return (self._nodes == other._nodes and self._arcs == other._arcs
                and self.root == other.root and self.labels == other.labels)

    def __hash__(self) -> int:
        return hash((self._nodes, self._arcs, self.root,
                     tuple(sorted(self.labels.items()))))

    def __repr__(self) -> str:
        return f"Tree({format_tree(self)!r})" if self._nodes else "Tree(<empty>)"


@dataclass(frozen=True)
class Digraph:
    """Plain directed graph with set semantics and no tree constraints.

    Used for disjoint sums, quotients, and reduction outputs.  Node ids may
    be any hashable values (origin-tagged tuples, quotient classes, ...).
    """

    nodes: frozenset
    arcs: frozenset

    def __post_init__(self):
        for a, b in self.arcs:
            if a not in self.nodes or b not in self.nodes:
                raise TreeError(
                    f"arc {node_str(a)}->{node_str(b)} has an endpoint outside the node set")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def successors(self) -> dict:
        succ = {v: [] for v in self.nodes}
        for a, b in self.arcs:
            succ[a].append(b)
        return succ


def tree_from_arcs(root: str, arcs: Iterable[tuple[str, str]],
                   labels: Mapping[str, str] | None = None,
                   region_tags: Mapping[str, str] | None = None) -> Tree:
    """Build a tree from its root and arc list (nodes inferred)."""
    arcs = list(arcs)
    nodes = {root}
    for a, b in arcs:
        nodes.add(a)
        nodes.add(b)
    return Tree(nodes, arcs, root, labels, region_tags)


def validate(g) -> list[StructureViolation]:
    """Report every violated rooted-tree invariant of a Tree or Digraph.

    The empty list means the object is a valid rooted tree.  For digraphs
    the root is inferred (unique in-degree-0 node); `Tree` instances always
    pass because their constructor enforces the same checks.
    """
    root = getattr(g, "root", None)
    return structure_violations(g.nodes, g.arcs, root)


# -- literals ---------------------------------------------------------------

class _Parser:
    """Recursive-descent parser for the tree-literal grammar.

    tree     := node
    node     := NAME label? children?
    label    := ':' NAME
    children := '(' node (',' node)* ')'
    NAME     := [A-Za-z0-9_]+

    Whitespace is insignificant between tokens.  Duplicate names within one
    literal are an error.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def fail(self, message: str):
        raise ParseError(message, self.pos)

    def name(self) -> str:
        self.skip_ws()
        m = NAME_PATTERN.match(self.text, self.pos)
        if not m:
            self.fail("expected a name ([A-Za-z0-9_]+)")
        self.pos = m.end()
        return m.group()

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def node(self, out_arcs, out_labels, seen) -> str:
        start = self.pos
        name = self.name()
        if name in seen:
            self.pos = start
            self.fail(f"duplicate node name {name!r}")
        seen.add(name)
        if self.peek() == ":":
            self.pos += 1
            out_labels[name] = self.name()
        if self.peek() == "(":
            self.pos += 1
            while True:
                child = self.node(out_arcs, out_labels, seen)
                out_arcs.append((name, child))
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                    continue
                if ch == ")":
                    self.pos += 1
                    break
                self.fail("expected ',' or ')'")
        return name


def parse_tree(text: str) -> Tree:
    """Parse a tree literal like ``a(b:x(c),d)`` into a validated Tree."""
    parser = _Parser(text)
    arcs: list[tuple[str, str]] = []
    labels: dict[str, str] = {}
    seen: set[str] = set()
    root = parser.node(arcs, labels, seen)
    parser.skip_ws()
    if parser.pos != len(text):
        parser.fail("unexpected trailing input")
    return Tree(seen, arcs, root, labels)


def format_tree(t: Tree) -> str:
    """Serialize a tree to a literal; inverse of `parse_tree`.

    Children are printed in sorted-name order so output is deterministic.
    Region tags are presentation metadata and are not serialized.
    """
    if t.root is None:
        raise TreeError("the empty tree has no literal form")

    def fmt(v: str) -> str:
        s = v
        if v in t.labels:
            s += ":" + t.labels[v]
        kids = t.children(v)
        if kids:
            s += "(" + ",".join(fmt(c) for c in kids) + ")"
        return s

    return fmt(t.root)


# -- isomorphism ------------------------------------------------------------

def canonical_code(t: Tree) -> str:
    """Order-invariant code: equal codes iff trees are isomorphic.

    Leaves become ``()``, internal nodes concatenate their children's codes
    in sorted order; a node's label, when present, is prepended inside its
    parentheses.  Node names never enter the code.
    """
    if t._code is not None:
        return t._code
    if t.root is None:
        t._code = ""
        return ""

    def code(v: str) -> str:
        kids = sorted(code(c) for c in t.children(v))
        return "(" + t.labels.get(v, "") + "".join(kids) + ")"

    t._code = code(t.root)
    return t._code


def are_isomorphic(t1: Tree, t2: Tree) -> bool:
    """Isomorphism of rooted unordered (label-respecting) trees."""
    return canonical_code(t1) == canonical_code(t2)


# -- enumeration ------------------------------------------------------------

def _level_sequences(n: int) -> Iterator[tuple[int, ...]]:
    """Yield the canonical level sequence of every rooted tree on n nodes.

    Successor generation over level sequences: start from the path
    ``1,2,...,n`` and repeatedly rewind the rightmost entry above 2, copying
    the segment from its parent onward.  Each isomorphism class appears
    exactly once.
    """
    seq = list(range(1, n + 1))
    while True:
        yield tuple(seq)
        p = None
        for i in range(n - 1, -1, -1):
            if seq[i] > 2:
                p = i
                break
        if p is None:
            return
        q = p - 1
        while seq[q] != seq[p] - 1:
            q -= 1
        width = p - q
        for i in range(p, n):
            seq[i] = seq[i - width]


def _tree_from_levels(levels: tuple[int, ...]) -> Tree:
    arcs = []
    last_at = {}
    for i, lv in enumerate(levels):
        name = f"v{i}"
        if lv > 1:
            arcs.append((last_at[lv - 1], name))
        last_at[lv] = name
    return Tree((f"v{i}" for i in range(len(levels))), arcs, "v0")


_ENUM_CACHE: dict[int, tuple[Tree, ...]] = {}


def enumerate_trees(n: int, cap: int = ENUM_CAP_DEFAULT) -> tuple[Tree, ...]:
    """All non-isomorphic rooted unordered unlabeled trees with n nodes.

    Exactly one representative per isomorphism class, in sorted canonical
    code order.  Nodes are named ``v0..v{n-1}`` in preorder.
    """
    if n < 1:
        raise TreeError(f"tree size must be at least 1, got {n}")
    if n > cap:
        raise BudgetError(f"enumeration of size-{n} trees exceeds the cap of {cap}")
    got = _ENUM_CACHE.get(n)
    if got is None:
        got = tuple(sorted((_tree_from_levels(ls) for ls in _level_sequences(n)),
                           key=canonical_code))
        _ENUM_CACHE[n] = got
    return got


# -- small constructions -----------------------------------------------------

def chain(k: int, prefix: str = "n") -> Tree:
    """Path-shaped tree with k nodes."""
    if k < 1:
        raise TreeError("chain needs at least 1 node")
    return tree_from_arcs(f"{prefix}1",
                          ((f"{prefix}{i}", f"{prefix}{i + 1}") for i in range(1, k)))


def star(k: int, prefix: str = "n") -> Tree:
    """Root with k-1 leaf children (k nodes in total)."""
    if k < 1:
        raise TreeError("star needs at least 1 node")
    return tree_from_arcs(f"{prefix}1",
                          ((f"{prefix}1", f"{prefix}{i}") for i in range(2, k + 1)))


def disjoint_union(t1: Tree, t2: Tree) -> Digraph:
    """Disjoint sum: every node is tagged with its origin tree (1 or 2)."""
    nodes = {(1, v) for v in t1.nodes} | {(2, v) for v in t2.nodes}
    arcs = {((1, a), (1, b)) for a, b in t1.arcs} | {((2, a), (2, b)) for a, b in t2.arcs}
    return Digraph(frozenset(nodes), frozenset(arcs))


# -- DOT export ---------------------------------------------------------------

_TAG_COLORS = {"spine": "lightgrey", "P": "lightblue", "R": "lightgreen", "S": "lightsalmon"}
_FALLBACK_COLORS = ("khaki", "plum", "lightcyan", "wheat", "mistyrose", "palegreen")


def _tag_color(tag: str, all_tags: tuple[str, ...]) -> str:
    if tag in _TAG_COLORS:
        return _TAG_COLORS[tag]
    extras = [s for s in all_tags if s not in _TAG_COLORS]
    return _FALLBACK_COLORS[extras.index(tag) % len(_FALLBACK_COLORS)]


def to_dot(g) -> str:
    """Graphviz digraph for a Tree or Digraph; region tags become colors."""
    labels = getattr(g, "labels", {})
    tags = getattr(g, "region_tags", {})
    all_tags = tuple(sorted(set(tags.values())))
    lines = ["digraph {"]
    for v in sorted(g.nodes, key=node_str):
        text = node_str(v)
        if v in labels:
            text += ":" + labels[v]
        attrs = [f'label="{text}"']
        if v in tags:
            attrs.append(f'fillcolor="{_tag_color(tags[v], all_tags)}"')
            attrs.append('style="filled"')
        lines.append(f'  "{node_str(v)}" [{" ".join(attrs)}];')
    for a, b in sorted(g.arcs, key=lambda p: (node_str(p[0]), node_str(p[1]))):
        lines.append(f'  "{node_str(a)}" -> "{node_str(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
