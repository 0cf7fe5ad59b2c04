"""Surface germs and clusters of infinitely near points.

A :class:`Cluster` is a base germ (a smooth point, or a du Val singularity
of type A/D/E) together with an ordered list of point blowups.  Each blowup
is centered either at a generic (free) point of one existing exceptional
curve, or at the intersection (satellite) point of two curves that
currently meet.  The resulting model has simple normal crossing exceptional
locus by construction, so it is a log resolution of everything computed
from it.

Curve ids are 0-based.  Over a du Val base the minimal-resolution curves
come first, in a fixed documented order:

* ``An``: the path 0 - 1 - ... - (n-1);
* ``Dn``: the path 0 - ... - (n-3), with both fork curves (n-2) and (n-1)
  attached to curve (n-3);
* ``E6``/``E7``/``E8``: the path 0 - ... - (rank-2), with the branch curve
  (rank-1) attached to curve 2.

Each blowup step then appends one curve.  Minimal-resolution curves are
(-2)-curves with relative canonical coefficient k = 0; a new blowup curve
gets k = 1 + sum of k over the curves through its center.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cache

from . import exact
from .errors import InvalidStep

_DYNKIN_LETTERS = ("A", "D", "E")


@dataclass(frozen=True)
class BaseGerm:
    """The germ under the cluster: smooth, or du Val of the given type.

    ``dynkin`` is None for a smooth point, else a label like "A3" or "E7".
    """

    dynkin: str | None = None

    def __post_init__(self):
        if self.dynkin is not None:
            letter, rank = _parse_dynkin(self.dynkin)
            object.__setattr__(self, "dynkin", f"{letter}{rank}")

    @property
    def is_smooth(self) -> bool:
        return self.dynkin is None

    def rank(self) -> int:
        """Number of minimal-resolution curves (0 for a smooth base)."""
        if self.dynkin is None:
            return 0
        return _parse_dynkin(self.dynkin)[1]


SMOOTH = BaseGerm(None)


def du_val(label: str) -> BaseGerm:
    return BaseGerm(label)


def _parse_dynkin(label: str) -> tuple[str, int]:
    letter, digits = label[:1].upper(), label[1:]
    if letter not in _DYNKIN_LETTERS or not digits.isdigit():
        raise ValueError(f"not a Dynkin label: {label!r}")
    rank = int(digits)
    if letter == "A" and rank < 1:
        raise ValueError("type A needs rank >= 1")
    if letter == "D" and rank < 4:
        raise ValueError("type D needs rank >= 4")
    if letter == "E" and rank not in (6, 7, 8):
        raise ValueError("type E needs rank 6, 7 or 8")
    return letter, rank


def _dynkin_edges(label: str) -> list[tuple[int, int]]:
    letter, rank = _parse_dynkin(label)
    if letter == "A":
        return [(i, i + 1) for i in range(rank - 1)]
    if letter == "D":
        path = [(i, i + 1) for i in range(rank - 3)]
        return path + [(rank - 3, rank - 2), (rank - 3, rank - 1)]
    path = [(i, i + 1) for i in range(rank - 2)]
    return path + [(2, rank - 1)]


@dataclass(frozen=True)
class Free:
    """Blowup of a generic point on curve ``on`` (or of the germ's point
    itself when ``on`` is None, legal only as the first step over a smooth
    base)."""

    on: int | None = None


@dataclass(frozen=True)
class Satellite:
    """Blowup of the intersection point of the two curves in ``on``; legal
    only while those curves meet."""

    on: tuple[int, int]

    def __post_init__(self):
        a, b = self.on
        object.__setattr__(self, "on", (min(a, b), max(a, b)))


BlowupStep = Free | Satellite


@dataclass(frozen=True)
class Cluster:
    base: BaseGerm
    steps: tuple[BlowupStep, ...]

    def curve_count(self) -> int:
        return self.base.rank() + len(self.steps)


def _step_refs(step: BlowupStep) -> tuple[int, ...]:
    if isinstance(step, Free):
        return () if step.on is None else (step.on,)
    return step.on


def _simulate(base: BaseGerm, steps: tuple[BlowupStep, ...]):
    """Validate steps and return (matrix rows as lists, k list)."""
    rank = base.rank()
    m: list[list[int]] = [[0] * rank for _ in range(rank)]
    k: list[int] = [0] * rank
    for i in range(rank):
        m[i][i] = -2
    if base.dynkin is not None:
        for i, j in _dynkin_edges(base.dynkin):
            m[i][j] = m[j][i] = 1

    for idx, step in enumerate(steps):
        n = len(m)
        refs = _step_refs(step)
        if isinstance(step, Free) and step.on is None:
            if not base.is_smooth:
                raise InvalidStep(idx, "blowup of the base point needs a smooth base")
            if idx != 0:
                raise InvalidStep(idx, "blowup of the base point is only legal first")
        elif isinstance(step, Satellite) and step.on[0] == step.on[1]:
            raise InvalidStep(idx, "satellite needs two distinct curves")
        for r in refs:
            if not 0 <= r < n:
                raise InvalidStep(idx, f"curve {r} does not exist yet")
        if base.is_smooth and idx == 0 and not (isinstance(step, Free) and step.on is None):
            raise InvalidStep(idx, "the first step over a smooth base blows up the base point")
        if isinstance(step, Satellite):
            i, j = step.on
            if m[i][j] != 1:
                raise InvalidStep(idx, f"curves {i} and {j} do not meet at this step")

        for row in m:
            row.append(0)
        m.append([0] * (n + 1))
        m[n][n] = -1
        for r in refs:
            m[n][r] = m[r][n] = 1
            m[r][r] -= 1
        if isinstance(step, Satellite):
            i, j = step.on
            m[i][j] = m[j][i] = 0
        k.append(1 + sum(k[r] for r in refs))
    return m, k


def build(base: BaseGerm, steps) -> Cluster:
    """Validate the step list and return the cluster.

    Raises InvalidStep on a dangling reference, an illegal satellite or an
    illegal first step.  The intersection matrix of every built cluster is
    checked to be negative definite with off-diagonal entries 0 or 1.
    """
    steps = tuple(steps)
    if base.is_smooth and not steps:
        raise InvalidStep(0, "a smooth base needs at least one blowup")
    c = Cluster(base, steps)
    m = intersection_matrix(c)
    n = len(m)
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] not in (0, 1):
                raise AssertionError("off-diagonal intersection outside {0,1}")
    if not exact.is_negative_definite(m):
        raise AssertionError("intersection matrix not negative definite")
    return c


@cache
def intersection_matrix(c: Cluster) -> tuple[tuple[int, ...], ...]:
    """Symmetric, integer, negative definite matrix of the exceptional
    curves on the top model."""
    m, _ = _simulate(c.base, c.steps)
    return tuple(tuple(row) for row in m)


@cache
def canonical_vector(c: Cluster) -> tuple[int, ...]:
    """Coefficients of the relative canonical divisor, one per curve."""
    _, k = _simulate(c.base, c.steps)
    return tuple(k)


@dataclass(frozen=True)
class CurveInfo:
    id: int
    k: int
    origin: int | None  # step index, or None for a minimal-resolution curve


def curve_table(c: Cluster) -> tuple[CurveInfo, ...]:
    k = canonical_vector(c)
    rank = c.base.rank()
    return tuple(
        CurveInfo(i, k[i], None if i < rank else i - rank)
        for i in range(c.curve_count())
    )


def step_parents(c: Cluster) -> tuple[tuple[int, ...], ...]:
    """For each step, the sorted ids of the curves through its center."""
    return tuple(tuple(sorted(_step_refs(s))) for s in c.steps)


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[tuple[int, int, int], ...]  # (id, self-intersection, k)
    edges: tuple[tuple[int, int], ...]


def dual_graph(c: Cluster) -> DualGraph:
    """Vertices are curves labeled with E.E and k; edges join meeting
    curves (intersection number 1)."""
    m = intersection_matrix(c)
    k = canonical_vector(c)
    n = len(m)
    vertices = tuple((i, m[i][i], k[i]) for i in range(n))
    edges = tuple(
        (i, j) for i in range(n) for j in range(i + 1, n) if m[i][j] == 1
    )
    return DualGraph(vertices, edges)


def to_dot(c: Cluster) -> str:
    g = dual_graph(c)
    lines = ["graph cluster {"]
    for i, self_int, k in g.vertices:
        lines.append(f'  E{i} [label="E{i} | self={self_int} | k={k}"];')
    for i, j in g.edges:
        lines.append(f"  E{i} -- E{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def legal_steps(c: Cluster) -> list[BlowupStep]:
    """All single blowup steps that may extend the cluster, in a fixed
    deterministic order (free steps by curve, then satellites by pair)."""
    m = intersection_matrix(c)
    n = len(m)
    out: list[BlowupStep] = [Free(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] == 1:
                out.append(Satellite((i, j)))
    return out


def extend(c: Cluster, step: BlowupStep) -> Cluster:
    return build(c.base, c.steps + (step,))


def ancestor_curves(c: Cluster, curve: int) -> frozenset[int]:
    """The curve itself, the curves through its center, recursively, plus
    every minimal-resolution curve."""
    rank = c.base.rank()
    if not 0 <= curve < c.curve_count():
        raise ValueError(f"no curve {curve}")
    keep = set(range(rank))
    stack = [curve]
    while stack:
        v = stack.pop()
        if v in keep:
            continue
        keep.add(v)
        if v >= rank:
            stack.extend(_step_refs(c.steps[v - rank]))
    return frozenset(keep)


def prune_to_ancestors(c: Cluster, curve: int) -> tuple[Cluster, dict[int, int]]:
    """Restrict the cluster to the ancestors of ``curve``.

    Returns the pruned cluster and the old-id -> new-id map.  Dropping
    non-ancestor steps keeps every remaining step legal: a satellite's
    intersection point can only have been consumed by the satellite step
    itself, which is an ancestor whenever its curve is kept.
    """
    keep = ancestor_curves(c, curve)
    rank = c.base.rank()
    old_to_new = {i: i for i in range(rank)}
    new_steps: list[BlowupStep] = []
    for idx, step in enumerate(c.steps):
        old_id = rank + idx
        if old_id not in keep:
            continue
        old_to_new[old_id] = rank + len(new_steps)
        if isinstance(step, Free):
            new_steps.append(Free(None if step.on is None else old_to_new[step.on]))
        else:
            i, j = step.on
            new_steps.append(Satellite((old_to_new[i], old_to_new[j])))
    return build(c.base, new_steps), old_to_new


# -- JSON wire format ---------------------------------------------------
#
# { "base": "smooth" | {"du_val": "A1"|...|"E8"},
#   "steps": [ {"kind":"free","on":null|int},
#              {"kind":"satellite","on":[int,int]}, ... ] }


def cluster_to_json(c: Cluster) -> dict:
    steps = []
    for s in c.steps:
        if isinstance(s, Free):
            steps.append({"kind": "free", "on": s.on})
        else:
            steps.append({"kind": "satellite", "on": list(s.on)})
    base = "smooth" if c.base.is_smooth else {"du_val": c.base.dynkin}
    return {"base": base, "steps": steps}


def cluster_from_json(doc) -> Cluster:
    if not isinstance(doc, dict):
        raise ValueError("cluster document must be a JSON object")
    base_doc = doc.get("base")
    if base_doc == "smooth":
        base = SMOOTH
    elif isinstance(base_doc, dict) and set(base_doc) == {"du_val"}:
        base = du_val(str(base_doc["du_val"]))
    else:
        raise ValueError('"base" must be "smooth" or {"du_val": <label>}')
    steps_doc = doc.get("steps")
    if not isinstance(steps_doc, list):
        raise ValueError('"steps" must be a list')
    steps: list[BlowupStep] = []
    for idx, s in enumerate(steps_doc):
        if not isinstance(s, dict) or "kind" not in s:
            raise ValueError(f"steps[{idx}]: not a step object")
        kind = s["kind"]
        if kind == "free":
            on = s.get("on")
            if not (on is None or isinstance(on, int)):
                raise ValueError(f"steps[{idx}]: free 'on' must be null or an int")
            steps.append(Free(on))
        elif kind == "satellite":
            on = s.get("on")
            if (
                not isinstance(on, list)
                or len(on) != 2
                or not all(isinstance(v, int) for v in on)
            ):
                raise ValueError(f"steps[{idx}]: satellite 'on' must be [int, int]")
            if on[0] == on[1]:
                raise InvalidStep(idx, "satellite needs two distinct curves")
            steps.append(Satellite((on[0], on[1])))
        else:
            raise ValueError(f"steps[{idx}]: unknown kind {kind!r}")
    return build(base, steps)


def cluster_from_file(path: str) -> Cluster:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return cluster_from_json(doc)
