"""Combinatorial maps and diagrams: dart-involution 2-complexes, labeled
faces and contours, selections, and the structural checkers.

A diagram is stored abstractly: darts with an involution and vertex
endpoints, faces with boundary cycles, plus contour cycles.  The central
structural invariant is the dart partition: every dart lies in exactly
one face boundary cycle or exactly one contour, never both and never
twice.  Sphericity of the ambient surface is validated through the Euler
characteristic (V - E + F + C = 2 for connected disc/annular/spherical
maps, counting contour regions as faces); no geometric embedding is kept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .words import Letter, Word, inverse_letter


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Complex2:
    """Oriented combinatorial 2-complex given by darts, involution, faces."""

    vertices: frozenset
    inv: dict  # dart id -> dart id
    origin: dict  # dart id -> vertex id
    faces: dict  # face id -> tuple of dart ids (boundary cycle)

    def terminus(self, d) -> object:
        return self.origin[self.inv[d]]

    def darts(self) -> Iterable:
        return self.inv.keys()

    def edge_count(self) -> int:
        return len(self.inv) // 2

    def edges(self) -> set[frozenset]:
        return {frozenset((d, self.inv[d])) for d in self.inv}

    def degree(self, v) -> int:
        """Incident edge count with loops counted twice = darts leaving v."""
        return sum(1 for d in self.inv if self.origin[d] == v)


@dataclass(frozen=True)
class DiagramMap:
    complex: Complex2
    contours: tuple[tuple, ...]  # cyclic dart sequences

    @property
    def is_disc(self) -> bool:
        return len(self.contours) == 1

    @property
    def is_annular(self) -> bool:
        return len(self.contours) == 2

    @property
    def is_spherical(self) -> bool:
        return len(self.contours) == 0 and bool(self.complex.faces)

    @property
    def is_degenerate(self) -> bool:
        return not self.complex.faces

    def external_darts(self) -> set:
        return {d for contour in self.contours for d in contour}

    def external_edges(self) -> set[frozenset]:
        inv = self.complex.inv
        return {frozenset((d, inv[d])) for d in self.external_darts()}

    def internal_edges(self) -> set[frozenset]:
        return self.complex.edges() - self.external_edges()


@dataclass(frozen=True)
class Diagram:
    map: DiagramMap
    labels: dict  # dart id -> Letter

    @property
    def complex(self) -> Complex2:
        return self.map.complex

    def path_label(self, darts: Sequence) -> tuple[Letter, ...]:
        return tuple(self.labels[d] for d in darts)

    def face_label(self, face_id) -> tuple[Letter, ...]:
        return self.path_label(self.complex.faces[face_id])

    def boundary_length(self, face_id) -> int:
        return len(self.complex.faces[face_id])


@dataclass(frozen=True)
class FaceSelection:
    """One face's maximal selected subpath, by position in the boundary cycle."""

    face: object
    start: int  # index into the face's boundary cycle
    length: int

    def darts(self, complex: Complex2) -> tuple:
        cycle = complex.faces[self.face]
        k = len(cycle)
        return tuple(cycle[(self.start + j) % k] for j in range(self.length))


@dataclass(frozen=True)
class Selection:
    per_face: dict  # face id -> FaceSelection

    def selected_darts(self, complex: Complex2) -> set:
        out = set()
        for fs in self.per_face.values():
            out.update(fs.darts(complex))
        return out


@dataclass(frozen=True)
class DiagramMetrics:
    S: int  # selected external edges
    Sigma: int  # sum of face boundary lengths
    E: int  # edge count
    F: int  # face count


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationIssue:
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]
    face_matches: dict  # face id -> (relator index in list, sign, rotation) or None

    @property
    def ok(self) -> bool:
        return not self.issues

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [{"location": i.location, "message": i.message} for i in self.issues],
            "face_matches": {
                str(f): None if m is None else {"relator": m[0], "sign": m[1], "rotation": m[2]}
                for f, m in self.face_matches.items()
            },
        }


def _check_cycle_closed(c: Complex2, cycle: Sequence, where: str, issues: list) -> None:
    for k, d in enumerate(cycle):
        nxt = cycle[(k + 1) % len(cycle)]
        if d not in c.inv:
            issues.append(ValidationIssue(where, f"unknown dart {d!r}"))
            return
        if nxt not in c.inv:
            return
        if c.terminus(d) != c.origin[nxt]:
            issues.append(
                ValidationIssue(where, f"cycle breaks between darts {d!r} and {nxt!r}")
            )


def _connected(c: Complex2) -> bool:
    if not c.vertices:
        return True
    seen = set()
    stack = [next(iter(c.vertices))]
    adjacency: dict = {v: [] for v in c.vertices}
    for d in c.inv:
        adjacency[c.origin[d]].append(c.terminus(d))
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adjacency[v])
    return seen == c.vertices


def match_face_label(
    label: Sequence[Letter], relators: Sequence[Word]
) -> Optional[tuple[int, int, int]]:
    """(relator position, sign, rotation) such that the face label read from
    `rotation` equals relator^sign, or None.  Uses doubled-sequence substring
    search so matching stays linear in the boundary length."""
    k = len(label)
    if k == 0:
        return None
    doubled = tuple(label) + tuple(label)
    for pos, r in enumerate(relators):
        for sign, target in ((1, r.letter_tuple()), (-1, r.inverse().letter_tuple())):
            if len(target) != k:
                continue
            for rot in range(k):
                if doubled[rot : rot + k] == target:
                    return (pos, sign, rot)
    return None


def validate_diagram(d: Diagram, relators: Sequence[Word]) -> ValidationReport:
    """Full structural check plus face-label matching against the relators."""
    issues: list[ValidationIssue] = []
    c = d.complex

    for dart, image in c.inv.items():
        if image not in c.inv:
            issues.append(ValidationIssue(f"dart {dart!r}", "involution image missing"))
        elif c.inv[image] != dart:
            issues.append(ValidationIssue(f"dart {dart!r}", "involution is not involutive"))
        elif image == dart:
            issues.append(ValidationIssue(f"dart {dart!r}", "involution has a fixed point"))
        if dart not in c.origin:
            issues.append(ValidationIssue(f"dart {dart!r}", "missing origin"))
        elif c.origin[dart] not in c.vertices:
            issues.append(ValidationIssue(f"dart {dart!r}", "origin is not a vertex"))

    if issues:
        return ValidationReport(tuple(issues), {})

    for fid, cycle in c.faces.items():
        if not cycle:
            issues.append(ValidationIssue(f"face {fid!r}", "empty boundary cycle"))
        else:
            _check_cycle_closed(c, cycle, f"face {fid!r}", issues)
    for k, contour in enumerate(d.map.contours):
        if not contour:
            issues.append(ValidationIssue(f"contour {k}", "empty contour"))
        else:
            _check_cycle_closed(c, contour, f"contour {k}", issues)

    # dart partition: each dart in exactly one face cycle or one contour
    counts: dict = {dart: 0 for dart in c.inv}
    homes: dict = {dart: [] for dart in c.inv}
    for fid, cycle in c.faces.items():
        for dart in cycle:
            if dart in counts:
                counts[dart] += 1
                homes[dart].append(f"face {fid!r}")
    for k, contour in enumerate(d.map.contours):
        for dart in contour:
            if dart in counts:
                counts[dart] += 1
                homes[dart].append(f"contour {k}")
    for dart, cnt in counts.items():
        if cnt != 1:
            where = ", ".join(homes[dart]) or "nowhere"
            issues.append(
                ValidationIssue(f"dart {dart!r}", f"appears {cnt} times ({where}), expected once")
            )

    if not _connected(c):
        issues.append(ValidationIssue("map", "underlying complex is not connected"))

    # Euler characteristic, counting contour regions as faces.  An edgeless
    # single vertex is exempt: its complementary region has no contour cycle.
    if c.inv:
        chi = len(c.vertices) - c.edge_count() + len(c.faces) + len(d.map.contours)
        if chi != 2:
            issues.append(
                ValidationIssue("map", f"Euler characteristic {chi} != 2")
            )
    elif len(c.vertices) != 1 or c.faces or d.map.contours:
        issues.append(ValidationIssue("map", "edgeless map must be a single bare vertex"))

    for dart, letter in d.labels.items():
        if dart not in c.inv:
            issues.append(ValidationIssue(f"dart {dart!r}", "label on unknown dart"))
            continue
        if d.labels.get(c.inv[dart]) != inverse_letter(letter):
            issues.append(
                ValidationIssue(f"dart {dart!r}", "inverse dart label is not the inverse letter")
            )
    for dart in c.inv:
        if dart not in d.labels:
            issues.append(ValidationIssue(f"dart {dart!r}", "missing label"))

    face_matches: dict = {}
    if not issues:
        for fid in c.faces:
            match = match_face_label(d.face_label(fid), relators)
            face_matches[fid] = match
            if match is None:
                issues.append(
                    ValidationIssue(f"face {fid!r}", "label matches no relator in any rotation")
                )
    return ValidationReport(tuple(issues), face_matches)


# ---------------------------------------------------------------------------
# special selection


def _selection_runs(label: Sequence[Letter]) -> list[tuple[int, int, int]]:
    """RLE of a cyclic label sequence as (index, sign, count) runs (non-cyclic)."""
    runs: list[list[int]] = []
    for index, sign in label:
        if runs and runs[-1][0] == index and runs[-1][1] == sign:
            runs[-1][2] += 1
        else:
            runs.append([index, sign, 1])
    return [tuple(r) for r in runs]


def _find_special_subpath(label: Sequence[Letter], n: int) -> Optional[tuple[int, int]]:
    """(start, length) of a subpath reading x_1^m...x_n^m or x_n^-m...x_1^-m.

    Scans the doubled label for a run pattern whose middle runs have
    exponent exactly m and whose end runs contribute at least m, taking m
    as large as the face admits.  Returns the position of the longest
    qualifying subpath, which has length n*m.
    """
    k = len(label)
    if k == 0 or n < 1:
        return None
    doubled = tuple(label) + tuple(label)
    best: Optional[tuple[int, int]] = None

    def consider(start: int, length: int) -> None:
        nonlocal best
        if start < k and (best is None or length > best[1]):
            best = (start, length)

    runs = _selection_runs(doubled)
    # prefix sums of run positions in the doubled sequence
    positions = []
    pos = 0
    for index, sign, count in runs:
        positions.append(pos)
        pos += count

    for variant in ("up", "down"):
        if variant == "up":
            seq = [(j, 1) for j in range(1, n + 1)]
        else:
            seq = [(j, -1) for j in range(n, 0, -1)]
        for ri in range(len(runs)):
            window = runs[ri : ri + n]
            if len(window) < n:
                continue
            if [(i, s) for i, s, _ in window] != seq:
                continue
            counts = [cnt for _, _, cnt in window]
            if n == 1:
                m = counts[0]
            else:
                middle = counts[1:-1]
                if middle and any(c != middle[0] for c in middle):
                    continue
                m = middle[0] if middle else min(counts)
                if counts[0] < m or counts[-1] < m:
                    continue
            if m < 1:
                continue
            # align the window so ends contribute exactly m letters
            start = positions[ri] + counts[0] - m
            consider(start % k if start >= k else start, n * m)
    return best


def special_selection(d: Diagram, n: int, min_fraction: Fraction | None = None) -> Selection:
    """The per-face designated subpath reading x_1^m...x_n^m (or its mirror).

    Each face must carry exactly one qualifying subpath s with
    |s| > n/(2n-2) * |boundary| (the defining bound; callers at full
    parameter scale may pass a stronger min_fraction such as 1 - lambda1).
    """
    if min_fraction is None:
        min_fraction = Fraction(n, 2 * n - 2) if n > 1 else Fraction(1, 2)
    per_face = {}
    for fid in d.complex.faces:
        label = d.face_label(fid)
        hit = _find_special_subpath(label, n)
        if hit is None:
            raise DiagramError(f"face {fid!r}: no special subpath found")
        start, length = hit
        if Fraction(length) <= min_fraction * len(label):
            raise DiagramError(
                f"face {fid!r}: special subpath of length {length} fails the "
                f"bound over boundary length {len(label)}"
            )
        per_face[fid] = FaceSelection(face=fid, start=start, length=length)
    return Selection(per_face)


def scan_special_subpaths(label: Sequence[Letter], n: int) -> list[tuple[int, int]]:
    """Exhaustive quadratic scan for qualifying subpaths; a test oracle for
    uniqueness on small faces."""
    k = len(label)
    doubled = tuple(label) + tuple(label)
    bound = Fraction(n, 2 * n - 2) if n > 1 else Fraction(1, 2)
    found = []
    for start in range(k):
        for length in range(1, k + 1):
            seg = doubled[start : start + length]
            if Fraction(length) <= bound * k:
                continue
            if _is_special_word(seg, n):
                found.append((start, length))
    return found


def _is_special_word(seg: Sequence[Letter], n: int) -> bool:
    runs = _selection_runs(seg)
    if len(runs) != n:
        return False
    ups = [(j, 1) for j in range(1, n + 1)]
    downs = [(j, -1) for j in range(n, 0, -1)]
    shape = [(i, s) for i, s, _ in runs]
    if shape not in (ups, downs):
        return False
    counts = [c for _, _, c in runs]
    return all(c == counts[0] for c in counts)


# ---------------------------------------------------------------------------
# face rank


def face_rank(d: Diagram, face_id, presentation) -> int:
    """Index j of the relator whose r_j^{+-1} the face reads."""
    match = match_face_label(d.face_label(face_id), presentation.relator_words())
    if match is None:
        raise DiagramError(f"face {face_id!r}: label matches no relator")
    return presentation.relators[match[0]].i


# ---------------------------------------------------------------------------
# cancellable pairs


def find_immediately_cancellable(d: Diagram) -> list[frozenset]:
    """Unordered face pairs with mutually inverse labels readable from a
    shared edge: a dart on one face whose inverse is on the other, with the
    two boundary readings from that edge being equal words."""
    c = d.complex
    dart_face = {}
    for fid, cycle in c.faces.items():
        for pos, dart in enumerate(cycle):
            dart_face[dart] = (fid, pos)
    pairs = set()
    for dart, (f1, p1) in dart_face.items():
        other = c.inv[dart]
        if other not in dart_face:
            continue
        f2, p2 = dart_face[other]
        if f1 == f2:
            continue
        cyc1 = c.faces[f1]
        cyc2 = c.faces[f2]
        if len(cyc1) != len(cyc2):
            continue
        k = len(cyc1)
        # p1: read forward around face 1 starting at the shared dart;
        # p2: read backward around face 2 starting at the same oriented edge.
        w1 = tuple(d.labels[cyc1[(p1 + j) % k]] for j in range(k))
        w2 = tuple(
            inverse_letter(d.labels[cyc2[(p2 - j) % k]]) for j in range(k)
        )
        if w1 == w2:
            pairs.add(frozenset((f1, f2)))
    return sorted(pairs, key=lambda p: sorted(map(str, p)))


def is_weakly_reduced(d: Diagram) -> bool:
    return not find_immediately_cancellable(d)


# ---------------------------------------------------------------------------
# arcs


def maximal_arcs(m: DiagramMap) -> list[tuple]:
    """Maximal arcs: dart paths whose intermediate vertices all have degree 2.

    Each arc is reported once per orientation class: the returned list
    contains one dart sequence per undirected arc.  Closed cycles all of
    whose vertices have degree 2 are reported as a single closed arc.
    """
    c = m.complex
    out_darts: dict = {v: [] for v in c.vertices}
    for dart in c.inv:
        out_darts[c.origin[dart]].append(dart)
    deg = {v: len(ds) for v, ds in out_darts.items()}
    seen: set = set()
    arcs = []

    def walk(start_dart) -> tuple:
        path = [start_dart]
        seen.add(start_dart)
        seen.add(c.inv[start_dart])
        while True:
            v = c.terminus(path[-1])
            if deg[v] != 2:
                break
            nxt = [dd for dd in out_darts[v] if dd != c.inv[path[-1]]]
            if len(nxt) != 1 or nxt[0] in seen:
                break
            path.append(nxt[0])
            seen.add(nxt[0])
            seen.add(c.inv[nxt[0]])
        return tuple(path)

    for dart in sorted(c.inv, key=str):
        if dart in seen:
            continue
        if deg[c.origin[dart]] != 2:
            arcs.append(walk(dart))
    # leftover darts belong to closed degree-2 cycles
    for dart in sorted(c.inv, key=str):
        if dart not in seen:
            arcs.append(walk(dart))
    return arcs


def double_selected_arcs(d: Diagram, sel: Selection) -> list[tuple]:
    """Maximal arcs both of whose orientations lie in designated subpaths."""
    c = d.complex
    selected = sel.selected_darts(c)
    result = []
    for arc in maximal_arcs(d.map):
        forward = all(dart in selected for dart in arc)
        backward = all(c.inv[dart] in selected for dart in arc)
        if forward and backward:
            result.append(arc)
    return result


# ---------------------------------------------------------------------------
# condition B


@dataclass(frozen=True)
class FaceBReport:
    face: object
    b0: bool
    b1: bool
    b2: bool
    detail: str


def check_condition_B(
    d: Diagram, sel: Selection, lambda1: Fraction, lambda2: Fraction
) -> list[FaceBReport]:
    """Per-face checks: one maximal selected subpath (structural here),
    selected length at least (1-lambda1) of the boundary, and every
    double-selected arc at most lambda2 of the boundary."""
    c = d.complex
    dsa = double_selected_arcs(d, sel)
    dart_face = {}
    for fid, cycle in c.faces.items():
        for dart in cycle:
            dart_face[dart] = fid
    reports = []
    for fid, cycle in c.faces.items():
        blen = len(cycle)
        fs = sel.per_face.get(fid)
        b0 = fs is not None  # the representation stores exactly one subpath
        b1 = fs is not None and Fraction(fs.length) >= (1 - lambda1) * blen
        incident = [
            arc
            for arc in dsa
            if any(dart_face.get(dart) == fid or dart_face.get(c.inv[dart]) == fid for dart in arc)
        ]
        b2 = all(Fraction(len(arc)) <= lambda2 * blen for arc in incident)
        sel_len = fs.length if fs else 0
        detail = (
            f"|s| = {sel_len}, boundary = {blen}, "
            f"(1-l1)*boundary = {(1 - lambda1) * blen}, "
            f"double-selected arc lengths = {[len(a) for a in incident]}, "
            f"l2*boundary = {lambda2 * blen}"
        )
        reports.append(FaceBReport(fid, b0, b1, b2, detail))
    return reports


# ---------------------------------------------------------------------------
# semisimple submaps and condition X


def is_semisimple(m: DiagramMap) -> bool:
    """Every edge is incident to a face."""
    face_darts = {dart for cycle in m.complex.faces.values() for dart in cycle}
    for dart in m.complex.inv:
        if dart not in face_darts and m.complex.inv[dart] not in face_darts:
            return False
    return True


@dataclass(frozen=True)
class Submap:
    """A maximal semisimple piece: vertices, darts, and the faces inside it."""

    vertices: frozenset
    darts: frozenset
    faces: frozenset


def maximal_semisimple_submaps(m: DiagramMap) -> list[Submap]:
    """Connected components left after removing all face-free edges.

    Components may degenerate to single vertices.  Contour cycles of the
    pieces are not reconstructed: the checkers below only need vertex,
    edge and face membership.
    """
    c = m.complex
    face_darts = {dart for cycle in c.faces.values() for dart in cycle}
    keep = {
        dart
        for dart in c.inv
        if dart in face_darts or c.inv[dart] in face_darts
    }
    adjacency: dict = {v: [] for v in c.vertices}
    for dart in keep:
        adjacency[c.origin[dart]].append(c.terminus(dart))
    seen: set = set()
    components = []
    for v0 in sorted(c.vertices, key=str):
        if v0 in seen:
            continue
        comp = set()
        stack = [v0]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adjacency[v])
        seen |= comp
        darts = frozenset(d for d in keep if c.origin[d] in comp)
        faces = frozenset(
            fid for fid, cycle in c.faces.items() if c.origin[cycle[0]] in comp
        )
        components.append(Submap(frozenset(comp), darts, faces))
    return components


def selected_external_edges(d: Diagram, sel: Selection) -> set[frozenset]:
    """External edges one of whose darts lies in a designated subpath."""
    c = d.complex
    selected = sel.selected_darts(c)
    out = set()
    for edge in d.map.external_edges():
        if any(dart in selected for dart in edge):
            out.add(edge)
    return out


def _structural_external_edges(m: DiagramMap) -> set[frozenset]:
    """Edges with a dart outside every face cycle; used for submaps, whose
    contours are not reconstructed."""
    face_darts = {dart for cycle in m.complex.faces.values() for dart in cycle}
    out = set()
    for dart in m.complex.inv:
        if dart not in face_darts:
            out.add(frozenset((dart, m.complex.inv[dart])))
    return out


def metrics(d: Diagram, sel: Selection) -> DiagramMetrics:
    c = d.complex
    return DiagramMetrics(
        S=len(selected_external_edges(d, sel)),
        Sigma=sum(len(cycle) for cycle in c.faces.values()),
        E=c.edge_count(),
        F=len(c.faces),
    )


def check_condition_X(
    m: DiagramMap, sel: Selection, mu: Fraction, labels: Optional[dict] = None
) -> tuple[bool, DiagramMetrics]:
    """S >= E - mu * Sigma for a semisimple map.

    External edges here are those with a dart outside every face cycle,
    so the check also applies to submaps without explicit contours.
    """
    if not is_semisimple(m):
        raise DiagramError("map is not semisimple")
    c = m.complex
    selected = sel.selected_darts(c)
    ext = _structural_external_edges(m)
    S = sum(1 for edge in ext if any(dart in selected for dart in edge))
    Sigma = sum(len(cycle) for cycle in c.faces.values())
    E = c.edge_count()
    met = DiagramMetrics(S=S, Sigma=Sigma, E=E, F=len(c.faces))
    return Fraction(S) >= E - mu * Sigma, met


def submap_condition_X(
    m: DiagramMap, sub: Submap, sel: Selection, mu: Fraction
) -> tuple[bool, DiagramMetrics]:
    """Condition X evaluated on one maximal semisimple submap in place."""
    c = m.complex
    face_darts = {
        dart for fid in sub.faces for dart in c.faces[fid]
    }
    selected = sel.selected_darts(c)
    edges = {frozenset((d, c.inv[d])) for d in sub.darts}
    ext = {e for e in edges if any(dart not in face_darts for dart in e)}
    S = sum(1 for e in ext if any(dart in selected for dart in e))
    Sigma = sum(len(c.faces[fid]) for fid in sub.faces)
    E = len(edges)
    met = DiagramMetrics(S=S, Sigma=Sigma, E=E, F=len(sub.faces))
    return Fraction(S) >= E - mu * Sigma, met


def check_main_lemma(
    d: Diagram, sel: Selection, params, require_B: bool = True
) -> tuple[bool, DiagramMetrics]:
    """S >= (1 - 2*mu) * Sigma for a map with at most 3 contours whose
    selection satisfies the per-face condition checks.

    require_B=False skips the per-face precondition and just evaluates the
    inequality; useful at small alphabet sizes where the per-face length
    bound cannot hold but the inequality itself is still meaningful.
    """
    if len(d.map.contours) > 3:
        raise DiagramError("more than 3 contours")
    if require_B:
        for rep in check_condition_B(d, sel, params.lambda1, params.lambda2):
            if not (rep.b0 and rep.b1 and rep.b2):
                raise DiagramError(
                    f"face {rep.face!r} fails the per-face conditions: {rep.detail}"
                )
    met = metrics(d, sel)
    ok = Fraction(met.S) >= (1 - 2 * params.mu) * met.Sigma
    return ok, met


def check_letter_budget(
    d: Diagram, sel: Selection, letters: set[int], n: int
) -> tuple[bool, dict]:
    """Selected external edges with labels among the given basic letters
    number strictly less than (k/n) * Sigma, k the subset size."""
    if not letters:
        raise DiagramError("letter subset must be nonempty")
    if not d.complex.faces:
        raise DiagramError("degenerate diagram")
    edges = selected_external_edges(d, sel)
    count = 0
    per_letter = {i: 0 for i in letters}
    for edge in edges:
        dart = next(iter(edge))
        index = d.labels[dart][0]
        if index in letters:
            count += 1
            per_letter[index] += 1
    Sigma = sum(len(cycle) for cycle in d.complex.faces.values())
    k = len(letters)
    ok = Fraction(count) < Fraction(k, n) * Sigma
    return ok, {"count": count, "per_letter": per_letter, "Sigma": Sigma, "k": k}


# ---------------------------------------------------------------------------
# mirror copy


def mirror_copy(d: Diagram) -> Diagram:
    """Reverse all face boundary cycles and contours; labels unchanged.

    Each reversed cycle is re-seated on inverse darts so cycles stay
    closed; reading a mirrored face yields the inverse word.  Involutive.
    """
    c = d.complex

    def flip(cycle: Sequence) -> tuple:
        return tuple(c.inv[dart] for dart in reversed(cycle))

    new_faces = {fid: flip(cycle) for fid, cycle in c.faces.items()}
    new_contours = tuple(flip(cycle) for cycle in d.map.contours)
    new_complex = Complex2(c.vertices, c.inv, c.origin, new_faces)
    return Diagram(DiagramMap(new_complex, new_contours), d.labels)


# ---------------------------------------------------------------------------
# JSON I/O


def diagram_to_dict(d: Diagram) -> dict:
    c = d.complex
    return {
        "vertices": sorted(c.vertices, key=str),
        "darts": [
            {
                "id": dart,
                "inv": c.inv[dart],
                "from": c.origin[dart],
                "to": c.terminus(dart),
                "label": f"x{d.labels[dart][0]}" if d.labels[dart][1] > 0 else f"x{d.labels[dart][0]}^-1",
            }
            for dart in sorted(c.inv, key=str)
        ],
        "faces": [
            {"id": fid, "cycle": list(cycle)} for fid, cycle in sorted(c.faces.items(), key=lambda kv: str(kv[0]))
        ],
        "contours": [list(cycle) for cycle in d.map.contours],
    }


def _parse_label(text: str) -> Letter:
    if text.endswith("^-1"):
        return (int(text[1:-3]), -1)
    return (int(text[1:]), 1)


def diagram_from_dict(data: dict) -> Diagram:
    try:
        vertices = frozenset(data["vertices"])
        inv = {}
        origin = {}
        labels = {}
        for item in data["darts"]:
            inv[item["id"]] = item["inv"]
            origin[item["id"]] = item["from"]
            labels[item["id"]] = _parse_label(item["label"])
        faces = {item["id"]: tuple(item["cycle"]) for item in data["faces"]}
        contours = tuple(tuple(cycle) for cycle in data["contours"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise DiagramError(f"bad diagram data: {exc}") from exc
    complex = Complex2(vertices, inv, origin, faces)
    return Diagram(DiagramMap(complex, contours), labels)


def load_diagram(path: str) -> Diagram:
    with open(path) as fh:
        return diagram_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# builders


def polygon_diagram(word: Word, face_id: str = "f0") -> Diagram:
    """One-face disc: a polygon reading `word` around the face, with the
    contour being the inverse cycle."""
    letters = word.letter_tuple()
    k = len(letters)
    if k == 0:
        raise DiagramError("cannot build a polygon on the empty word")
    vertices = frozenset(f"v{j}" for j in range(k))
    inv = {}
    origin = {}
    labels = {}
    cycle = []
    for j, letter in enumerate(letters):
        dart = f"d{j}+"
        anti = f"d{j}-"
        inv[dart] = anti
        inv[anti] = dart
        origin[dart] = f"v{j}"
        origin[anti] = f"v{(j + 1) % k}"
        labels[dart] = letter
        labels[anti] = inverse_letter(letter)
        cycle.append(dart)
    contour = tuple(inv[dart] for dart in reversed(cycle))
    complex = Complex2(vertices, inv, origin, {face_id: tuple(cycle)})
    return Diagram(DiagramMap(complex, (contour,)), labels)


def degenerate_path_diagram(word: Word) -> Diagram:
    """Face-free disc whose single contour reads word * word^-1."""
    letters = word.letter_tuple()
    k = len(letters)
    vertices = frozenset(f"v{j}" for j in range(k + 1)) if k else frozenset({"v0"})
    inv = {}
    origin = {}
    labels = {}
    path = []
    for j, letter in enumerate(letters):
        dart = f"d{j}+"
        anti = f"d{j}-"
        inv[dart] = anti
        inv[anti] = dart
        origin[dart] = f"v{j}"
        origin[anti] = f"v{j + 1}"
        labels[dart] = letter
        labels[anti] = inverse_letter(letter)
        path.append(dart)
    contour = tuple(path) + tuple(inv[dart] for dart in reversed(path))
    complex = Complex2(vertices, inv, origin, {})
    contours = (contour,) if contour else ()
    return Diagram(DiagramMap(complex, contours), labels)


def sphere_double(word: Word) -> Diagram:
    """Spherical diagram: two faces reading word and word^-1 glued along
    their entire shared boundary circle; the canonical cancellable pair."""
    base = polygon_diagram(word, face_id="front")
    c = base.complex
    cycle = c.faces["front"]
    back = tuple(c.inv[dart] for dart in reversed(cycle))
    faces = {"front": cycle, "back": back}
    complex = Complex2(c.vertices, c.inv, c.origin, faces)
    return Diagram(DiagramMap(complex, ()), base.labels)


def glue_boundary(d: Diagram, word: Word, face_id: str, overlap: int) -> Diagram:
    """Attach a new polygon face reading `word` along the first `overlap`
    darts of the current (single) contour.

    The attached face's boundary cycle starts with those contour darts,
    which migrate from the contour into the face (preserving the dart
    partition); `word` must therefore begin with the labels of the shared
    contour segment.
    """
    if not d.map.is_disc:
        raise DiagramError("gluing expects a disc diagram")
    letters = word.letter_tuple()
    k = len(letters)
    if not 0 < overlap < k:
        raise DiagramError("overlap must be a proper nonempty boundary segment")
    contour = d.map.contours[0]
    if overlap > len(contour):
        raise DiagramError("overlap exceeds contour length")
    c = d.complex

    shared = [contour[j] for j in range(overlap)]
    for j in range(overlap):
        if d.labels[shared[j]] != letters[j]:
            raise DiagramError(
                f"overlap letter {j} mismatch: contour side reads "
                f"{d.labels[shared[j]]}, new face needs {letters[j]}"
            )

    inv = dict(c.inv)
    origin = dict(c.origin)
    labels = dict(d.labels)
    vertices = set(c.vertices)

    start_v = c.terminus(shared[-1])  # where the fresh part of the face begins
    end_v = c.origin[shared[0]]  # and where it must close up
    new_cycle = list(shared)
    prev_v = start_v
    fresh = 0
    for j in range(overlap, k):
        dart = f"{face_id}_d{j}+"
        anti = f"{face_id}_d{j}-"
        if j == k - 1:
            nxt_v = end_v
        else:
            nxt_v = f"{face_id}_v{fresh}"
            vertices.add(nxt_v)
            fresh += 1
        inv[dart] = anti
        inv[anti] = dart
        origin[dart] = prev_v
        origin[anti] = nxt_v
        labels[dart] = letters[j]
        labels[anti] = inverse_letter(letters[j])
        new_cycle.append(dart)
        prev_v = nxt_v

    new_contour = tuple(contour[overlap:]) + tuple(
        inv[dart] for dart in reversed(new_cycle[overlap:])
    )
    faces = dict(c.faces)
    faces[face_id] = tuple(new_cycle)
    complex = Complex2(frozenset(vertices), inv, origin, faces)
    return Diagram(DiagramMap(complex, (new_contour,)), labels)


def rotate_contour(d: Diagram, k: int) -> Diagram:
    """Shift the starting dart of a disc diagram's contour; same diagram."""
    if not d.map.is_disc:
        raise DiagramError("contour rotation expects a disc diagram")
    contour = d.map.contours[0]
    k %= len(contour)
    return Diagram(
        DiagramMap(d.complex, (contour[k:] + contour[:k],)), d.labels
    )


def random_diagram(relators: Sequence[Word], faces: int, rng) -> Diagram:
    """A random valid disc diagram with the given number of faces, grown by
    gluing relator polygons along boundary segments."""
    if faces < 1:
        raise DiagramError("need at least one face")
    variants = []
    for r in relators:
        for base in (r.letter_tuple(), r.inverse().letter_tuple()):
            for k in range(len(base)):
                variants.append(base[k:] + base[:k])
    first = rng.choice(variants)
    d = polygon_diagram(Word.from_letters(list(first)), face_id="f0")
    for step in range(1, faces):
        d = rotate_contour(d, rng.randrange(len(d.map.contours[0])))
        contour = d.map.contours[0]
        placed = False
        overlaps = list(range(1, min(len(contour), max(len(r) for r in relators)) ))
        rng.shuffle(overlaps)
        for overlap in overlaps:
            prefix = tuple(d.labels[contour[j]] for j in range(overlap))
            fits = [v for v in variants if len(v) > overlap and v[:overlap] == prefix]
            if not fits:
                continue
            word = Word.from_letters(list(rng.choice(fits)))
            d = glue_boundary(d, word, f"f{step}", overlap)
            placed = True
            break
        if not placed:
            break
    return d
