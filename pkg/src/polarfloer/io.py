"""Dataset files: a single self-describing JSON document per dataset.

Ring elements are serialized as exponent strings ("t^0+t^3", "t^-1+1") and
group-ring elements as "1+i".  The canonical form (sorted labels and entries,
normalized element strings, two-space indent) makes emit(parse(file))
byte-identical for canonical files.
"""

from __future__ import annotations

import json

import numpy as np

from . import smith
from .complexes import ComplexError, FreeComplex
from .equiv_floer import EquivariantDataset
from .equivariant import Z2FreeComplex
from .morse_km import KMDataset
from .rings import F2Z2, GF2, parse_ring_element
from .twisted import TrajectoryClass, TwistedDataset

FORMAT_VERSION = 1


class SchemaError(ValueError):
    """Malformed dataset file: syntax, unknown fields, or dangling labels."""


def _elem_str(ring, x) -> str:
    return ring.to_str(x)


def _require(cond, msg):
    if not cond:
        raise SchemaError(msg)


def _entries_from_matrix(ring, m, row_labels, col_labels):
    out = []
    for i, rl in enumerate(row_labels):
        for j, cl in enumerate(col_labels):
            x = m[i][j]
            if not ring.is_zero(x):
                out.append([rl, cl, _elem_str(ring, x)])
    out.sort()
    return out


def _matrix_from_entries(ring, entries, row_labels, col_labels, context):
    rpos = {l: i for i, l in enumerate(row_labels)}
    cpos = {l: i for i, l in enumerate(col_labels)}
    m = smith.mat_zero(ring, len(row_labels), len(col_labels))
    for ent in entries:
        _require(len(ent) == 3, f"{context}: entry must be [row, col, value]")
        rl, cl, s = ent
        _require(rl in rpos, f"{context}: dangling row label {rl!r}")
        _require(cl in cpos, f"{context}: dangling column label {cl!r}")
        try:
            x = parse_ring_element(ring, s)
        except ValueError as exc:
            raise SchemaError(f"{context}: {exc}") from exc
        m[rpos[rl]][cpos[cl]] = ring.add(m[rpos[rl]][cpos[cl]], x)
    return m


def emit_z2complex(cx: Z2FreeComplex) -> dict:
    gens = []
    for i, l in enumerate(cx.labels):
        g = {"label": l}
        if cx.grading is not None:
            g["grading"] = cx.grading[i]
        gens.append(g)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "z2complex",
        "generators": sorted(gens, key=lambda g: g["label"]),
        "differential": _entries_from_matrix(F2Z2, cx.d, cx.labels, cx.labels),
    }


def parse_z2complex(doc: dict) -> Z2FreeComplex:
    gens = doc.get("generators", [])
    labels = [g["label"] for g in gens]
    _require(len(set(labels)) == len(labels), "duplicate generator labels")
    grading = None
    if any("grading" in g for g in gens):
        _require(all("grading" in g for g in gens), "partial grading")
        grading = [int(g["grading"]) for g in gens]
    d = _matrix_from_entries(F2Z2, doc.get("differential", []), labels, labels, "differential")
    try:
        return Z2FreeComplex(labels, d, grading)
    except ComplexError as exc:
        raise DatasetInvalid(str(exc)) from exc


def emit_floer(cx: FreeComplex) -> dict:
    gens = []
    for i, l in enumerate(cx.labels):
        g = {"label": l}
        if cx.grading is not None:
            g["grading"] = cx.grading[i]
        gens.append(g)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "floer",
        "generators": sorted(gens, key=lambda g: g["label"]),
        "differential": _entries_from_matrix(GF2, cx.d, cx.labels, cx.labels),
    }


def parse_floer(doc: dict) -> FreeComplex:
    gens = doc.get("generators", [])
    labels = [g["label"] for g in gens]
    _require(len(set(labels)) == len(labels), "duplicate generator labels")
    grading = None
    if any("grading" in g for g in gens):
        _require(all("grading" in g for g in gens), "partial grading")
        grading = [int(g["grading"]) for g in gens]
    d = _matrix_from_entries(GF2, doc.get("differential", []), labels, labels, "differential")
    try:
        return FreeComplex(GF2, labels, d, grading)
    except ComplexError as exc:
        raise DatasetInvalid(str(exc)) from exc


def emit_twisted(tw: TwistedDataset, window: int | None = None) -> dict:
    pts = []
    for l in sorted(tw.labels):
        p = {"label": l, "index": tw.ind[l]}
        if tw.grading is not None:
            p["grading"] = tw.grading[l]
        if tw.actions is not None:
            p["action"] = str(tw.actions[l])
        pts.append(p)
    classes = sorted(
        (
            {
                "from": c.x_minus,
                "to": c.x_plus,
                "sf": c.sf,
                "pos": c.n_pos & 1,
                "neg": c.n_neg & 1,
            }
            for c in tw.classes
        ),
        key=lambda c: (c["from"], c["to"], c["sf"]),
    )
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "twisted",
        "points": pts,
        "classes": classes,
    }
    if window is not None:
        doc["options"] = {"window": window}
    return doc


def parse_twisted(doc: dict) -> TwistedDataset:
    pts = doc.get("points", [])
    points = [(p["label"], int(p["index"])) for p in pts]
    labels = {p["label"] for p in pts}
    grading = None
    if any("grading" in p for p in pts):
        _require(all("grading" in p for p in pts), "partial grading")
        grading = {p["label"]: int(p["grading"]) for p in pts}
    actions = None
    if any("action" in p for p in pts):
        _require(all("action" in p for p in pts), "partial actions")
        actions = {p["label"]: p["action"] for p in pts}
    classes = []
    for c in doc.get("classes", []):
        _require(c.get("from") in labels, f"dangling label {c.get('from')!r} in class")
        _require(c.get("to") in labels, f"dangling label {c.get('to')!r} in class")
        classes.append(
            TrajectoryClass(c["from"], c["to"], int(c["sf"]), int(c.get("pos", 0)), int(c.get("neg", 0)))
        )
    try:
        return TwistedDataset(points, classes, grading=grading, actions=actions)
    except ComplexError as exc:
        raise DatasetInvalid(str(exc)) from exc


def emit_km(k: KMDataset) -> dict:
    def gen_list(labels, grading):
        out = []
        for i, l in enumerate(labels):
            g = {"label": l}
            if grading is not None:
                g["grading"] = grading[i]
            out.append(g)
        return out

    go, gs, gu = k.gradings if k.gradings is not None else (None, None, None)
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "km",
        "interior": gen_list(k.o_labels, go),
        "stable": gen_list(k.s_labels, gs),
        "unstable": gen_list(k.u_labels, gu),
        "matrices": {},
    }
    rowcol = {
        "d_oo": (k.o_labels, k.o_labels),
        "d_os": (k.o_labels, k.s_labels),
        "d_uo": (k.u_labels, k.o_labels),
        "d_us": (k.u_labels, k.s_labels),
        "dss": (k.s_labels, k.s_labels),
        "dsu": (k.s_labels, k.u_labels),
        "dus": (k.u_labels, k.s_labels),
        "duu": (k.u_labels, k.u_labels),
    }
    if k.lift is not None:
        doc["lift"] = {}
    for name, (rl, cl) in rowcol.items():
        ents = _entries_from_matrix(GF2, k.matrices[name].tolist(), rl, cl)
        if ents:
            doc["matrices"][name] = ents
        if k.lift is not None:
            lents = _entries_from_matrix(F2Z2, k.lift[name], rl, cl)
            if lents:
                doc["lift"][name] = lents
    return doc


def parse_km(doc: dict) -> KMDataset:
    def read_gens(key):
        gens = doc.get(key, [])
        labels = [g["label"] for g in gens]
        grading = None
        if any("grading" in g for g in gens):
            _require(all("grading" in g for g in gens), f"partial grading in {key}")
            grading = [int(g["grading"]) for g in gens]
        return labels, grading

    o, go = read_gens("interior")
    s, gs = read_gens("stable")
    u, gu = read_gens("unstable")
    alllab = o + s + u
    _require(len(set(alllab)) == len(alllab), "duplicate labels across kinds")
    rowcol = {
        "d_oo": (o, o),
        "d_os": (o, s),
        "d_uo": (u, o),
        "d_us": (u, s),
        "dss": (s, s),
        "dsu": (s, u),
        "dus": (u, s),
        "duu": (u, u),
    }
    matrices = {}
    for name, ents in doc.get("matrices", {}).items():
        _require(name in rowcol, f"unknown matrix {name!r}")
        rl, cl = rowcol[name]
        m = _matrix_from_entries(GF2, ents, rl, cl, name)
        matrices[name] = np.array(m, dtype=np.uint8) if rl and cl else np.zeros(
            (len(rl), len(cl)), dtype=np.uint8
        )
    lift = None
    if "lift" in doc:
        lift = {}
        for name, (rl, cl) in rowcol.items():
            ents = doc["lift"].get(name, [])
            lift[name] = _matrix_from_entries(F2Z2, ents, rl, cl, "lift " + name)
        for name in rowcol:
            if name not in matrices:
                lm = lift[name]
                matrices[name] = np.array(
                    [[(x.a ^ x.b) for x in row] for row in lm], dtype=np.uint8
                ) if lm and lm[0] else np.zeros((len(rowcol[name][0]), len(rowcol[name][1])), dtype=np.uint8)
    gradings = None
    if go is not None and gs is not None and gu is not None:
        gradings = (go, gs, gu)
    elif any(g is not None for g in (go, gs, gu)) and (o and s and u):
        raise SchemaError("gradings must be given on all three generator kinds")
    try:
        return KMDataset(o, s, u, matrices, lift, gradings)
    except ComplexError as exc:
        raise DatasetInvalid(str(exc)) from exc


def emit_equivariant(e: EquivariantDataset) -> dict:
    pairs = []
    for l in sorted(e.pair_labels):
        p = {"label": l}
        if e.pair_grading is not None:
            p["grading"] = e.pair_grading[l]
        pairs.append(p)
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "equivariant",
        "pairs": pairs,
        "boundary": {k: v for k, v in emit_twisted(e.boundary).items() if k not in ("format_version", "kind")},
        "oo_lift": _entries_from_matrix(F2Z2, e.oo_lift, e.pair_labels, e.pair_labels),
        "os": sorted([[p, x, k, _elem_str(F2Z2, c)] for p, x, k, c in e.os_entries]),
        "uo": sorted([[x, k, p, _elem_str(F2Z2, c)] for x, k, p, c in e.uo_entries]),
        "us": sorted([[xm, km, xp, kp, _elem_str(F2Z2, c)] for xm, km, xp, kp, c in e.us_entries]),
        "options": {
            "window": e.default_window,
            "equivariant_regular": e.equivariant_regular,
        },
    }
    return doc


def parse_equivariant(doc: dict) -> EquivariantDataset:
    pairs = doc.get("pairs", [])
    pair_labels = [p["label"] for p in pairs]
    _require(len(set(pair_labels)) == len(pair_labels), "duplicate pair labels")
    pair_grading = None
    if any("grading" in p for p in pairs):
        _require(all("grading" in p for p in pairs), "partial pair grading")
        pair_grading = {p["label"]: int(p["grading"]) for p in pairs}
    bnd_doc = dict(doc.get("boundary", {}))
    boundary = parse_twisted(bnd_doc)
    oo = _matrix_from_entries(F2Z2, doc.get("oo_lift", []), pair_labels, pair_labels, "oo_lift")
    xlabels = set(boundary.labels)
    plabels = set(pair_labels)

    def gr(s, ctx):
        try:
            return parse_ring_element(F2Z2, s)
        except ValueError as exc:
            raise SchemaError(f"{ctx}: {exc}") from exc

    os_entries = []
    for ent in doc.get("os", []):
        p, x, k, c = ent
        _require(p in plabels, f"os: dangling pair label {p!r}")
        _require(x in xlabels, f"os: dangling point label {x!r}")
        os_entries.append((p, x, int(k), gr(c, "os")))
    uo_entries = []
    for ent in doc.get("uo", []):
        x, k, p, c = ent
        _require(p in plabels, f"uo: dangling pair label {p!r}")
        _require(x in xlabels, f"uo: dangling point label {x!r}")
        uo_entries.append((x, int(k), p, gr(c, "uo")))
    us_entries = []
    for ent in doc.get("us", []):
        xm, km, xp, kp, c = ent
        _require(xm in xlabels and xp in xlabels, "us: dangling point label")
        us_entries.append((xm, int(km), xp, int(kp), gr(c, "us")))
    opts = doc.get("options", {})
    try:
        return EquivariantDataset(
            pair_labels,
            boundary,
            oo,
            os_entries,
            uo_entries,
            us_entries,
            pair_grading,
            bool(opts.get("equivariant_regular", False)),
            None,
            int(opts.get("window", 3)),
        )
    except ComplexError as exc:
        raise DatasetInvalid(str(exc)) from exc


class DatasetInvalid(ValueError):
    """Schema was fine but a dataset invariant failed (reported, not repaired)."""


_PARSERS = {
    "z2complex": parse_z2complex,
    "floer": parse_floer,
    "twisted": parse_twisted,
    "km": parse_km,
    "equivariant": parse_equivariant,
}

_EMITTERS = {
    Z2FreeComplex: emit_z2complex,
    TwistedDataset: emit_twisted,
    KMDataset: emit_km,
    EquivariantDataset: emit_equivariant,
}


def parse_dataset_doc(doc: dict):
    _require(isinstance(doc, dict), "top level must be an object")
    _require(doc.get("format_version") == FORMAT_VERSION, "missing or unsupported format_version")
    kind = doc.get("kind")
    _require(kind in _PARSERS, f"unknown dataset kind {kind!r}")
    return kind, _PARSERS[kind](doc)


def parse_dataset(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return parse_dataset_doc(doc)


def emit_dataset(obj) -> str:
    for cls, emitter in _EMITTERS.items():
        if isinstance(obj, cls):
            return canonical_json(emitter(obj))
    if isinstance(obj, FreeComplex) and obj.ring is GF2:
        return canonical_json(emit_floer(obj))
    raise TypeError(f"no emitter for {type(obj)!r}")


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
