"""Canonical JSON encoding of towers, retracts, sections, BV data and
computation results.

Every document is an envelope {"kind": ..., "version": 1, "payload":
...}; scalars are printed through the field's exact string form, keys are
sorted, so serialization is byte-deterministic.
"""

from __future__ import annotations

import json

from .scalars import QQ, QQi, FloatComplexField
from .graded import GradedSpace, GradedMap
from .multilinear import MultiLinearOp
from .linfty import LInftyAlgebra, LInftyMorphism
from .transfer import RetractContext
from .polynomial import MultiPoly
from .qs import QsSpace
from .bv import BVData, OrientationCocycle

VERSION = 1

_FIELDS = {"rational": QQ, "rational-complex": QQi}


def field_by_name(name, tol=1e-10):
    if name == "float":
        return FloatComplexField(tol)
    return _FIELDS[name]


def dumps(kind, payload):
    doc = {"kind": kind, "version": VERSION, "payload": payload}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text, kind=None):
    doc = json.loads(text)
    if doc.get("version") != VERSION:
        raise ValueError("unsupported document version %r" % doc.get("version"))
    if kind is not None and doc.get("kind") != kind:
        raise ValueError("expected kind %r, got %r" % (kind, doc.get("kind")))
    return doc["kind"], doc["payload"]


# ---------------------------------------------------------------- spaces

def space_payload(space):
    return {"dims": {str(d): n for d, n in space.dims.items()}}


def space_from_payload(payload, field=None):
    return GradedSpace({int(d): n for d, n in payload["dims"].items()}, field=field)


def map_payload(gm):
    entries = []
    field = gm.field
    for d in sorted(gm.blocks):
        B = gm.blocks[d]
        for i, row in enumerate(B):
            for j, c in enumerate(row):
                if not field.is_zero(c):
                    entries.append(
                        [
                            gm.target.index(d + gm.degree, i),
                            gm.source.index(d, j),
                            field.to_json(c),
                        ]
                    )
    return {
        "degree": gm.degree,
        "source": space_payload(gm.source),
        "target": space_payload(gm.target),
        "entries": entries,
    }


def map_from_payload(payload, field):
    src = space_from_payload(payload["source"], field)
    tgt = space_from_payload(payload["target"], field)
    gm = GradedMap(src, tgt, payload["degree"])
    for out, inp, c in payload["entries"]:
        gm.set_entry(out, inp, field.from_json(c))
    return gm


# ---------------------------------------------------------------- towers

def op_payload(op):
    entries = []
    for (word, out), c in sorted(op.entries.items()):
        entries.append([list(word), out, op.field.to_json(c)])
    return entries


def algebra_payload(alg):
    return {
        "scalar": alg.field.name,
        "dims": {str(d): n for d, n in alg.space.dims.items()},
        "ops": {str(k): op_payload(op) for k, op in sorted(alg.sops.items())},
    }


def algebra_from_payload(payload, field=None):
    field = field if field is not None else field_by_name(payload["scalar"])
    space = GradedSpace({int(d): n for d, n in payload["dims"].items()}, field=field)
    sp = space.shifted(1)
    sops = {}
    for k, entries in payload["ops"].items():
        k = int(k)
        op = MultiLinearOp(sp, sp, k, 1, "sym")
        for word, out, c in entries:
            op.add_entry(tuple(word), out, field.from_json(c))
        sops[k] = op
    return LInftyAlgebra(space, sops)


def morphism_payload(mor):
    return {
        "scalar": mor.field.name,
        "source": algebra_payload(mor.source),
        "target": algebra_payload(mor.target),
        "components": {str(k): op_payload(f) for k, f in sorted(mor.components.items())},
    }


def morphism_from_payload(payload, field=None):
    field = field if field is not None else field_by_name(payload["scalar"])
    src = algebra_from_payload(payload["source"], field)
    tgt = algebra_from_payload(payload["target"], field)
    comps = {}
    for k, entries in payload["components"].items():
        k = int(k)
        f = MultiLinearOp(src.shifted_space, tgt.shifted_space, k, 0, "sym")
        for word, out, c in entries:
            f.add_entry(tuple(word), out, field.from_json(c))
        comps[k] = f
    return LInftyMorphism(src, tgt, comps)


def retract_payload(ctx, mu=None):
    out = {
        "scalar": ctx.big.field.name,
        "big_d": map_payload(ctx.big.d),
        "small_d": map_payload(ctx.small.d),
        "i": map_payload(ctx.i),
        "p": map_payload(ctx.p),
        "h": map_payload(ctx.h),
    }
    if mu is not None:
        out["mu"] = map_payload(mu)
    return out


def retract_from_payload(payload, field=None):
    from .graded import ChainComplex

    field = field if field is not None else field_by_name(payload["scalar"])
    d_big = map_from_payload(payload["big_d"], field)
    d_small = map_from_payload(payload["small_d"], field)
    i = map_from_payload(payload["i"], field)
    p = map_from_payload(payload["p"], field)
    h = map_from_payload(payload["h"], field)
    ctx = RetractContext(
        ChainComplex(d_small.source, d_small, check=False),
        ChainComplex(d_big.source, d_big, check=False),
        i,
        p,
        h,
    )
    mu = map_from_payload(payload["mu"], field) if "mu" in payload else None
    return ctx, mu


# ------------------------------------------------------------- sections

def poly_payload(p):
    return {
        "nvars": p.nvars,
        "terms": [[list(e), p.field.to_json(c)] for e, c in sorted(p.terms.items())],
    }


def poly_from_payload(payload, field):
    p = MultiPoly(payload["nvars"], field)
    for e, c in payload["terms"]:
        p.terms[tuple(e)] = field.from_json(c)
    return p


def section_payload(qs):
    return {
        "scalar": qs.field.name,
        "nvars": qs.nvars,
        "rank": qs.rank,
        "section": [poly_payload(p) for p in qs.section],
    }


def section_from_payload(payload, field=None):
    field = field if field is not None else field_by_name(payload["scalar"])
    section = [poly_from_payload(sp, field) for sp in payload["section"]]
    return QsSpace(payload["nvars"], payload["rank"], section, field=field)


def bv_payload(bv):
    return {
        "scalar": bv.field.name,
        "algebra": algebra_payload(bv.algebra),
        "action": poly_payload(bv.S),
        "sigma": [[poly_payload(p) for p in row] for row in bv.sigma],
    }


def bv_from_payload(payload, field=None):
    field = field if field is not None else field_by_name(payload["scalar"])
    alg = algebra_from_payload(payload["algebra"], field)
    S = poly_from_payload(payload["action"], field)
    sigma = [[poly_from_payload(p, field) for p in row] for row in payload["sigma"]]
    return BVData(alg, S, sigma)


# ---------------------------------------------------------- orientations

def cocycle_payload(oc, field=QQ):
    return {
        "n_vertices": oc.n_vertices,
        "fibers": [field.to_json(field.coerce(v)) for v in oc.fiber_values],
        "transitions": [
            [i, j, field.to_json(field.coerce(t))]
            for (i, j), t in sorted(oc.transitions.items())
        ],
    }


def cocycle_from_payload(payload, field=QQ):
    fibers = [field.from_json(v) for v in payload["fibers"]]
    transitions = {(i, j): field.from_json(t) for i, j, t in payload["transitions"]}
    return OrientationCocycle(payload["n_vertices"], fibers, transitions)
