"""Command line interface: dataset ingestion, dispatch, and reports.

Every run prints a human-readable section followed by "---" and a JSON
machine-readable section.  Exit codes: 0 success, 1 validation failure,
2 schema error.  All mathematical parameters are explicit flags; environment
variables may only set verbosity (POLARFLOER_VERBOSE) and the default window
(POLARFLOER_WINDOW).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import equiv_floer, io, morse_km, twisted
from .complexes import ComplexError, ModuleReport, homology
from .equivariant import a_f2, borel, comparison_F, finite_type_block
from .rings import parse_ring_element
from .spectral import spectral_pages
from .twisted import build_twisted, e2_page, porteous_coefficient, verify_T_invertible

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SCHEMA = 2


def _report_json(rep: ModuleReport):
    return {
        "ring": rep.ring_name,
        "free_rank": rep.free_rank,
        "torsion": list(rep.torsion_strings()),
    }


def _emit(human_lines, machine, out=None):
    text = "\n".join(human_lines) + "\n---\n" + json.dumps(machine, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_window(args) -> int | None:
    if args.window is not None:
        return args.window
    env = os.environ.get("POLARFLOER_WINDOW")
    return int(env) if env else None


def _witness_entries(witness, limit=6):
    """Nonzero positions of an offending matrix product, for error reports."""
    out = []
    for i, row in enumerate(witness):
        for j, x in enumerate(row):
            nonzero = x.any() if isinstance(x, np.ndarray) else (
                not x.is_zero() if hasattr(x, "is_zero") else bool(x)
            )
            if nonzero:
                out.append((i, j, str(x)))
                if len(out) >= limit:
                    return out
    return out


def cmd_validate(args):
    kind, ds = io.parse_dataset(args.dataset)
    human = [f"dataset kind: {kind}", "schema: ok"]
    machine = {"command": "validate", "kind": kind, "ok": True}
    if kind == "km":
        rep = morse_km.validate_relations(ds)
        for name, r in rep.items():
            if not isinstance(r, dict):
                continue
            human.append(f"relation {name}: {'ok' if r['ok'] else 'FAIL'}")
            if not r["ok"] and r["witness"] is not None:
                human.append(f"  witness entries: {_witness_entries(r['witness'])}")
        machine["relations"] = {
            name: r["ok"] for name, r in rep.items() if isinstance(r, dict)
        }
        machine["ok"] = rep["ok"]
        if not rep["ok"]:
            _emit(human, machine, args.out)
            return EXIT_INVALID
    elif kind == "equivariant":
        w = _default_window(args) or ds.min_window()
        try:
            equiv_floer.assemble_equivariant(ds, w)
            human.append(f"relations at window {w}: ok")
        except ComplexError as exc:
            human.append(f"relations at window {w}: FAIL ({exc})")
            machine["ok"] = False
            _emit(human, machine, args.out)
            return EXIT_INVALID
    human.append("valid")
    _emit(human, machine, args.out)
    return EXIT_OK


def cmd_homology(args):
    kind, ds = io.parse_dataset(args.dataset)
    human = [f"dataset kind: {kind}"]
    machine = {"command": "homology", "kind": kind, "ok": True}
    if kind == "z2complex":
        tc = a_f2(ds)
        rep_t = tc.homology_f2t()
        rep_b = homology(borel(ds))
        cmp = comparison_F(ds)
        human.append(f"A_F2 side (F2[t] via T): {rep_t}")
        human.append(f"Borel side: {rep_b}")
        human.append(f"comparison map quasi-isomorphism: {cmp.is_quasi_iso()}")
        machine["a_f2"] = _report_json(rep_t)
        machine["borel"] = _report_json(rep_b)
        machine["quasi_iso"] = cmp.is_quasi_iso()
    elif kind == "floer":
        rep = homology(ds)
        human.append(f"H(V): {rep}")
        machine["homology"] = _report_json(rep)
    elif kind == "twisted":
        w = _default_window(args) or 4
        b = build_twisted(ds, w)
        rep = homology(b.laurent)
        human.append(f"twisted homology over F2[t,t^-1]: {rep}")
        machine["homology"] = _report_json(rep)
    elif kind == "km":
        kt = morse_km.assemble(ds)
        reps = {}
        for which in ("check", "hat", "bar"):
            if ds.lift is not None:
                reps[which] = kt.tcomplex(which).homology_f2t()
            else:
                reps[which] = homology(getattr(kt, which))
            human.append(f"H({which}): {reps[which]}")
        machine["reports"] = {k: _report_json(v) for k, v in reps.items()}
    else:
        w = _default_window(args) or ds.min_window()
        kt = equiv_floer.assemble_equivariant(ds, w)
        for which in ("check", "hat", "bar"):
            rep = kt.tcomplex(which).homology_f2t()
            human.append(f"H({which}) over F2[t] (window {w}): {rep}")
            machine[which] = _report_json(rep)
    _emit(human, machine, args.out)
    return EXIT_OK


def cmd_km(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind != "km":
        raise io.DatasetInvalid("km command needs a km dataset")
    rep = morse_km.validate_relations(ds)
    if not rep["ok"]:
        _emit(["relations: FAIL"], {"command": "km", "ok": False}, args.out)
        return EXIT_INVALID
    kt = morse_km.assemble(ds, rep)
    tri = morse_km.verify_triangle(kt)
    human = [
        "relations: ok",
        f"homology dims (F2): hat={tri['dims']['hat']} check={tri['dims']['check']} bar={tri['dims']['bar']}",
        f"triangle exact: {tri['exact']}",
    ]
    machine = {"command": "km", "ok": tri["exact"], "dims": tri["dims"], "exact": tri["exact"]}
    _emit(human, machine, args.out)
    return EXIT_OK if tri["exact"] else EXIT_INVALID


def cmd_twisted(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind != "twisted":
        raise io.DatasetInvalid("twisted command needs a twisted dataset")
    w = _default_window(args) or 4
    b = build_twisted(ds, w)
    rep = homology(b.laurent)
    tinv = verify_T_invertible(b)
    e2 = e2_page(ds)
    sp = spectral_pages(b.laurent, 3)
    human = [
        f"window: {w}",
        f"twisted homology: {rep}",
        f"T invertible: {tinv}",
        f"E2 page: {e2}",
        f"spectral E2: {sp.page(2).total}",
        f"degeneration page: {sp.degeneration_page}",
    ]
    machine = {
        "command": "twisted",
        "ok": True,
        "homology": _report_json(rep),
        "t_invertible": tinv,
        "e2": _report_json(e2),
        "degeneration_page": sp.degeneration_page,
    }
    _emit(human, machine, args.out)
    return EXIT_OK


def cmd_localize(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind != "equivariant":
        raise io.DatasetInvalid("localize needs an equivariant dataset")
    loc = equiv_floer.localization_map(ds, _default_window(args))
    human = [
        f"H(check) over F2[t]: {loc.check_report}",
        f"H(hat) over F2[t]: {loc.hat_report}",
        f"H(bar) over F2[t,t^-1]: {loc.bar_laurent}",
        f"hat vanishes after inverting t: {loc.hat_localized_zero}",
        f"localized ranks: check={loc.check_localized_rank} bar={loc.bar_localized_rank}",
        f"ranks equal: {loc.ranks_equal}",
    ]
    if loc.notes:
        human.append(f"note: {loc.notes}")
    machine = {
        "command": "localize",
        "ok": bool(loc.hat_localized_zero and loc.ranks_equal in (True, None)),
        "check": _report_json(loc.check_report),
        "hat": _report_json(loc.hat_report),
        "bar": _report_json(loc.bar_laurent),
        "hat_localized_zero": loc.hat_localized_zero,
        "check_localized_rank": loc.check_localized_rank,
        "bar_localized_rank": loc.bar_localized_rank,
        "ranks_equal": loc.ranks_equal,
    }
    _emit(human, machine, args.out)
    return EXIT_OK if machine["ok"] else EXIT_INVALID


def cmd_steenrod(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind != "floer":
        raise io.DatasetInvalid("steenrod needs a floer (GF(2)) complex")
    res = equiv_floer.steenrod_square(ds, _default_window(args))
    human = [
        f"homology rank: {res.homology_rank}",
        f"Sq (x) F2[t,t^-1] is an isomorphism: {res.iso_after_localization}",
    ]
    if res.degree_doubles is not None:
        human.append(f"degree doubling: {res.degree_doubles}")
    machine = {
        "command": "steenrod",
        "ok": res.iso_after_localization,
        "rank": res.homology_rank,
        "iso": res.iso_after_localization,
        "degree_doubles": res.degree_doubles,
    }
    _emit(human, machine, args.out)
    return EXIT_OK if res.iso_after_localization else EXIT_INVALID


def cmd_kunneth(args):
    rep = equiv_floer.kunneth_point_model(args.shift, _default_window(args) or 3)
    human = [
        f"shift: {args.shift}",
        f"bilinear over F2[t,t^-1]: {rep['bilinear']}",
        f"t^0 (x) t^0 -> t^{args.shift}: {rep['formula_holds']}",
        f"derived-tensor isomorphism on the point model: {rep['iso_pattern']}",
        f"windowed derived tensor: {rep['windowed_derived_report']}",
    ]
    machine = {
        "command": "kunneth",
        "ok": rep["iso_pattern"],
        "bilinear": rep["bilinear"],
        "formula": rep["formula_holds"],
        "iso": rep["iso_pattern"],
    }
    _emit(human, machine, args.out)
    return EXIT_OK if rep["iso_pattern"] else EXIT_INVALID


def cmd_ss_compare(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind != "equivariant":
        raise io.DatasetInvalid("ss-compare needs an equivariant dataset")
    levels = args.truncate or 6
    tower = equiv_floer.truncation_tower(ds, levels, _default_window(args))
    human = [f"check homology over F2[t]: {tower['check_f2t']}"]
    for n, rep in tower["reports"].items():
        human.append(f"truncation {n}: {rep} (dim {tower['dims'][n]})")
    human.append(f"torsion bound: {tower['torsion_bound']}")
    human.append(f"stabilized beyond bound: {tower['stabilized']}")
    human.append(f"tower maps are chain maps with monotone dims: {tower['tower_maps_ok']}")
    machine = {
        "command": "ss-compare",
        "ok": bool(tower["tower_maps_ok"] and tower["stabilized"] in (True, None)),
        "dims": tower["dims"],
        "torsion_bound": tower["torsion_bound"],
        "stabilized": tower["stabilized"],
        "tower_maps_ok": tower["tower_maps_ok"],
    }
    _emit(human, machine, args.out)
    return EXIT_OK if machine["ok"] else EXIT_INVALID


def cmd_smith(args):
    kind, ds = io.parse_dataset(args.dataset)
    if kind == "floer":
        ds, _ = equiv_floer.diagonal_model(ds)
    elif kind != "equivariant":
        raise io.DatasetInvalid("smith needs a floer complex or an equivariant dataset")
    if ds.full_complex is None:
        raise io.DatasetInvalid("smith needs the non-equivariant total complex")
    rep = equiv_floer.smith_report(ds, _default_window(args))
    human = [
        f"dim_F2 HF(upstairs): {rep['dim_upstairs']}",
        f"rank_F2[t,t^-1] HF_tw: {rep['rank_twisted']}",
        f"inequality holds: {rep['inequality_holds']}",
    ]
    machine = {
        "command": "smith",
        "ok": rep["inequality_holds"],
        "dim_upstairs": rep["dim_upstairs"],
        "rank_twisted": rep["rank_twisted"],
    }
    _emit(human, machine, args.out)
    return EXIT_OK if rep["inequality_holds"] else EXIT_INVALID


def cmd_porteous(args):
    try:
        sw = parse_ring_element(
            __import__("polarfloer.rings", fromlist=["F2T"]).F2T, args.sw_class
        )
    except ValueError as exc:
        raise io.SchemaError(str(exc)) from exc
    coeff = porteous_coefficient(sw, args.n, args.pairing)
    rep = twisted.two_point_twisted(args.n, coeff)
    human = [
        f"w(eta) = {sw}",
        f"<w_{args.n}(-eta), [M]> = {coeff}",
        f"two-point twisted homology: {rep}",
    ]
    machine = {
        "command": "porteous",
        "ok": True,
        "coefficient": coeff,
        "homology": _report_json(rep),
    }
    _emit(human, machine, args.out)
    return EXIT_OK


def cmd_blocks(args):
    blk = finite_type_block(args.block, args.window or 4)
    text = io.emit_dataset(blk)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polarfloer",
        description="chain-level Z/2-equivariant and polarization-twisted Floer algebra",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, dataset=True):
        p.add_argument("--window", type=int, default=None, help="eigenvalue window size")
        p.add_argument("--truncate", type=int, default=None, help="truncation level(s)")
        p.add_argument("--out", default=None, help="write the report to a file")
        if dataset:
            p.add_argument("dataset", help="dataset file (JSON)")

    for name, fn in [
        ("validate", cmd_validate),
        ("homology", cmd_homology),
        ("km", cmd_km),
        ("twisted", cmd_twisted),
        ("localize", cmd_localize),
        ("steenrod", cmd_steenrod),
        ("ss-compare", cmd_ss_compare),
        ("smith", cmd_smith),
    ]:
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("kunneth")
    p.add_argument("--shift", type=int, default=0, help="point-model spectral-flow shift")
    common(p, dataset=False)
    p.set_defaults(fn=cmd_kunneth)

    p = sub.add_parser("porteous")
    p.add_argument("--sw-class", required=True, help='total SW class, e.g. "1+t"')
    p.add_argument("--n", type=int, required=True, help="top degree")
    p.add_argument("--pairing", type=int, default=1, help="fundamental-class pairing bit")
    common(p, dataset=False)
    p.set_defaults(fn=cmd_porteous)

    p = sub.add_parser("blocks")
    p.add_argument("block", choices=["B0", "Bplus", "Bminus", "Binfty"])
    common(p, dataset=False)
    p.set_defaults(fn=cmd_blocks)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        code = args.fn(args)
    except io.SchemaError as exc:
        sys.stderr.write(f"schema error: {exc}\n")
        return EXIT_SCHEMA
    except io.DatasetInvalid as exc:
        sys.stderr.write(f"invalid dataset: {exc}\n")
        return EXIT_INVALID
    except ComplexError as exc:
        sys.stderr.write(f"invalid dataset: {exc}\n")
        return EXIT_INVALID
    except FileNotFoundError as exc:
        sys.stderr.write(f"schema error: {exc}\n")
        return EXIT_SCHEMA
    if os.environ.get("POLARFLOER_VERBOSE"):
        sys.stderr.write(f"elapsed: {time.time() - t0:.3f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
