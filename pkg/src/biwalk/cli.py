"""Command-line entry point: ``biwalk <command> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .embeddings import (
    EmbeddedGraph,
    kn_embedding,
    self_dual_report,
    trace_faces,
    vertex_face_walk_input,
)
from .errors import BadSizeError, BiwalkError
from .graphs import (
    complete_graph,
    crown_graph,
    cycle_graph,
    incidence_bundle,
    build_partitions,
    path_graph,
    simple_graph,
)
from .hamiltonian import (
    classify,
    h_digraph,
    is_form,
    principal_hamiltonian,
    skew_identity_check,
)
from .io import (
    dumps,
    fmt_float,
    graph_to_json,
    json_lines,
    matrix_to_csv,
    read_graph,
    read_rotation,
)
from .numkit import CLUSTER_TOL
from .pst import PERM_PST_TOL, PST_TOL, discrete_pst_scan, upst_generate, upst_verify
from .walk import (
    SPECTRAL_CHECK_TOL,
    build_walk,
    check_arc_reversal_equivalence,
    check_vertex_face_equivalence,
    permutation_report,
    spectral_decomposition,
)

MAX_FAMILY_N = 64

# flag name -> (environment variable, default)
TOLERANCES = {
    "cluster_tol": ("BIWALK_TOL_CLUSTER", CLUSTER_TOL),
    "check_tol": ("BIWALK_TOL_CHECK", SPECTRAL_CHECK_TOL),
    "real_tol": ("BIWALK_TOL_REAL", 1e-8),
    "weight_tol": ("BIWALK_TOL_WEIGHT", 1e-8),
    "gamma_tol": ("BIWALK_TOL_GAMMA", 1e-7),
    "equiv_tol": ("BIWALK_TOL_EQUIV", 1e-12),
    "pst_tol": ("BIWALK_TOL_PST", None),  # default depends on the command
}


class UsageError(Exception):
    pass


def _parse_family(spec: str, allowed) -> tuple[str, int]:
    name, sep, num = spec.partition(":")
    if not sep or name not in allowed:
        raise UsageError(f"unknown family {spec!r}; expected one of {', '.join(f'{a}:n' for a in allowed)}")
    try:
        n = int(num)
    except ValueError:
        raise UsageError(f"family size must be an integer, got {num!r}") from None
    if not 1 <= n <= MAX_FAMILY_N:
        raise UsageError(f"family size must lie in 1..{MAX_FAMILY_N}, got {n}")
    return name, n


BIPARTITE_FAMILIES = ("path", "cycle", "crown", "kn-embed")


def load_source(args):
    """Return ``(bundle, graph_json_or_None, embedding_or_None)``."""
    if args.family and args.input:
        raise UsageError("give either --family or --input, not both")
    if args.family:
        name, n = _parse_family(args.family, BIPARTITE_FAMILIES)
        if name == "kn-embed":
            emb = kn_embedding(n)
            return vertex_face_walk_input(emb), None, emb
        g = {"path": path_graph, "cycle": cycle_graph, "crown": crown_graph}[name](n)
    elif args.input:
        g = read_graph(args.input)
    else:
        raise UsageError("an input is required: --family SPEC or --input PATH")
    return incidence_bundle(g, build_partitions(g, args.designated)), g, None


def load_embedding(args) -> EmbeddedGraph:
    if args.family and args.input:
        raise UsageError("give either --family or --input, not both")
    if args.family:
        _, n = _parse_family(args.family, ("kn-embed",))
        return kn_embedding(n)
    if args.input:
        return trace_faces(read_rotation(args.input))
    raise UsageError("an embedding is required: --family kn-embed:n or --input ROTATION.json")


def _write(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _out_path(args, name):
    if name is None:
        return None
    if args.outdir and not os.path.isabs(name):
        return os.path.join(args.outdir, name)
    return name


def _table(rows) -> str:
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _state_label(i: int, one_based: bool) -> int:
    return i + 1 if one_based else i


def _decompose(args, bundle):
    w = build_walk(bundle)
    return w, spectral_decomposition(w, cluster_tol=args.cluster_tol, check_tol=args.check_tol)


def _hamiltonian(args, bundle):
    w, sd = _decompose(args, bundle)
    power = args.power
    if power == "auto":
        power = 2 if sd.has_pi else 1
    ham = principal_hamiltonian(sd, int(power), cluster_tol=args.cluster_tol)
    form = is_form(ham, tol=args.real_tol, exact_check=args.exact_check)
    return w, sd, ham, form


# ---------------------------------------------------------------- commands

def cmd_build(args) -> list:
    bundle, g, _ = load_source(args)
    w = build_walk(bundle)
    if args.out:
        _write(_out_path(args, args.out), matrix_to_csv(w.U))
    if args.json:
        data = {
            "states": [list(s) if isinstance(s, tuple) else s for s in bundle.labels],
            "C": bundle.C.tolist(),
            "U": w.U.tolist(),
        }
        if g is not None:
            data["graph"] = graph_to_json(g)
        _write(_out_path(args, args.json), dumps(data) + "\n")
    perm = permutation_report(w)
    rows = [("states", w.size), ("P cells", len(bundle.cells_p)), ("Q cells", len(bundle.cells_q)),
            ("connected", bundle.connected), ("permutation", perm.is_permutation)]
    if perm.is_permutation:
        rows.append(("cycles", " ".join("(" + " ".join(f"e{_state_label(i, args.one_based)}" for i in c) + ")"
                                        for c in perm.cycles)))
        rows.append(("order", perm.order))
    return rows


def cmd_spectrum(args) -> list:
    bundle, _, _ = load_source(args)
    _, sd = _decompose(args, bundle)
    if args.out:
        _write(_out_path(args, args.out), dumps(sd.to_json()) + "\n")
    rows = [("states", bundle.num_states), ("dim E_pi", sd.dim_minus_one)]
    for t, r in zip(sd.angles, sd.ranks()):
        rows.append((f"theta {fmt_float(t)}", f"rank {r}"))
    return rows


def cmd_hamiltonian(args) -> list:
    bundle, _, _ = load_source(args)
    _, _, ham, form = _hamiltonian(args, bundle)
    if args.out:
        M = form.S if form.is_form else ham.H
        _write(_out_path(args, args.out), matrix_to_csv(M))
    return [("power", ham.source_power), ("H = iS", form.is_form),
            ("max|Re H|", fmt_float(form.real_residual)), ("dim E_pi", form.dim_minus_one),
            ("C invertible", form.exact if form.exact is not None else "not checked")]


def _digraph(args, bundle):
    _, _, ham, form = _hamiltonian(args, bundle)
    if not form.is_form:
        raise BiwalkError(
            f"H is not purely imaginary (max|Re H| = {form.real_residual:.3e}); no H-digraph"
        )
    labels = [_state_label(i, args.one_based) for i in range(bundle.num_states)]
    return ham, h_digraph(form.S, weight_tol=args.weight_tol, labels=labels)


def cmd_hdigraph(args) -> list:
    bundle, _, _ = load_source(args)
    ham, hd = _digraph(args, bundle)
    if args.dot:
        _write(_out_path(args, args.dot), hd.to_dot())
    if args.json:
        _write(_out_path(args, args.json), dumps(hd.to_json()) + "\n")
    if args.out:
        _write(_out_path(args, args.out), matrix_to_csv(hd.S))
    return [("power", ham.source_power), ("vertices", hd.size), ("arcs", len(hd.arcs)),
            ("components", len(hd.components))]


def cmd_classify(args) -> list:
    bundle, _, _ = load_source(args)
    ham, hd = _digraph(args, bundle)
    rep = classify(hd)
    if args.json:
        _write(_out_path(args, args.json), dumps(rep.to_json()) + "\n")
    return [("power", ham.source_power), ("structure", rep.summary()), ("arcs", rep.num_arcs)]


def cmd_pst_scan(args) -> list:
    bundle, _, _ = load_source(args)
    w, sd = _decompose(args, bundle)
    tol = args.pst_tol if args.pst_tol is not None else PST_TOL
    rep = discrete_pst_scan(w, args.kmax, pst_tol=tol, method=args.method,
                            workers=args.workers, sd=sd if args.method == "eigen" else None)
    ob = args.one_based
    lines = json_lines(
        {"source": _state_label(e.source, ob), "target": _state_label(e.target, ob),
         "k": e.k, "fidelity": e.fidelity}
        for e in rep.events
    )
    if args.out:
        _write(_out_path(args, args.out), lines)
    else:
        sys.stdout.write(lines)
    if args.suprema:
        rows = ["source,target,max_fidelity,k"]
        for (a, b), (f, k) in sorted(rep.suprema.items()):
            rows.append(f"{_state_label(a, ob)},{_state_label(b, ob)},{fmt_float(f)},{k}")
        _write(_out_path(args, args.suprema), "\n".join(rows) + "\n")
    one_way = " ".join(f"{_state_label(a, ob)}->{_state_label(b, ob)}" for a, b in rep.one_directional)
    return [("kmax", args.kmax), ("method", args.method), ("events", len(rep.events)),
            ("one-directional", one_way or "none")]


def cmd_upst(args) -> list:
    if args.n is None:
        raise UsageError("upst needs --n (even, >= 4)")
    G = upst_generate(args.n)
    tol = args.pst_tol if args.pst_tol is not None else PERM_PST_TOL
    rep = upst_verify(G, tol)
    ob = args.one_based
    if args.out:
        rows = ["source,target,k"] + [f"{_state_label(a, ob)},{_state_label(b, ob)},{k}"
                                      for a, b, k in rep.to_rows()]
        _write(_out_path(args, args.out), "\n".join(rows) + "\n")
    if args.json:
        _write(_out_path(args, args.json), dumps({"n": args.n, "weights": G.w.tolist()}) + "\n")
    return [("vertices", G.size), ("ordered pairs", len(rep.schedule)),
            ("permutation steps", " ".join(map(str, rep.permutation_steps)))]


SIMPLE_FAMILIES = ("complete", "cycle", "path")


def cmd_check_arc_reversal(args) -> list:
    if args.family and args.input:
        raise UsageError("give either --family or --input, not both")
    if args.family:
        name, n = _parse_family(args.family, SIMPLE_FAMILIES)
        if name == "complete":
            g = complete_graph(n)
        elif name == "cycle":
            if n < 3:
                raise BadSizeError(f"cycle needs n >= 3, got {n}")
            g = simple_graph(range(n), [(i, (i + 1) % n) for i in range(n)])
        else:
            if n < 2:
                raise BadSizeError(f"path needs n >= 2, got {n}")
            g = simple_graph(range(n), [(i, i + 1) for i in range(n - 1)])
    elif args.input:
        text = Path(args.input).read_text()
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                edges.append(tuple(int(t) if t.lstrip("-").isdigit() else t
                                   for t in line.replace(",", " ").split()))
        g = simple_graph(None, edges)
    else:
        raise UsageError("an input is required: --family complete:n|cycle:n|path:n or --input EDGES")
    rep = check_arc_reversal_equivalence(g, tol=args.equiv_tol)
    return [("arcs", rep.details["states"]), ("max deviation", fmt_float(rep.deviation)), ("ok", rep.ok)]


def cmd_check_vertex_face(args) -> list:
    emb = load_embedding(args)
    rep = check_vertex_face_equivalence(emb, tol=args.equiv_tol)
    return [("states", rep.details["states"]), ("max deviation", fmt_float(rep.deviation)), ("ok", rep.ok)]


def cmd_check_identity(args) -> list:
    bundle, _, _ = load_source(args)
    w = build_walk(bundle)
    rep = skew_identity_check(w, k=args.k, l=args.l, variant=args.variant, tol=args.gamma_tol)
    rows = [("variant", rep.variant), ("gamma", fmt_float(rep.gamma)),
            ("residual", fmt_float(rep.residual)),
            ("entry rule", rep.entry_rule_ok if rep.entry_rule_ok is not None else "not biregular"),
            ("distinct adjacency eigenvalues", rep.distinct_eigenvalues)]
    if rep.skew is not None:
        ev = np.linalg.eigvals(rep.skew).imag
        rows.append(("skew spectrum (imag)", " ".join(sorted({fmt_float(round(x, 8)) for x in ev}, key=float))))
    return rows


def cmd_embed(args) -> list:
    emb = load_embedding(args)
    if args.out:
        _write(_out_path(args, args.out), dumps(emb.faces_json()) + "\n")
    if args.json:
        _write(_out_path(args, args.json), dumps(emb.rotation.to_json()) + "\n")
    sd = self_dual_report(emb)
    try:
        genus = emb.genus
    except BiwalkError:
        genus = "undefined"
    return [("vertices", emb.num_vertices), ("edges", emb.num_edges), ("faces", emb.num_faces),
            ("face lengths", " ".join(map(str, sd["face_lengths"]))), ("genus", genus),
            ("self-dual pattern", sd["self_dual"])]


COMMANDS = {
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "hamiltonian": cmd_hamiltonian,
    "hdigraph": cmd_hdigraph,
    "classify": cmd_classify,
    "pst-scan": cmd_pst_scan,
    "upst": cmd_upst,
    "check-arc-reversal": cmd_check_arc_reversal,
    "check-vertex-face": cmd_check_vertex_face,
    "check-identity": cmd_check_identity,
    "embed": cmd_embed,
}


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--family", help="path:n, cycle:n, crown:n, kn-embed:n (complete:n etc. for arc reversal)")
    src.add_argument("--input", help="graph JSON, edge list, or rotation JSON")
    src.add_argument("--designated", choices=("A", "B"), default=None,
                     help="part whose vertices define the reflection P (default B)")
    out = common.add_argument_group("output")
    out.add_argument("--out", help="main output file")
    out.add_argument("--json", help="JSON report file")
    out.add_argument("--dot", help="DOT file (hdigraph)")
    out.add_argument("--outdir", help="directory for relative output paths")
    out.add_argument("--one-based", action="store_true", help="number states from 1 in reports")
    tol = common.add_argument_group("tolerances (env BIWALK_TOL_* as fallback)")
    for name in TOLERANCES:
        tol.add_argument("--" + name.replace("_", "-"), type=_positive, default=None)
    common.add_argument("--exact-check", action=argparse.BooleanOptionalAction, default=True,
                        help="cross-check H = iS against exact invertibility of C")
    common.add_argument("--power", choices=("1", "2", "auto"), default="auto",
                        help="Hamiltonian of U or of U^2 (auto: U^2 when -1 is an eigenvalue)")

    parser = argparse.ArgumentParser(prog="biwalk", description="Bipartite discrete quantum walks.")
    parser.add_argument("--version", action="version", version=f"biwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "build": "build U and write it as CSV",
        "spectrum": "eigen-angles and eigenprojectors of U",
        "hamiltonian": "principal Hamiltonian and the H = iS test",
        "hdigraph": "H-digraph as DOT, JSON or CSV",
        "classify": "components of the H-digraph",
        "pst-scan": "scan U^k for perfect state transfer",
        "upst": "universal PST weights on K_{n-1}",
        "check-arc-reversal": "subdivision walk vs Grover arc-reversal walk",
        "check-vertex-face": "vertex-face walk built three ways",
        "check-identity": "U^2 = exp(gamma (U - U^T)) and the +-1 entry rule",
        "embed": "trace faces of a rotation system",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "pst-scan":
            p.add_argument("--kmax", type=int, required=True)
            p.add_argument("--method", choices=("eigen", "multiply"), default="eigen")
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--suprema", help="CSV of per-pair fidelity maxima")
        if name == "upst":
            p.add_argument("--n", type=int)
        if name == "check-identity":
            p.add_argument("--variant", choices=("square", "single"), default="square")
            p.add_argument("--k", type=int)
            p.add_argument("--l", type=int)
    return parser


def _apply_env(args, parser):
    for name, (env, default) in TOLERANCES.items():
        if getattr(args, name) is not None:
            continue
        if env in os.environ:
            try:
                setattr(args, name, _positive(os.environ[env]))
            except argparse.ArgumentTypeError as e:
                parser.error(f"{env}: {e}")
        else:
            setattr(args, name, default)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_env(args, parser)
    if getattr(args, "kmax", 1) < 1:
        parser.error("--kmax must be at least 1")
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        rows = COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"biwalk: error: {e}", file=sys.stderr)
        return 2
    except (BiwalkError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"biwalk: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    out = sys.stderr if args.command == "pst-scan" and not args.out else sys.stdout
    print(_table(rows), file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
