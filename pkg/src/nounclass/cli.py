"""Batch command-line front end: one run = one workspace directory.

Stages communicate only via files, so each is independently runnable and
resumable. Every artifact starts with a metadata line (tool version, command,
parameters) and contains no timestamps: re-running a subcommand with identical
inputs and flags reproduces byte-identical payloads.

Exit status: 0 success, 1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .core import Prediction, ValidationError, read_jsonl, write_jsonl
from .corpus import candidate_ranks, extract_candidates
from .cluster import BackendUnavailableError, kmeans, reduce_pca, reduce_umap
from .ensemble import agreement_rate, ensemble_vote, frequency_baseline, random_baseline
from .prefixes import (
    ClusterProfile,
    PrefixInventory,
    cluster_predictions,
    detect_innovations,
    map_profiles,
    profile_cluster,
)
from .report import (
    discovery_summary,
    internal_consistency,
    label_accuracy,
    load_reference_values,
    plot_clusters,
    render_text_report,
)
from .store import load_embeddings, load_paradigms
from .synth import PRESET_NAMES, generate_pair, preset, write_pair
from .transfer import classify_corpus

log = logging.getLogger("nounclass")

WORKSPACE_ENV = "NOUNCLASS_WORKSPACE"

DEFAULTS = {
    "k": 5,
    "threshold": 0.60,
    "dim": 50,
    "clusters": 12,
    "seed": 42,
    "w_transfer": 1.0,
    "w_cluster": 0.8,
    "min_conf": 0.70,
    "min_len": 3,
    "min_freq": 2,
    "min_consistency": 90.0,
    "min_size": 20,
    "max_iter": 300,
    "tol": 1e-6,
    "reduction": "pca",
    "method": "frequency",
    "exclude_self": False,
    "require_multi": False,
    "preset": "overlap60",
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 for usage problems, not argparse's 2
        raise UsageError(f"{self.prog}: {message}")


def _meta(command: str, params: dict) -> dict:
    return {
        "tool": "nounclass",
        "version": __version__,
        "command": command,
        "params": {k: v for k, v in sorted(params.items()) if v is not None},
    }


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(
        json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )


def _read_word_list(path: Path) -> list[str]:
    return [w.strip() for w in path.read_text(encoding="utf-8").splitlines() if w.strip()]


def _read_predictions(path: Path) -> list[Prediction]:
    _, records = read_jsonl(path)
    return [Prediction.from_record(r) for r in records]


def _load_inventory(path: str | None) -> PrefixInventory:
    return PrefixInventory.load(path) if path else PrefixInventory.default()


def _resolve(args: argparse.Namespace, config: dict) -> argparse.Namespace:
    """Fill unset flags from the config file, then from built-in defaults."""
    for key, value in vars(args).items():
        if value is not None:
            continue
        if key in config:
            setattr(args, key, config[key])
        elif key in DEFAULTS:
            setattr(args, key, DEFAULTS[key])
    return args


def _workspace(args: argparse.Namespace) -> Path:
    root = args.workspace or os.environ.get(WORKSPACE_ENV) or "."
    ws = Path(root)
    ws.mkdir(parents=True, exist_ok=True)
    return ws


# ---------------------------------------------------------------------------
# Stage implementations (shared between subcommands and `pipeline`)
# ---------------------------------------------------------------------------


def run_extract(args) -> dict:
    ws = _workspace(args)
    corpus_path = Path(args.corpus)
    stoplist = frozenset(_read_word_list(Path(args.stoplist))) if args.stoplist else None
    with corpus_path.open("r", encoding="utf-8", errors="replace") as fh:
        candidates, stats = extract_candidates(
            fh, min_len=args.min_len, min_freq=args.min_freq, stoplist=stoplist
        )
    out = ws / "candidates.txt"
    out.write_text("".join(w + "\n" for w in candidates), encoding="utf-8")
    stats_rec = stats.to_record()
    _write_json(
        ws / "corpus_stats.json",
        {"meta": _meta("extract", {"corpus": str(corpus_path), "min_len": args.min_len,
                                   "min_freq": args.min_freq}),
         "stats": stats_rec},
    )
    log.info("extract: %d candidates from %d types", stats.candidates, stats.types)
    return {"candidates": out, "stats": stats_rec}


def run_transfer(args) -> dict:
    ws = _workspace(args)
    source = load_embeddings(Path(args.source))
    if args.paradigms:
        paradigms = load_paradigms(Path(args.paradigms))
        source = source.with_labels(paradigms.entries)
    if not source.fully_labeled:
        raise ValidationError(
            "source embeddings are not fully labeled; provide --paradigms or inline labels"
        )
    target = load_embeddings(Path(args.target))
    if args.words:
        wanted = _read_word_list(Path(args.words))
        targets = [target.entry(w) for w in wanted if w in target]
        missing = sum(1 for w in wanted if w not in target)
        if missing:
            log.warning("transfer: %d candidate words missing from target embeddings", missing)
    else:
        targets = list(target)

    result = classify_corpus(
        targets, source, k=args.k, threshold=args.threshold, exclude_self=args.exclude_self
    )
    meta = _meta("transfer", {"k": args.k, "threshold": args.threshold,
                              "source": str(args.source), "target": str(args.target),
                              "exclude_self": args.exclude_self})
    meta["summary"] = result.summary()
    write_jsonl(ws / "transfer.jsonl", (p.to_record() for p in result.retained), meta=meta)
    log.info("transfer: retained %d of %d attempted", result.retained_count, result.attempted)
    return {"result": result, "path": ws / "transfer.jsonl"}


def run_cluster(args) -> dict:
    ws = _workspace(args)
    store = load_embeddings(Path(args.embeddings))
    if args.words:
        wanted = _read_word_list(Path(args.words))
    else:
        wanted = list(store.words)
    words, matrix, missing = store.subset(wanted)
    if missing:
        log.warning("cluster: %d words missing from embeddings, skipped", len(missing))
    if not words:
        raise ValidationError("cluster: no candidate words have embeddings")

    if args.reduction == "umap":
        reduced = reduce_umap(words, matrix, d=args.dim, seed=args.seed)
    else:
        reduced = reduce_pca(words, matrix, d=args.dim)
    clustering = kmeans(reduced, k=args.clusters, seed=args.seed,
                        max_iter=args.max_iter, tol=args.tol)

    meta = _meta("cluster", {"embeddings": str(args.embeddings), "dim": args.dim,
                             "clusters": args.clusters, "seed": args.seed,
                             "reduction": args.reduction})
    meta.update({
        "k": clustering.k,
        "seed": clustering.seed,
        "inertia": clustering.inertia,
        "iterations": clustering.iterations,
        "rng": clustering.rng,
        "reduction": {"method": reduced.method, "d": reduced.d, "params": reduced.params},
        "missing_words": len(missing),
    })
    write_jsonl(
        ws / "clusters.jsonl",
        ({"word": w, "cluster": c} for w, c in clustering.assignments.items()),
        meta=meta,
    )
    write_jsonl(
        ws / "reduced.jsonl",
        ({"word": w, "coords": [float(x) for x in reduced.coords[i]]}
         for i, w in enumerate(reduced.words)),
        meta=_meta("cluster.reduced", {"method": reduced.method, "d": reduced.d}),
    )
    log.info("cluster: %d words into k=%d, inertia %.4f after %d iterations",
             len(words), clustering.k, clustering.inertia, clustering.iterations)
    return {"clustering": clustering, "reduced": reduced, "path": ws / "clusters.jsonl"}


def _load_clustering(path: Path):
    from .cluster import Clustering
    import numpy as np

    meta, records = read_jsonl(path)
    if meta is None:
        raise ValidationError(f"{path}: missing clustering metadata line")
    assignments = {r["word"]: int(r["cluster"]) for r in records}
    k = int(meta["k"])
    return Clustering(
        assignments=assignments,
        centroids=np.zeros((k, 0)),
        inertia=float(meta["inertia"]),
        seed=int(meta["seed"]),
        iterations=int(meta["iterations"]),
        inertia_history=[],
        rng=meta.get("rng", ""),
    )


def run_map(args) -> dict:
    ws = _workspace(args)
    clustering = _load_clustering(Path(args.clusters_file))
    inventory = _load_inventory(args.inventory)
    members = {cid: cluster_words for cid, cluster_words in clustering.members().items()
               if cluster_words}
    profiles = [profile_cluster(words, cluster_id=cid) for cid, words in sorted(members.items())]
    profiles = map_profiles(profiles, inventory)

    ranks = None
    if args.candidates:
        ranks = candidate_ranks(_read_word_list(Path(args.candidates)))
    innovations = detect_innovations(
        profiles, inventory,
        min_consistency=args.min_consistency, min_size=args.min_size,
        frequencies=ranks, members=members,
    )
    predictions = cluster_predictions(clustering, profiles)

    params = {"inventory": args.inventory or "builtin",
              "min_consistency": args.min_consistency, "min_size": args.min_size}
    write_jsonl(ws / "profiles.jsonl", (p.to_record() for p in profiles),
                meta=_meta("map", params))
    write_jsonl(ws / "cluster_predictions.jsonl", (p.to_record() for p in predictions),
                meta=_meta("map.predictions", params))
    write_jsonl(ws / "innovations.jsonl", (i.to_record() for i in innovations),
                meta=_meta("map.innovations", params))
    log.info("map: %d profiles, %d innovation candidates", len(profiles), len(innovations))
    return {"profiles": profiles, "predictions": predictions, "innovations": innovations}


def run_ensemble(args) -> dict:
    ws = _workspace(args)
    transfer_preds = _read_predictions(Path(args.transfer_file))
    cluster_preds = _read_predictions(Path(args.cluster_predictions))
    weights = {"transfer": args.w_transfer, "clustering": args.w_cluster}
    output = ensemble_vote(
        transfer_preds, cluster_preds, weights=weights, min_conf=args.min_conf,
        require_multi=args.require_multi,
    )
    params = {"w_transfer": args.w_transfer, "w_cluster": args.w_cluster,
              "min_conf": args.min_conf, "require_multi": args.require_multi}
    write_jsonl(ws / "ensemble_accepted.jsonl", (r.to_record() for r in output.accepted),
                meta=_meta("ensemble", params))
    write_jsonl(ws / "ensemble_rejected.jsonl", (r.to_record() for r in output.rejected),
                meta=_meta("ensemble.rejected", params))
    _write_json(ws / "ensemble_summary.json",
                {"meta": _meta("ensemble.summary", params), "summary": output.summary()})
    log.info("ensemble: accepted %d, rejected %d", len(output.accepted), len(output.rejected))
    return {"output": output}


def run_baseline(args) -> dict:
    ws = _workspace(args)
    paradigms = load_paradigms(Path(args.paradigms))
    targets = _read_word_list(Path(args.targets))
    if args.method == "frequency":
        preds = frequency_baseline(paradigms.class_distribution(), targets)
    elif args.method == "random":
        preds = random_baseline(paradigms.class_set, targets, seed=args.seed)
    else:
        raise ValidationError(f"unknown baseline method {args.method!r}")
    out = ws / f"baseline_{args.method}.jsonl"
    write_jsonl(out, (p.to_record() for p in preds),
                meta=_meta("baseline", {"method": args.method, "seed": args.seed}))
    log.info("baseline %s: %d predictions", args.method, len(preds))
    return {"predictions": preds, "path": out}


def run_agreement(args) -> dict:
    ws = _workspace(args)
    a = _read_predictions(Path(args.a))
    b = _read_predictions(Path(args.b))
    rate = agreement_rate(a, b)
    result = {"meta": _meta("agreement", {"a": str(args.a), "b": str(args.b)}),
              "agreement_rate": rate,
              "shared_words": len({p.word for p in a if p.noun_class != "unknown"}
                                  & {p.word for p in b if p.noun_class != "unknown"})}
    _write_json(ws / "agreement.json", result)
    print("agreement rate: " + ("absent (no shared words)" if rate is None else f"{rate:.2f}%"))
    return result


def run_report(args) -> dict:
    ws = _workspace(args)
    accepted_meta, accepted_recs = read_jsonl(ws / "ensemble_accepted.jsonl")
    from .ensemble import EnsembleResult, MethodVote

    accepted = []
    for r in accepted_recs:
        votes = {m: MethodVote(v["class"], v["confidence"], v["weight"])
                 for m, v in r.get("per_method", {}).items()}
        accepted.append(EnsembleResult(
            word=r["word"], final_class=r["class"],
            combined_confidence=r["combined_confidence"],
            per_method=votes, agreed=r.get("agreed", False),
            raw_score=r.get("raw_score", 0.0),
        ))

    profiles = []
    prof_path = ws / "profiles.jsonl"
    if prof_path.exists():
        _, prof_recs = read_jsonl(prof_path)
        profiles = [
            ClusterProfile(
                cluster_id=r["cluster"], size=r["size"],
                dominant_prefix=r["dominant_prefix"], consistency=r["consistency"],
                prefix_histogram=r.get("prefix_histogram", {}),
                mapped_class=r.get("class"), ambiguous=r.get("ambiguous", False),
                matched_prefix=r.get("matched_prefix"),
                candidate_classes=r.get("candidate_classes", []),
            )
            for r in prof_recs
        ]

    from .prefixes import InnovationReport

    innovations = []
    innov_path = ws / "innovations.jsonl"
    if innov_path.exists():
        _, innov_recs = read_jsonl(innov_path)
        innovations = [
            InnovationReport(
                cluster_id=r["cluster"], dominant_prefix=r["dominant_prefix"],
                consistency=r["consistency"], size=r["size"],
                exemplars=r.get("exemplars", []), mapped_class=r.get("class"),
                reason=r.get("reason", ""),
            )
            for r in innov_recs
        ]

    extra: dict = {}
    t_path, c_path = ws / "transfer.jsonl", ws / "cluster_predictions.jsonl"
    if t_path.exists() and c_path.exists():
        extra["agreement_rate"] = agreement_rate(
            _read_predictions(t_path), _read_predictions(c_path)
        )

    summary = discovery_summary(accepted, profiles, innovations, extra=extra)

    if args.gold:
        gold = load_paradigms(Path(args.gold)).entries
        acc = label_accuracy(accepted, gold)
        summary["label_accuracy"] = acc.to_record() if acc else None
    if args.generated_forms:
        _, form_recs = read_jsonl(Path(args.generated_forms))
        forms = {r["word"]: r["generated"] for r in form_recs}
        summary["internal_consistency"] = internal_consistency(accepted, forms).to_record()

    reference = load_reference_values() if args.reference else None
    text = render_text_report(summary, reference)
    (ws / "report.txt").write_text(text, encoding="utf-8")
    _write_json(ws / "summary.json", {"meta": _meta("report", {}), "summary": summary})

    if args.plot:
        reduced_path = ws / "reduced.jsonl"
        clusters_path = ws / "clusters.jsonl"
        if not (reduced_path.exists() and clusters_path.exists()):
            raise ValidationError("--plot needs reduced.jsonl and clusters.jsonl in the workspace")
        import numpy as np
        from .cluster import ReducedMatrix

        _, coord_recs = read_jsonl(reduced_path)
        words = [r["word"] for r in coord_recs]
        coords = np.array([r["coords"] for r in coord_recs])
        reduced = ReducedMatrix(words, coords, method="file", d=coords.shape[1])
        clustering = _load_clustering(clusters_path)
        plot_clusters(reduced, clustering, ws / args.plot)

    print(text, end="")
    return {"summary": summary}


def run_synth(args) -> dict:
    ws = _workspace(args)
    if args.spec:
        from .synth import ClassSpec, Innovation, SynthSpec

        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        spec = SynthSpec(
            classes=[ClassSpec(c["noun_class"], c["prefix"], c.get("weight", 1.0))
                     for c in raw["classes"]],
            stems=raw["stems"],
            cognate_overlap=raw["cognate_overlap"],
            innovations=[Innovation(i["novel_prefix"], i["replaced_prefix"], i["rate"])
                         for i in raw.get("innovations", [])],
            seed=raw.get("seed", args.seed),
            embedding_dim=raw.get("embedding_dim", 64),
            noise=raw.get("noise", 0.0),
        )
    else:
        spec = preset(args.preset, seed=args.seed)
    pair = generate_pair(spec)
    outdir = Path(args.out) if args.out else ws / "synth"
    paths = write_pair(pair, outdir)
    log.info("synth: wrote %d files to %s", len(paths), outdir)
    print(f"synthetic pair written to {outdir}")
    return {"paths": paths, "pair": pair}


def run_pipeline(args) -> dict:
    ws = _workspace(args)
    args.workspace = str(ws)

    extract_out = run_extract(args)

    args.words = str(extract_out["candidates"])
    run_transfer(args)

    args.embeddings = args.target
    cluster_out = run_cluster(args)

    args.clusters_file = str(ws / "clusters.jsonl")
    args.candidates = str(extract_out["candidates"])
    run_map(args)

    args.transfer_file = str(ws / "transfer.jsonl")
    args.cluster_predictions = str(ws / "cluster_predictions.jsonl")
    run_ensemble(args)

    return run_report(args)


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def _add_common(p: Parser) -> None:
    p.add_argument("--workspace", help=f"output directory (default ${WORKSPACE_ENV} or .)")
    p.add_argument("--config", help="JSON config file; explicit flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true", default=None)


def _add_extract_flags(p: Parser) -> None:
    p.add_argument("--corpus", required=True, help="plain-text corpus, one sentence per line")
    p.add_argument("--min-len", type=int, dest="min_len")
    p.add_argument("--min-freq", type=int, dest="min_freq")
    p.add_argument("--stoplist", help="file with one stopword per line")


def _add_transfer_flags(p: Parser, required: bool) -> None:
    p.add_argument("--source", required=required, help="labeled source .embjsonl")
    p.add_argument("--target", required=required, help="target .embjsonl")
    p.add_argument("--paradigms", help="paradigm file supplying source labels")
    p.add_argument("--k", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--exclude-self", action="store_true", default=None, dest="exclude_self")


def _add_cluster_flags(p: Parser) -> None:
    p.add_argument("--dim", type=int)
    p.add_argument("--clusters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--reduction", choices=("pca", "umap"))
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--tol", type=float)


def _add_map_flags(p: Parser) -> None:
    p.add_argument("--inventory", help="prefix inventory file (default: built-in Bantu table)")
    p.add_argument("--min-consistency", type=float, dest="min_consistency")
    p.add_argument("--min-size", type=int, dest="min_size")


def _add_ensemble_flags(p: Parser) -> None:
    p.add_argument("--w-transfer", type=float, dest="w_transfer")
    p.add_argument("--w-cluster", type=float, dest="w_cluster")
    p.add_argument("--min-conf", type=float, dest="min_conf")
    p.add_argument("--require-multi", action="store_true", default=None, dest="require_multi")


def build_parser() -> Parser:
    parser = Parser(prog="nounclass", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nounclass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract noun-candidate words from a corpus")
    _add_common(p)
    _add_extract_flags(p)
    p.set_defaults(func=run_extract)

    p = sub.add_parser("transfer", help="KNN-classify target words against labeled source")
    _add_common(p)
    _add_transfer_flags(p, required=True)
    p.add_argument("--words", help="restrict targets to this word-list file")
    p.set_defaults(func=run_transfer)

    p = sub.add_parser("cluster", help="reduce and K-means-cluster candidate embeddings")
    _add_common(p)
    p.add_argument("--embeddings", required=True, help="target .embjsonl")
    p.add_argument("--words", help="candidate word-list file")
    _add_cluster_flags(p)
    p.set_defaults(func=run_cluster)

    p = sub.add_parser("map", help="profile clusters, map prefixes to classes, detect innovations")
    _add_common(p)
    p.add_argument("--clusters", required=True, dest="clusters_file",
                   help="clusters.jsonl from the cluster stage")
    p.add_argument("--candidates", help="candidate list for frequency-ranked exemplars")
    _add_map_flags(p)
    p.set_defaults(func=run_map)

    p = sub.add_parser("ensemble", help="weighted vote over transfer and clustering predictions")
    _add_common(p)
    p.add_argument("--transfer", required=True, dest="transfer_file")
    p.add_argument("--cluster-predictions", required=True, dest="cluster_predictions")
    _add_ensemble_flags(p)
    p.set_defaults(func=run_ensemble)

    p = sub.add_parser("baseline", help="frequency or random baseline predictions")
    _add_common(p)
    p.add_argument("--method", choices=("frequency", "random"))
    p.add_argument("--paradigms", required=True)
    p.add_argument("--targets", required=True, help="word-list file")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=run_baseline)

    p = sub.add_parser("agreement", help="cross-method agreement rate of two prediction files")
    _add_common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=run_agreement)

    p = sub.add_parser("report", help="summaries and metrics from workspace artifacts")
    _add_common(p)
    p.add_argument("--gold", help="paradigm file with gold classes")
    p.add_argument("--generated-forms", dest="generated_forms",
                   help="jsonl of {word, generated} surface forms")
    p.add_argument("--plot", help="write a 2-D cluster scatter to this image file")
    p.add_argument("--reference", action="store_true", default=None,
                   help="include non-normative reference values")
    p.set_defaults(func=run_report)

    p = sub.add_parser("synth", help="generate a synthetic language pair with gold labels")
    _add_common(p)
    p.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("--spec", help="JSON file describing a custom generation spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default <workspace>/synth)")
    p.set_defaults(func=run_synth)

    p = sub.add_parser("pipeline", help="extract -> transfer -> cluster -> map -> ensemble -> report")
    _add_common(p)
    _add_transfer_flags(p, required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-len", type=int, dest="min_len")
    p.add_argument("--min-freq", type=int, dest="min_freq")
    p.add_argument("--stoplist")
    _add_cluster_flags(p)
    _add_map_flags(p)
    _add_ensemble_flags(p)
    p.add_argument("--gold", help="paradigm file with gold classes for the report")
    p.add_argument("--generated-forms", dest="generated_forms")
    p.add_argument("--plot")
    p.add_argument("--reference", action="store_true", default=None)
    p.set_defaults(func=run_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    config = {}
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            print(f"config file not found: {args.config}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(f"config file {args.config} is not valid JSON: {exc}", file=sys.stderr)
            return 1
    args = _resolve(args, config)
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.WARNING)

    try:
        args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValidationError, BackendUnavailableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        path = exc.filename or str(exc)
        print(f"I/O error: missing input {path}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
