"""Batch command-line front end.

Subcommands: ingest, split, extract, cluster, evaluate, nermatch. Every
command writes its artifact to ``--out`` and prints a one-line summary.
Exit status is 0 on success, 1 on bad input files and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import __version__
from .clustering import (
    EmbeddingFormatError,
    build_cluster_reference,
    cluster_report,
    dump_cluster_report,
    extract_cluster_keyphrases,
    kmeans,
    load_embeddings,
)
from .corpus import CorpusError, parse_corpus, parse_keyword_list, split_corpus
from .evaluation import MatchConfig, evaluate_cluster, evaluate_instances
from .nermatch import (
    AnnotationFormatError,
    evaluate_ner_as_keywords,
    keyword_presence,
    load_annotations,
    load_manifests,
    write_presence,
)
from .textproc import Normalizer, PipelineConfig, default_stopwords, load_stopwords
from .textrank import RankConfig, RankMode, extract_keywords


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class InputError(Exception):
    pass


# --- argument parser -------------------------------------------------------


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pre-processing")
    g.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument("--remove-numbers", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument("--min-token-len", type=int, default=3)
    g.add_argument("--nouns-only", action=argparse.BooleanOptionalAction, default=False)
    g.add_argument("--normalizer", choices=[n.value for n in Normalizer], default=Normalizer.IDENTITY.value)
    g.add_argument("--stopword-file", default=None, help="one word per line; default is the bundled English list")
    g.add_argument("--agglomerate", action=argparse.BooleanOptionalAction, default=False,
                   help="merge adjacent ranked terms into multi-word phrases")
    g.add_argument("--bridge-stopwords-max", type=int, default=0)
    g.add_argument("--split-internal", action=argparse.BooleanOptionalAction, default=False,
                   help="split tokens at internal punctuation (C4H*Cl -> C4H * Cl)")


def _rank_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("ranking")
    g.add_argument("--window", type=int, default=5)
    g.add_argument("--top-k", type=int, default=10)
    g.add_argument("--mode", choices=[m.value for m in RankMode], default=RankMode.PURE.value)
    g.add_argument("--damping", type=float, default=None, help="damped mode only (default 0.85)")
    g.add_argument("--tolerance", type=float, default=1e-6)
    g.add_argument("--max-iterations", type=int, default=100)


def _match_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("matching")
    g.add_argument("--threshold", type=float, default=0.8)
    g.add_argument("--case-fold", action=argparse.BooleanOptionalAction, default=True)


def _threads_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker processes for per-document work")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwextract", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus table and write it as JSON lines")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-domain", type=int, default=6, help="largest allowed Y1; negative disables the check")

    p = sub.add_parser("split", help="seeded train/test split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratio", type=float, default=0.7, help="train fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratify", action=argparse.BooleanOptionalAction, default=False)

    p = sub.add_parser("extract", help="TextRank keyphrases per document")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split-file", default=None, help="JSON written by `split`")
    p.add_argument("--part", choices=["train", "test"], default=None)
    _pipeline_flags(p)
    _rank_flags(p)
    _threads_flag(p)

    p = sub.add_parser("cluster", help="K-Means on embeddings, keyphrases per cluster")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kmeans-max-iterations", type=int, default=300)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--init", choices=["random", "k-means++"], default="k-means++")
    _pipeline_flags(p)
    _rank_flags(p)

    p = sub.add_parser("evaluate", help="fuzzy-match extracted keyphrases against reference keywords")
    p.add_argument("--in", dest="input", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--candidates", help="JSON lines written by `extract`")
    src.add_argument("--clusters", help="JSON written by `cluster` (cluster-based evaluation)")
    p.add_argument("--out", required=True)
    _match_flags(p)

    p = sub.add_parser("nermatch", help="keyword presence table from NER annotations")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", default=None, help="also evaluate this model's entities as keywords")
    p.add_argument("--report", default=None, help="where to write the --model evaluation report")
    _match_flags(p)

    return parser


def validate_flags(args: argparse.Namespace) -> argparse.Namespace:
    """Range-check flags, reject conflicts and attach module configs."""
    if getattr(args, "window", None) is not None and args.window < 2:
        raise UsageError("--window", "must be >= 2")
    if getattr(args, "top_k", None) is not None and args.top_k < 1:
        raise UsageError("--top-k", "must be >= 1")
    if getattr(args, "mode", None) is not None:
        if args.mode == RankMode.PURE.value and args.damping is not None:
            raise UsageError("--damping", "only valid with --mode damped")
        if args.damping is not None and not 0.0 <= args.damping <= 1.0:
            raise UsageError("--damping", "must lie in [0, 1]")
        if args.tolerance <= 0:
            raise UsageError("--tolerance", "must be positive")
        if args.max_iterations < 1:
            raise UsageError("--max-iterations", "must be >= 1")
    if getattr(args, "min_token_len", None) is not None:
        if args.min_token_len < 1:
            raise UsageError("--min-token-len", "must be >= 1")
        if args.bridge_stopwords_max < 0:
            raise UsageError("--bridge-stopwords-max", "must be >= 0")
        if args.bridge_stopwords_max > 0 and not args.agglomerate:
            raise UsageError("--bridge-stopwords-max", "requires --agglomerate")
    if getattr(args, "ratio", None) is not None and not 0.0 < args.ratio < 1.0:
        raise UsageError("--ratio", "must lie strictly between 0 and 1")
    if getattr(args, "threshold", None) is not None and not 0.0 <= args.threshold <= 1.0:
        raise UsageError("--threshold", "must lie in [0, 1]")
    if getattr(args, "k", None) is not None and args.k < 1:
        raise UsageError("--k", "must be >= 1")
    if getattr(args, "n_init", None) is not None and args.n_init < 1:
        raise UsageError("--n-init", "must be >= 1")
    if getattr(args, "kmeans_max_iterations", None) is not None and args.kmeans_max_iterations < 1:
        raise UsageError("--kmeans-max-iterations", "must be >= 1")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        raise UsageError("--threads", "must be >= 1")
    if args.command == "extract" and (args.split_file is None) != (args.part is None):
        raise UsageError("--part", "--split-file and --part go together")
    if args.command == "nermatch" and args.report is not None and args.model is None:
        raise UsageError("--report", "requires --model")

    if getattr(args, "window", None) is not None:
        args.rank = RankConfig(
            window=args.window,
            mode=RankMode(args.mode),
            damping=0.85 if args.damping is None else args.damping,
            tolerance=args.tolerance,
            max_iterations=args.max_iterations,
            top_k=args.top_k,
        )
    if getattr(args, "min_token_len", None) is not None:
        try:
            stopwords = load_stopwords(args.stopword_file) if args.stopword_file else default_stopwords()
        except OSError as exc:
            raise InputError(f"cannot read stopword file: {exc}") from None
        args.pipeline = PipelineConfig(
            lowercase=args.lowercase,
            remove_numbers=args.remove_numbers,
            min_token_len=args.min_token_len,
            stopwords=stopwords,
            nouns_only=args.nouns_only,
            normalizer=Normalizer(args.normalizer),
            agglomerate=args.agglomerate,
            bridge_stopwords_max=args.bridge_stopwords_max,
            split_internal=args.split_internal,
        )
    if getattr(args, "threshold", None) is not None:
        args.match = MatchConfig(threshold=args.threshold, case_fold=args.case_fold)
    return args


# --- commands --------------------------------------------------------------


def _load_corpus(path: str, max_domain: int | None = 6):
    try:
        return parse_corpus(path, max_domain=max_domain)
    except OSError as exc:
        raise InputError(f"cannot read corpus: {exc}") from None


def _write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def phrase_line(doc_id: int, phrases) -> str:
    """One extraction record; scores always carry six decimals."""
    items = ", ".join(
        '{"text": %s, "score": %.6f}' % (json.dumps(p.text, ensure_ascii=False), p.score) for p in phrases
    )
    return '{"doc_id": %d, "phrases": [%s]}' % (doc_id, items)


def _extract_job(job):
    text, pipeline, rank = job
    return extract_keywords(text, pipeline, rank)


def cmd_ingest(args) -> str:
    corpus = _load_corpus(args.input, None if args.max_domain < 0 else args.max_domain)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in corpus:
            row = {
                "doc_id": r.doc_id,
                "y1": r.y1,
                "y2": r.y2,
                "y": r.y,
                "domain": r.domain,
                "area": r.area,
                "keywords": parse_keyword_list(r.raw_keywords),
                "abstract": r.abstract,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return f"ingested {len(corpus)} records"


def cmd_split(args) -> str:
    corpus = _load_corpus(args.input, None)
    try:
        result = split_corpus(corpus, args.ratio, args.seed, stratify=args.stratify)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write_json(
        args.out,
        {
            "ratio": str(result.ratio),
            "seed": result.seed,
            "stratified": args.stratify,
            "train_ids": result.train_ids,
            "test_ids": result.test_ids,
        },
    )
    return f"split {len(corpus)} records: {len(result.train_ids)} train / {len(result.test_ids)} test"


def cmd_extract(args) -> str:
    corpus = _load_corpus(args.input, None)
    records = list(corpus)
    if args.split_file:
        try:
            with open(args.split_file, encoding="utf-8") as fh:
                wanted = set(json.load(fh)[f"{args.part}_ids"])
        except (OSError, KeyError, ValueError) as exc:
            raise InputError(f"cannot read split file: {exc}") from None
        records = [r for r in records if r.doc_id in wanted]
    jobs = [(r.abstract, args.pipeline, args.rank) for r in records]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_extract_job, jobs, chunksize=max(1, len(jobs) // (4 * args.threads))))
    else:
        results = [_extract_job(j) for j in jobs]
    with open(args.out, "w", encoding="utf-8") as fh:
        for record, phrases in zip(records, results):
            fh.write(phrase_line(record.doc_id, phrases) + "\n")
    return f"extracted keyphrases for {len(records)} documents"


def cmd_cluster(args) -> str:
    corpus = _load_corpus(args.input, None)
    try:
        table = load_embeddings(args.embeddings)
    except OSError as exc:
        raise InputError(f"cannot read embeddings: {exc}") from None
    unknown = [i for i in table.ids if not 0 <= i < len(corpus)]
    if unknown:
        raise InputError(f"embedding doc_id {unknown[0]} not in corpus")
    if not 1 <= args.k <= len(table):
        raise UsageError("--k", f"must lie in [1, {len(table)}]")
    model = kmeans(
        table, args.k, seed=args.seed, max_iterations=args.kmeans_max_iterations, n_init=args.n_init, init=args.init
    )
    phrases = extract_cluster_keyphrases(corpus, model, args.pipeline, args.rank)
    references = build_cluster_reference(corpus, model)
    with open(args.out, "w", encoding="utf-8") as fh:
        dump_cluster_report(cluster_report(model, phrases, references), fh)
    return f"clustered {len(table)} documents into {args.k} clusters (inertia {model.inertia:.6f})"


def _read_candidates(path: str) -> dict[int, list[str]]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                row = json.loads(line)
                out[int(row["doc_id"])] = [p["text"] for p in row["phrases"]]
    except OSError as exc:
        raise InputError(f"cannot read candidates: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path} line {line_no}: {exc}") from None
    return out


def cmd_evaluate(args) -> str:
    corpus = _load_corpus(args.input, None)
    if args.candidates:
        candidates = _read_candidates(args.candidates)
        missing = [i for i in candidates if not 0 <= i < len(corpus)]
        if missing:
            raise InputError(f"candidate doc_id {missing[0]} not in corpus")
        references = {i: parse_keyword_list(corpus[i].raw_keywords) for i in candidates}
        if not candidates:
            raise InputError("candidate file is empty")
        report = evaluate_instances(candidates, references, args.match)
        kind = "instance"
    else:
        try:
            with open(args.clusters, encoding="utf-8") as fh:
                clusters = json.load(fh)["clusters"]
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot read clusters: {exc}") from None
        cands = {int(c): [p["text"] for p in v["top_phrases"]] for c, v in clusters.items()}
        refs = {int(c): list(v["reference_keywords"]) for c, v in clusters.items()}
        report = evaluate_cluster(cands, refs, args.match)
        kind = "cluster"
    out = report.as_dict()
    out["mode"] = kind
    out["threshold"] = args.match.threshold
    _write_json(args.out, out)
    print(report.summary_table())
    m = report.micro
    return f"evaluated {len(report.per_instance)} {kind}s: micro P={m.precision:.4f} R={m.recall:.4f} F1={m.f1:.4f}"


def cmd_nermatch(args) -> str:
    corpus = _load_corpus(args.input, None)
    try:
        manifests = load_manifests(args.manifest)
        annotations = load_annotations(args.annotations, manifests)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except (KeyError, ValueError) as exc:
        if isinstance(exc, AnnotationFormatError):
            raise
        raise InputError(f"bad manifest: {exc}") from None
    unknown = sorted({a.doc_id for a in annotations if not 0 <= a.doc_id < len(corpus)})
    if unknown:
        raise InputError(f"annotation doc_id {unknown[0]} not in corpus")
    model_ids = sorted(manifests)
    rows = keyword_presence(corpus, annotations, args.match, model_ids)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_presence(rows, model_ids, fh)
    summary = f"presence table: {len(rows)} keywords, {sum(r.in_abstract for r in rows)} found in abstracts"
    if args.model:
        if args.model not in manifests:
            raise UsageError("--model", f"unknown model {args.model!r}")
        try:
            report = evaluate_ner_as_keywords(corpus, annotations, args.model, args.match)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if args.report:
            _write_json(args.report, report.as_dict())
        print(report.summary_table())
    return summary


COMMANDS = {
    "ingest": cmd_ingest,
    "split": cmd_split,
    "extract": cmd_extract,
    "cluster": cmd_cluster,
    "evaluate": cmd_evaluate,
    "nermatch": cmd_nermatch,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = validate_flags(args)
        summary = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"kwextract: error: {exc}", file=sys.stderr)
        return 2
    except (InputError, CorpusError, EmbeddingFormatError, AnnotationFormatError) as exc:
        print(f"kwextract: input error: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())
