"""Command-line interface.

Batch commands (index, search, classify, rewrite, run, eval, compare,
make-benchmark) operate on local files. `serve` starts the HTTP session
service; `chat` is a thin client for it. Every option can also come
from a TOML config file (--config) with one section per command; flags
override the file.
"""

from __future__ import annotations

import functools
import json
import sys

import click

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .classify import classify as classify_question
from .classify import default_rules, load_rules
from .errors import ConvSearchError
from .evalkit import compare as compare_reports
from .evalkit import evaluate, parse_categories, parse_qrels, parse_run
from .index import build_index, load_index, read_jsonl, read_tsv, save_index
from .minibench import make_minibench
from .pipeline import PipelineParams, SessionEngine, run_pipeline
from .rerank import default_lexicon, load_lexicon
from .retrieval import RetrievalParams, WeightedQuery, search
from .rewrite import (FusionWeights, extract_topic_phrase, load_topics,
                      resolve_references)
from .textproc import (TextprocConfig, default_abbreviations, default_stopwords,
                       load_abbreviations, load_stopwords)


def _fail_on_package_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConvSearchError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML config file; flags override its values.")
@click.pass_context
def main(ctx, config_path):
    """Rule-based conversational search over an inverted index."""
    ctx.ensure_object(dict)
    if config_path:
        with open(config_path, "rb") as fh:
            ctx.obj["config"] = tomllib.load(fh)
    else:
        ctx.obj["config"] = {}


def _cfg(ctx, section: str) -> dict:
    return ctx.obj.get("config", {}).get(section, {})


def _pick(flag, cfg: dict, key: str, default):
    """Flag beats config file beats default."""
    if flag is not None:
        return flag
    return cfg.get(key, default)


def _textproc_config(cfg: dict, stem, stopwords_path, abbreviations_path) -> TextprocConfig:
    stem = _pick(stem, cfg, "stem", True)
    stopwords_path = _pick(stopwords_path, cfg, "stopwords", None)
    abbreviations_path = _pick(abbreviations_path, cfg, "abbreviations", None)
    stopwords = load_stopwords(stopwords_path) if stopwords_path else default_stopwords()
    abbreviations = (
        load_abbreviations(abbreviations_path)
        if abbreviations_path
        else default_abbreviations()
    )
    return TextprocConfig(stem=stem, stopwords=stopwords, abbreviations=abbreviations)


def _rules(path):
    return load_rules(path) if path else default_rules()


def _lexicon(path):
    return load_lexicon(path) if path else default_lexicon()


@main.command("index")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "tsv"]), default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--stem/--no-stem", default=None)
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--abbreviations", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@_fail_on_package_errors
def index_cmd(ctx, corpus, fmt, out, stem, stopwords, abbreviations):
    """Build an inverted index from a corpus file."""
    cfg = _cfg(ctx, "index")
    fmt = _pick(fmt, cfg, "format", "jsonl")
    config = _textproc_config(cfg, stem, stopwords, abbreviations)
    reader = read_jsonl if fmt == "jsonl" else read_tsv
    idx = build_index(reader(corpus), config)
    save_index(idx, out)
    stats = idx.stats()
    click.echo(
        f"indexed {stats.doc_count} docs, {stats.term_count} terms, "
        f"mean length {stats.mean_doc_length:.1f} -> {out}"
    )


@main.command("search")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--query", required=True)
@click.option("--k", type=int, default=None)
@click.option("--mu", type=float, default=None)
@click.option("--scorer", type=click.Choice(["ql", "bm25"]), default=None)
@click.pass_context
@_fail_on_package_errors
def search_cmd(ctx, index_path, query, k, mu, scorer):
    """Run one query; prints rank, doc id, and score as TSV."""
    cfg = _cfg(ctx, "search")
    idx = load_index(index_path)
    params = RetrievalParams(
        mu=_pick(mu, cfg, "mu", 2500.0),
        k=_pick(k, cfg, "k", 10),
        scorer=_pick(scorer, cfg, "scorer", "ql"),
    )
    terms = idx.config.terms(query)
    weighted = WeightedQuery(terms=[(t, 1.0) for t in terms])
    for doc in search(idx, weighted, params):
        click.echo(f"{doc.rank}\t{doc.doc_id}\t{doc.score:.6f}")


@main.command("classify")
@click.option("--rules", "rules_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--question", default=None)
@click.option("--batch", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@_fail_on_package_errors
def classify_cmd(ctx, rules_path, question, batch):
    """Classify one question, or a file with one question per line."""
    cfg = _cfg(ctx, "classify")
    rules = _rules(_pick(rules_path, cfg, "rules", None))
    if (question is None) == (batch is None):
        raise click.UsageError("provide exactly one of --question or --batch")
    if question is not None:
        click.echo(classify_question(question, rules).value)
        return
    with open(batch, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            click.echo(f"{line}\t{classify_question(line, rules).value}")


@main.command("rewrite")
@click.option("--topics", "topics_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", "weights_text", default=None, help="w_current,w_first,w_previous")
@click.option("--no-resolve", is_flag=True, default=False)
@click.pass_context
@_fail_on_package_errors
def rewrite_cmd(ctx, topics_path, weights_text, no_resolve):
    """Print resolved utterances and weighted term bags per turn (TSV)."""
    from .rewrite import compose_weighted_query

    cfg = _cfg(ctx, "rewrite")
    weights = FusionWeights.parse(_pick(weights_text, cfg, "weights", "5.0,3.25,1.0"))
    config = TextprocConfig()
    for topic in load_topics(topics_path):
        phrase = extract_topic_phrase(topic.turns[0].raw_utterance)
        history, first_resolved, prev_resolved = [], None, None
        for turn in topic.turns:
            if no_resolve:
                resolved = turn.raw_utterance
            else:
                resolved = resolve_references(turn.raw_utterance, history, phrase)
            query = compose_weighted_query(
                resolved,
                first_resolved if turn.turn_number > 1 else None,
                prev_resolved if turn.turn_number > 2 else None,
                weights,
                config,
            )
            bag = ",".join(f"{t}:{w:g}" for t, w in query.terms)
            click.echo(f"{topic.topic_id}\t{turn.turn_number}\t{resolved}\t{bag}")
            history.append(turn)
            if turn.turn_number == 1:
                first_resolved = resolved
            prev_resolved = resolved


@main.command("run")
@click.option("--topics", "topics_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--index", "index_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--weights", "weights_text", default=None)
@click.option("--mu", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--scorer", type=click.Choice(["ql", "bm25"]), default=None)
@click.option("--rerank-lambda", type=float, default=None)
@click.option("--rerank-depth", type=int, default=None)
@click.option("--resolve/--no-resolve", default=None)
@click.option("--use-title", is_flag=True, default=False)
@click.option("--run-tag", default=None)
@click.option("--rules", "rules_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@_fail_on_package_errors
def run_cmd(ctx, topics_path, index_path, out, weights_text, mu, k, scorer,
            rerank_lambda, rerank_depth, resolve, use_title, run_tag,
            rules_path, lexicon_path):
    """Batch pipeline: topics file -> TREC run file plus sidecars."""
    from .rerank import RerankParams

    cfg = _cfg(ctx, "run")
    params = PipelineParams(
        weights=FusionWeights.parse(_pick(weights_text, cfg, "weights", "5.0,3.25,1.0")),
        retrieval=RetrievalParams(
            mu=_pick(mu, cfg, "mu", 2500.0),
            k=_pick(k, cfg, "k", 1000),
            scorer=_pick(scorer, cfg, "scorer", "ql"),
        ),
        rerank=RerankParams(
            lambda_=_pick(rerank_lambda, cfg, "rerank_lambda", 0.5),
            depth=_pick(rerank_depth, cfg, "rerank_depth", None),
        ),
        resolve=_pick(resolve, cfg, "resolve", True),
        use_title=use_title or cfg.get("use_title", False),
        run_tag=_pick(run_tag, cfg, "run_tag", "convsearch"),
    )
    topics = load_topics(topics_path)
    idx = load_index(index_path)
    rules = _rules(_pick(rules_path, cfg, "rules", None))
    lexicon = _lexicon(_pick(lexicon_path, cfg, "lexicon", None))
    run = run_pipeline(topics, idx, params, out, rules=rules, lexicon=lexicon)
    click.echo(f"wrote {sum(len(v) for v in run.by_query.values())} lines "
               f"for {len(run.by_query)} queries -> {out}")


def _parse_ks(text: str) -> list[int]:
    return [int(p) for p in str(text).split(",") if str(p).strip()]


@main.command("eval")
@click.option("--run", "run_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--categories", "categories_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--k", "ks_text", default=None, help="comma-separated cutoffs, e.g. 10,1000")
@click.option("--rel-threshold", type=int, default=None)
@click.option("--tsv", is_flag=True, default=False)
@click.pass_context
@_fail_on_package_errors
def eval_cmd(ctx, run_path, qrels_path, categories_path, ks_text, rel_threshold, tsv):
    """Score a run file against qrels."""
    import os

    cfg = _cfg(ctx, "eval")
    categories_path = _pick(categories_path, cfg, "categories", None)
    if categories_path is None and os.path.exists(f"{run_path}.categories.tsv"):
        categories_path = f"{run_path}.categories.tsv"
    categories = parse_categories(categories_path) if categories_path else {}
    report = evaluate(
        parse_run(run_path),
        parse_qrels(qrels_path),
        categories,
        ks=_parse_ks(_pick(ks_text, cfg, "k", "10,1000")),
        rel_threshold=_pick(rel_threshold, cfg, "rel_threshold", 1),
    )
    click.echo(report.to_tsv() if tsv else report.pretty(), nl=False)


@main.command("compare")
@click.option("--run-a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--run-b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--qrels", "qrels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--categories", "categories_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--k", "ks_text", default=None)
@click.option("--rel-threshold", type=int, default=None)
@click.option("--tsv", is_flag=True, default=False)
@click.pass_context
@_fail_on_package_errors
def compare_cmd(ctx, run_a, run_b, qrels_path, categories_path, ks_text, rel_threshold, tsv):
    """Baseline-vs-method deltas between two runs on the same qrels."""
    import os

    cfg = _cfg(ctx, "compare")
    qrels = parse_qrels(qrels_path)
    ks = _parse_ks(_pick(ks_text, cfg, "k", "10,1000"))
    threshold = _pick(rel_threshold, cfg, "rel_threshold", 1)

    def report_for(path):
        sidecar = categories_path or (
            f"{path}.categories.tsv" if os.path.exists(f"{path}.categories.tsv") else None
        )
        categories = parse_categories(sidecar) if sidecar else {}
        return evaluate(parse_run(path), qrels, categories, ks=ks, rel_threshold=threshold)

    delta = compare_reports(report_for(run_a), report_for(run_b))
    click.echo(delta.to_tsv() if tsv else delta.pretty(), nl=False)


@main.command("serve")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=None)
@click.option("--host", default=None)
@click.option("--weights", "weights_text", default=None)
@click.option("--mu", type=float, default=None)
@click.option("--rerank-lambda", type=float, default=None)
@click.option("--rules", "rules_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@_fail_on_package_errors
def serve_cmd(ctx, index_path, port, host, weights_text, mu, rerank_lambda,
              rules_path, lexicon_path):
    """Start the HTTP session service over a saved index."""
    import uvicorn

    from .rerank import RerankParams
    from .server import create_app

    cfg = _cfg(ctx, "serve")
    engine = SessionEngine(
        load_index(index_path),
        weights=FusionWeights.parse(_pick(weights_text, cfg, "weights", "5.0,3.25,1.0")),
        retrieval=RetrievalParams(mu=_pick(mu, cfg, "mu", 2500.0), k=10),
        rerank_params=RerankParams(lambda_=_pick(rerank_lambda, cfg, "rerank_lambda", 0.5)),
        rules=_rules(_pick(rules_path, cfg, "rules", None)),
        lexicon=_lexicon(_pick(lexicon_path, cfg, "lexicon", None)),
    )
    uvicorn.run(
        create_app(engine),
        host=_pick(host, cfg, "host", "127.0.0.1"),
        port=_pick(port, cfg, "port", 8000),
    )


@main.command("chat")
@click.option("--url", default=None)
@click.option("--k", type=int, default=None)
@click.pass_context
@_fail_on_package_errors
def chat_cmd(ctx, url, k):
    """Interactive client for a running service (blank line quits)."""
    import httpx

    cfg = _cfg(ctx, "chat")
    url = _pick(url, cfg, "url", "http://127.0.0.1:8000")
    k = _pick(k, cfg, "k", 10)
    with httpx.Client(base_url=url, timeout=30.0) as client:
        session_id = client.post("/sessions").json()["session_id"]
        click.echo(f"session {session_id} @ {url}")
        while True:
            try:
                line = click.prompt("you", prompt_suffix="> ", default="", show_default=False)
            except (EOFError, click.Abort):
                break
            if not line.strip():
                break
            response = client.post(
                f"/sessions/{session_id}/ask", json={"utterance": line, "k": k}
            )
            body = response.json()
            if response.status_code != 200:
                click.echo(f"error: {body.get('error', response.text)}")
                continue
            click.echo(f"[{body['category']}] {body['resolved_query']}")
            for card in body["results"]:
                click.echo(f"  {card['doc_id']}  {card['score']:.4f}  {card['snippet']}")


@main.command("make-benchmark")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=13)
@click.pass_context
@_fail_on_package_errors
def make_benchmark_cmd(ctx, out_dir, seed):
    """Regenerate the synthetic mini-benchmark (corpus, topics, qrels)."""
    paths = make_minibench(out_dir, seed=seed)
    click.echo(json.dumps(paths, indent=2))


if __name__ == "__main__":
    main()
