"""Command-line entry point wiring data prep, training, tagging, scoring
and the annotation service.

Exit codes: 0 success, 1 validation problem (bad flags or bad input
data), 2 runtime failure. Every command that writes outputs drops a
manifest next to them recording the command, parameters and seed.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .corpus import load_dataset, save_dataset, split_by_dialogue, tag_stats
from .errors import (
    BadRatio,
    EmptyCorpus,
    EmptyDataset,
    FaithtagError,
    LengthMismatch,
    MalformedInlineTag,
    SchemaError,
    UnknownVariant,
)
from .metrics import binary_prf, tag_prf
from .rouge import corpus_rouge
from .tags import binarize_tags

_VALIDATION_ERRORS = (
    SchemaError,
    BadRatio,
    LengthMismatch,
    MalformedInlineTag,
    UnknownVariant,
    EmptyDataset,
    EmptyCorpus,
)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_manifest(
    directory: Path, command: str, params: dict, inputs: list[str],
    outputs: list[str], seed: int | None, started: str,
) -> Path:
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "started": started,
        "finished": _now(),
        "tool_version": __version__,
    }
    path = directory / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _emit(payload: dict, as_json: bool, text: str | None = None) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(text if text is not None else json.dumps(payload, indent=2))


@click.group()
@click.version_option(version=__version__, prog_name="faithtag")
def cli():
    """Token-level faithfulness tagging toolkit."""


# ---------------------------------------------------------------------------
# Data commands
# ---------------------------------------------------------------------------

@cli.command("split")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ratios", default="76,12,12", show_default=True,
              help="Train,validation,test percentages of unique dialogues.")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def split_cmd(in_path, ratios, seed, out_dir, as_json):
    """Split a dataset into train/validation/test by dialogue id."""
    started = _now()
    try:
        parts = tuple(int(r) for r in ratios.split(","))
    except ValueError:
        raise BadRatio(f"cannot parse ratios {ratios!r}")
    dataset = load_dataset(in_path)
    assigned = split_by_dialogue(dataset, parts, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts = {}
    outputs = []
    for name in ("train", "validation", "test"):
        subset = assigned.subset(name)
        path = out / f"{name}.jsonl"
        save_dataset(subset, path)
        outputs.append(str(path))
        counts[name] = {
            "examples": len(subset),
            "dialogues": len(subset.dialogue_ids()),
        }
    _write_manifest(out, "split", {"ratios": list(parts)}, [str(in_path)], outputs, seed, started)
    _emit(
        {"splits": counts},
        as_json,
        "\n".join(
            f"{name}: {c['examples']} examples, {c['dialogues']} dialogues"
            for name, c in counts.items()
        ),
    )


@cli.command("stats")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def stats_cmd(in_path, as_json):
    """Tag counts and fractions over a dataset."""
    dataset = load_dataset(in_path)
    stats = tag_stats(dataset)
    payload = {
        "examples": len(dataset),
        "dialogues": len(dataset.dialogue_ids()),
        "tags": {code: {"count": c, "fraction": f} for code, (c, f) in stats.items()},
    }
    lines = [f"examples: {payload['examples']}, dialogues: {payload['dialogues']}"]
    lines += [
        f"  {code:>2}: {v['count']:6d}  ({v['fraction']:.1%})"
        for code, v in payload["tags"].items()
    ]
    _emit(payload, as_json, "\n".join(lines))


# ---------------------------------------------------------------------------
# Training commands
# ---------------------------------------------------------------------------

@cli.command("train-joint")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--phase", type=click.Choice(["1", "2", "both"]), default="both", show_default=True)
@click.option("--epochs", default=15, show_default=True, type=int)
@click.option("--lr", default=2e-5, show_default=True, type=float)
@click.option("--batch", default=4, show_default=True, type=int)
@click.option("--lambda-tag", default=1.0, show_default=True, type=float)
@click.option("--d-model", default=128, show_default=True, type=int)
@click.option("--heads", default=4, show_default=True, type=int)
@click.option("--layers", default=2, show_default=True, type=int, help="Encoder and decoder layers.")
@click.option("--max-len", default=512, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--unfreeze-phase1", is_flag=True, help="Train the trunk in phase 1 too.")
@click.option("--json", "as_json", is_flag=True)
def train_joint_cmd(in_path, out_path, phase, epochs, lr, batch, lambda_tag,
                    d_model, heads, layers, max_len, seed, unfreeze_phase1, as_json):
    """Train the joint summarizer-tagger; writes checkpoint and loss CSV."""
    from .joint import JointSummarizerTagger, JointTrainConfig

    started = _now()
    dataset = load_dataset(in_path)
    config = JointTrainConfig(
        learning_rate=lr, train_batch=batch, epochs=epochs, seed=seed,
        lambda_tag=lambda_tag, d_model=d_model, heads=heads,
        enc_layers=layers, dec_layers=layers, max_len=max_len,
        phase1_train_trunk=unfreeze_phase1,
    )
    est = JointSummarizerTagger(config)
    est.fit(dataset, phase={"1": "phase1", "2": "phase2", "both": "both"}[phase])
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    est.save(out)
    curve_path = out.with_suffix(out.suffix + ".loss.csv")
    est.write_loss_curve(curve_path)
    _write_manifest(out.parent, "train-joint", est.get_params() | {"phase": phase},
                    [str(in_path)], [str(out), str(curve_path)], seed, started)
    final = est.loss_curve_[-1][3] if est.loss_curve_ else None
    _emit(
        {"model": str(out), "steps": len(est.loss_curve_), "final_joint_loss": final},
        as_json,
        f"saved {out} after {len(est.loss_curve_)} steps (final joint loss {final:.4f})",
    )


@cli.command("train-proxy")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--val", "val_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["HS", "GS"]), default="HS", show_default=True)
@click.option("--labels", type=click.Choice(["multiclass", "binary"]), default="multiclass", show_default=True)
@click.option("--epochs", default=10, show_default=True, type=int)
@click.option("--lr", default=2e-5, show_default=True, type=float)
@click.option("--batch", default=1, show_default=True, type=int)
@click.option("--d-model", default=128, show_default=True, type=int)
@click.option("--heads", default=4, show_default=True, type=int)
@click.option("--layers", default=2, show_default=True, type=int)
@click.option("--max-len", default=512, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--json", "as_json", is_flag=True)
def train_proxy_cmd(in_path, val_path, out_path, mode, labels, epochs, lr, batch,
                    d_model, heads, layers, max_len, seed, as_json):
    """Train the encoder-only proxy tagger (HS or GS, multiclass or binary)."""
    from .proxy import ProxyTagger, ProxyTrainConfig

    started = _now()
    dataset = load_dataset(in_path)
    val = load_dataset(val_path) if val_path else None
    config = ProxyTrainConfig(
        learning_rate=lr, batch_size=batch, epochs=epochs, mode=mode,
        label_space=labels, d_model=d_model, heads=heads, enc_layers=layers,
        max_len=max_len, seed=seed,
    )
    est = ProxyTagger(config).fit(dataset, val_dataset=val)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    est.save(out)
    inputs = [str(in_path)] + ([str(val_path)] if val_path else [])
    _write_manifest(out.parent, "train-proxy", est.get_params(),
                    inputs, [str(out)], seed, started)
    _emit(
        {"model": str(out), "best_f1": est.best_f1_},
        as_json,
        f"saved {out} (best selection F1 {est.best_f1_:.4f})",
    )


# ---------------------------------------------------------------------------
# Inference commands
# ---------------------------------------------------------------------------

@cli.command("generate")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--max-len", default=64, show_default=True, type=int)
@click.option("--json", "as_json", is_flag=True)
def generate_cmd(model_path, in_path, out_path, max_len, as_json):
    """Run a trained checkpoint over a dataset.

    A joint checkpoint decodes summaries with tags; a proxy checkpoint
    tags the given summaries.
    """
    import torch

    started = _now()
    dataset = load_dataset(in_path)
    kind = torch.load(model_path, map_location="cpu", weights_only=False).get("kind")
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    if kind == "joint":
        from .joint import JointSummarizerTagger

        est = JointSummarizerTagger.load(model_path)
        for ex in dataset.examples:
            tokens, tags = est.generate_with_tags(ex.dialogue, max_len=max_len)
            rows.append(
                {"dialogue_id": ex.dialogue.id, "summary_tokens": tokens, "pred_tags": tags}
            )
    elif kind == "proxy":
        from .proxy import ProxyTagger

        est = ProxyTagger.load(model_path)
        binary = est.config.label_space == "binary"
        for ex in dataset.examples:
            pred = est.predict_example(ex)
            gold = binarize_tags(ex.summary.tags) if binary else list(ex.summary.tags)
            rows.append(
                {"dialogue_id": ex.dialogue.id, "pred_tags": pred, "gold_tags": gold}
            )
    else:
        raise FaithtagError(f"unrecognized checkpoint kind {kind!r}")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    _write_manifest(out.parent, "generate", {"max_len": max_len, "kind": kind},
                    [str(in_path), str(model_path)], [str(out)],
                    est.config.seed, started)
    _emit({"predictions": str(out), "rows": len(rows)}, as_json,
          f"wrote {len(rows)} predictions to {out}")


@cli.command("tag-prompt")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", default="tagging-9", show_default=True)
@click.option("--script", "script_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="YAML/JSON fixture mapping probe substrings to canned replies.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--retry-limit", default=1, show_default=True, type=int)
@click.option("--json", "as_json", is_flag=True)
def tag_prompt_cmd(in_path, variant, script_path, out_path, retry_limit, as_json):
    """Few-shot prompt tagging against a scripted chat client."""
    from .prompting import ScriptedChatClient, run_batch

    started = _now()
    dataset = load_dataset(in_path)
    client = ScriptedChatClient.from_file(script_path)
    runs, validity_rate = run_batch(dataset, client, variant=variant, retry_limit=retry_limit)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for run, ex in zip(runs, dataset.examples):
            fh.write(json.dumps(run.to_record(ex.summary.tags), ensure_ascii=False) + "\n")
    _write_manifest(out.parent, "tag-prompt",
                    {"variant": variant, "retry_limit": retry_limit},
                    [str(in_path), str(script_path)], [str(out)], None, started)
    _emit({"predictions": str(out), "validity_rate": validity_rate}, as_json,
          f"wrote {len(runs)} rows to {out} (validity rate {validity_rate:.2%})")


# ---------------------------------------------------------------------------
# Scoring commands
# ---------------------------------------------------------------------------

@cli.command("score-tags")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--binary", "binary", is_flag=True, help="Score hallucinated-or-not only.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Also write the report JSON here.")
@click.option("--json", "as_json", is_flag=True)
def score_tags_cmd(gold_path, pred_path, binary, out_path, as_json):
    """Span-level P/R/F1 of predictions against gold tags (row-aligned)."""
    started = _now()
    gold_dataset = load_dataset(gold_path)
    pred_rows = []
    with open(pred_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if raw:
                try:
                    pred_rows.append(json.loads(raw))
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"invalid JSON: {exc}", lineno)
    if len(pred_rows) != len(gold_dataset):
        raise LengthMismatch(
            f"{len(gold_dataset)} gold rows but {len(pred_rows)} prediction rows"
        )
    gold_seqs, pred_seqs, skipped = [], [], 0
    for ex, row in zip(gold_dataset.examples, pred_rows):
        if row.get("dialogue_id") != ex.dialogue.id:
            raise SchemaError(
                f"prediction row for {row.get('dialogue_id')!r} does not match "
                f"gold dialogue {ex.dialogue.id!r}"
            )
        if row.get("pred_tags") is None:
            skipped += 1
            continue
        gold_seqs.append(list(ex.summary.tags))
        pred_seqs.append(list(row["pred_tags"]))
    if binary:
        report = binary_prf(
            [binarize_tags(g) for g in gold_seqs],
            [p if all(v in (0, 1) for v in p) else binarize_tags(p) for p in pred_seqs],
        )
    else:
        report = tag_prf(gold_seqs, pred_seqs)
    payload = report.to_dict(options={"binary": binary, "skipped_invalid": skipped})
    if out_path:
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        _write_manifest(out.parent, "score-tags", {"binary": binary},
                        [str(gold_path), str(pred_path)], [str(out)], None, started)
    _emit(payload, as_json,
          f"precision {report.precision:.4f}  recall {report.recall:.4f}  "
          f"f1 {report.f1:.4f}  accuracy {report.accuracy:.4f}")


@cli.command("score-rouge")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help='JSONL rows {"candidate": text, "reference": text}.')
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def score_rouge_cmd(pairs_path, out_path, as_json):
    """Mean ROUGE-1/2/L/Lsum over candidate/reference text pairs."""
    started = _now()
    pairs = []
    with open(pairs_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                row = json.loads(raw)
                pairs.append((row["candidate"], row["reference"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SchemaError(f"bad pair row: {exc}", lineno)
    scores = corpus_rouge(pairs)
    payload = {
        "pairs": len(pairs),
        "options": {"lowercase": True, "stemming": False},
        "scores": {
            name: {"precision": s.precision, "recall": s.recall, "fmeasure": s.fmeasure}
            for name, s in scores.items()
        },
    }
    if out_path:
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        _write_manifest(out.parent, "score-rouge", {}, [str(pairs_path)], [str(out)], None, started)
    _emit(payload, as_json, "\n".join(
        f"{name}: f={s.fmeasure:.4f} p={s.precision:.4f} r={s.recall:.4f}"
        for name, s in scores.items()
    ))


# ---------------------------------------------------------------------------
# Service commands
# ---------------------------------------------------------------------------

@cli.command("serve")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              help="Dataset to enqueue when starting with a fresh journal.")
@click.option("--journal", "journal_path", required=True, type=click.Path(dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8008, show_default=True, type=int)
def serve_cmd(data_path, journal_path, host, port):
    """Run the annotation service over an append-only journal."""
    import uvicorn

    from .service import TaskStore, create_app

    fresh = not Path(journal_path).exists()
    store = TaskStore(journal_path)
    if fresh and data_path:
        store.add_dataset(load_dataset(data_path))
    uvicorn.run(create_app(store), host=host, port=port)


@cli.command("export")
@click.option("--journal", "journal_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def export_cmd(journal_path, out_path, as_json):
    """Export done annotation tasks from a journal as corpus JSONL."""
    from .service import TaskStore

    started = _now()
    store = TaskStore(journal_path)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    content = store.export_jsonl()
    out.write_text(content, encoding="utf-8")
    rows = content.count("\n")
    _write_manifest(out.parent, "export", {}, [str(journal_path)], [str(out)], None, started)
    _emit({"exported": rows, "out": str(out)}, as_json, f"exported {rows} records to {out}")


def main(argv: list[str] | None = None) -> int:
    """CLI entry with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except FaithtagError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
