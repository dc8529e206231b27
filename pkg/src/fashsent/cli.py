"""Command-line entry point: prep, synth, train, eval, predict and gradcheck.

Every command that writes files also writes ``manifest.json`` next to them,
holding the arguments, seed, input fingerprints and output hashes.  Nothing
time-dependent is recorded, so reruns with the same inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import ModelConfig
from .data import (
    LABELS, DatasetSplit, clean_record, data_fingerprint, filter_posts, generate_synthetic,
    load_dataset, save_dataset, split_dataset,
)
from .encoders import SyntheticEmbeddings, TableEmbeddings
from .gradcheck import EPS, SCOPES, TOL, grad_check
from .metrics import compute_metrics
from .model import BRANCHES, MODEL_KINDS
from .train import (
    TrainConfig, encode_all, load_model, predict_posts, save_model, train,
)

OUT_ENV = "FASHSENT_OUT"
DEFAULT_OUT = "fashsent_out"
MANIFEST = "manifest.json"


class CliError(Exception):
    pass


# ---------------------------------------------------------------- argument types


def existing_file(value: str) -> Path:
    p = Path(value)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return p


def branch_list(value: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in value.split(",") if v.strip())
    bad = [n for n in names if n not in BRANCHES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"expected a comma-separated subset of {','.join(BRANCHES)}, got {value!r}")
    return names


def triple(value: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(v) for v in value.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {value!r}")
    return parts


class StoreOnce(argparse.Action):
    """Like ``store`` but giving the flag twice is a usage error."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, self.dest, None) is not None:
            parser.error(f"argument {option_string}: may be given only once")
        setattr(namespace, self.dest, values)


# ---------------------------------------------------------------- helpers


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_manifest(out: Path, command: str, args: dict, outputs: list[Path], **extra) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "args": args,
        "outputs": {p.name: _sha256(p) for p in outputs},
        **extra,
    }
    _write_json(out / MANIFEST, manifest)


def _provider(args, cfg: ModelConfig):
    if args.embeddings == "file":
        if not args.embedding_files:
            raise CliError("--embeddings file needs --embedding-files")
        provider = TableEmbeddings.from_files(args.embedding_files, args.embedding_seed)
        if provider.dim != cfg.text_dim:
            raise CliError(f"embedding tables are {provider.dim} wide in total, model expects {cfg.text_dim}")
        return provider
    return SyntheticEmbeddings(cfg.embedding_sub_dim, seed=args.embedding_seed)


def _branches(args) -> tuple[str, ...]:
    if args.only:
        return (args.only,)
    if args.ablate:
        kept = tuple(b for b in BRANCHES if b not in args.ablate)
        if not kept:
            raise CliError("--ablate removes every branch; at least one must stay enabled")
        return kept
    return BRANCHES


def _jsonable(ns: argparse.Namespace) -> dict:
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k == "func":
            continue
        if isinstance(v, Path):
            v = str(v)
        elif isinstance(v, (list, tuple)):
            v = [str(x) if isinstance(x, Path) else x for x in v]
        out[k] = v
    return out


def _metrics_files(out: Path, report, stem: str = "metrics") -> list[Path]:
    j, t = out / f"{stem}.json", out / f"{stem}.txt"
    j.write_text(report.to_json(), encoding="utf-8")
    t.write_text(report.table(), encoding="utf-8")
    return [j, t]


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    records = generate_synthetic(args.n, args.seed, args.signal, args.modality_strength)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(records, path)
    print(f"wrote {len(records)} records to {path}")
    return 0


def cmd_prep(args) -> int:
    records = load_dataset(args.data, require_label=not args.unlabelled)
    kept, dropped = filter_posts(clean_record(r) for r in records)
    out = _out_dir(args)
    data_out = out / "clean.jsonl"
    dropped_out = out / "dropped.tsv"
    save_dataset(kept, data_out)
    dropped_out.write_text("".join(f"{i}\t{reason}\n" for i, reason in dropped), encoding="utf-8")
    _write_manifest(out, "prep", _jsonable(args), [data_out, dropped_out],
                    data_fingerprint=data_fingerprint(args.data), kept=len(kept), dropped=len(dropped))
    print(f"kept {len(kept)}, dropped {len(dropped)}; wrote {data_out}")
    return 0


def cmd_train(args) -> int:
    config = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size, seed=args.seed, kind=args.kind,
        branches=_branches(args), shuffle_tokens=not args.no_shuffle_tokens, preset=args.preset,
        embedding_seed=args.embedding_seed, target_train_accuracy=args.target_train_accuracy,
    )
    provider = _provider(args, config.model_config)
    records = load_dataset(args.data, vision_dim=config.model_config.vision_dim)
    split = split_dataset(records, args.seed)
    model, log = train(split, config, provider)

    test_posts = encode_all(split.test, provider, model.config.vision_dim)
    preds = predict_posts(model, test_posts)
    report = compute_metrics([p.label for p in preds], [p.label for p in test_posts])

    out = _out_dir(args)
    ckpt = out / "model.ckpt"
    save_model(ckpt, model, provider, config, extra={"data_fingerprint": data_fingerprint(args.data)})
    log_json, log_txt = out / "train_log.json", out / "train_log.txt"
    _write_json(log_json, log.to_dict())
    log_txt.write_text("\n".join(log.lines()) + "\n", encoding="utf-8")
    outputs = [ckpt, log_json, log_txt] + _metrics_files(out, report, "test_metrics")
    _write_manifest(
        out, "train", _jsonable(args), outputs,
        seed=args.seed,
        config=config.to_dict(),
        model=model.meta(),
        optimizer={"name": "adamw", "betas": list(config.betas), "eps": config.adam_eps,
                   "weight_decay": config.weight_decay, "base_lr": config.base_lr,
                   "lr_decay": config.lr_decay, "lr_step": config.lr_step},
        data_fingerprint=data_fingerprint(args.data),
        split_sizes=[len(split.train), len(split.val), len(split.test)],
        final_metrics=report.to_dict(),
        fusion_weights=log.fusion_weights,
    )
    print(log.lines()[-1])
    print(report.table(), end="")
    return 0


def cmd_eval(args) -> int:
    model, provider, meta = load_model(args.checkpoint)
    records = load_dataset(args.data, vision_dim=model.config.vision_dim)
    if not records:
        raise CliError(f"{args.data}: no records")
    posts = encode_all(records, provider, model.config.vision_dim)
    preds = predict_posts(model, posts)
    report = compute_metrics([p.label for p in preds], [p.label for p in posts])
    out = _out_dir(args)
    outputs = _metrics_files(out, report)
    _write_manifest(out, "eval", _jsonable(args), outputs,
                    checkpoint_sha256=_sha256(Path(args.checkpoint)),
                    optimizer=meta.get("optimizer"),
                    data_fingerprint=data_fingerprint(args.data), final_metrics=report.to_dict())
    print(report.table(), end="")
    return 0


def cmd_predict(args) -> int:
    model, provider, meta = load_model(args.checkpoint)
    records = load_dataset(args.data, require_label=False, vision_dim=model.config.vision_dim)
    preds = predict_posts(model, encode_all(records, provider, model.config.vision_dim))
    out = _out_dir(args)
    path = out / "predictions.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(json.dumps({"id": p.id, "label": LABELS[p.label], "scores": p.scores,
                                 "branch_scores": p.branch_scores}, sort_keys=True) + "\n")
    _write_manifest(out, "predict", _jsonable(args), [path],
                    checkpoint_sha256=_sha256(Path(args.checkpoint)),
                    data_fingerprint=data_fingerprint(args.data))
    for p in preds:
        print(f"{p.id}\t{LABELS[p.label]}\t" + " ".join(f"{s:.4f}" for s in p.scores))
    return 0


def cmd_gradcheck(args) -> int:
    report = grad_check(args.scope, seed=args.seed, eps=args.eps, tol=args.tol, target=args.target,
                        coords=args.coords, corrupt=args.corrupt,
                        config=ModelConfig.preset(args.preset))
    for line in report.lines():
        print(line)
    verdict = "PASS" if report.passed else "FAIL: " + ", ".join(report.failures())
    print(f"{verdict} (scope {args.scope}, seed {args.seed}, max rel err {report.max_rel_err:.3e})")
    return 0 if report.passed else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fashsent", description="Multimodal fashion-post sentiment model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p, help_="output directory (default: $%s or ./%s)" % (OUT_ENV, DEFAULT_OUT)):
        p.add_argument("--out", help=help_)

    def embedding_flags(p):
        p.add_argument("--embeddings", choices=("synthetic", "file"), default="synthetic")
        p.add_argument("--embedding-files", nargs="+", type=existing_file, metavar="TABLE",
                       help="word-vector tables whose widths add up to the text width")
        p.add_argument("--embedding-seed", type=int, default=0)

    p = sub.add_parser("synth", help="generate a synthetic labelled dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--signal", type=float, default=1.0, help="class signal strength (0 = no signal)")
    p.add_argument("--modality-strength", type=triple, default=(1.0, 1.0, 1.0), metavar="V,T,A")
    p.add_argument("--out", required=True, help="output JSON-lines file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("prep", help="clean text and drop unusable posts")
    p.add_argument("--data", type=existing_file, required=True)
    p.add_argument("--unlabelled", action="store_true", help="accept records without a label")
    out_flag(p)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("train", help="train a model on a labelled dataset")
    p.add_argument("--data", type=existing_file, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--preset", choices=("paper", "small"), default="paper")
    p.add_argument("--kind", choices=MODEL_KINDS, default="full")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--ablate", type=branch_list, action=StoreOnce, metavar="B[,B]",
                       help="disable these branches")
    group.add_argument("--only", choices=BRANCHES, action=StoreOnce, help="enable a single branch")
    p.add_argument("--no-shuffle-tokens", action="store_true",
                   help="keep token order fixed across epochs")
    p.add_argument("--target-train-accuracy", type=float, default=None,
                   help="stop early once train accuracy reaches this value")
    embedding_flags(p)
    out_flag(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a labelled dataset")
    p.add_argument("--checkpoint", type=existing_file, required=True)
    p.add_argument("--data", type=existing_file, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="label posts with a checkpoint")
    p.add_argument("--checkpoint", type=existing_file, required=True)
    p.add_argument("--data", type=existing_file, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    p.add_argument("--scope", choices=SCOPES, default="op")
    p.add_argument("--target", help="single op or branch to check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=EPS)
    p.add_argument("--tol", type=float, default=TOL)
    p.add_argument("--coords", type=int, default=4, help="coordinates sampled per group")
    p.add_argument("--preset", choices=("paper", "small"), default="small")
    p.add_argument("--corrupt", help=argparse.SUPPRESS)   # negative-control hook
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"fashsent {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
