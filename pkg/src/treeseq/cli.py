"""Command-line entry point.

Wires corpora, grammars, vocabularies, the model, and the metrics into
reproducible runs. Every command that writes an artifact also writes a
``<artifact>.manifest.json`` next to it recording the command line, the
seed, the config, and sha256 hashes of all inputs.

Exit codes: 0 success, 1 validation error (including bad usage), 2 I/O
error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .automaton import replay
from .encoding import encode_index
from .errors import ValidationError, VerificationError
from .grammar import GrammarGraph, induce
from .manifest import RunManifest
from .metrics import evaluate
from .model import (
    BeamSearch,
    ModelConfig,
    encode_corpus,
    hyp_is_parsable,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .paths import edge_paths, tree_depth
from .toy import gen_corpus
from .tree import delinearize, linearize, load_corpus, save_corpus
from .vocab import (
    AstVocab,
    JointVocab,
    SubwordVocab,
    load_vocabs,
    save_vocabs,
    subword_training_texts,
    tokens_from_json,
    tokens_to_json,
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as validation errors (exit 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _manifest(args, command: str, *, seed=None, config=None) -> RunManifest:
    return RunManifest(
        command=command,
        argv=list(args._argv),
        seed=seed,
        config=config or {},
    )


# -- commands ----------------------------------------------------------------


def cmd_gen_toy(args) -> int:
    man = _manifest(args, "gen-toy", seed=args.seed, config={"n": args.n})
    samples = gen_corpus(args.n, seed=args.seed)
    save_corpus(samples, args.out)
    man.add_output(args.out)
    man.write()
    print(f"wrote {len(samples)} samples to {args.out}")
    return 0


def cmd_induce(args) -> int:
    man = _manifest(args, "induce")
    man.add_input(args.corpus)
    samples = load_corpus(args.corpus)
    grammar = induce(s.tree for s in samples)
    grammar.save(args.out)
    man.add_output(args.out)
    man.write()
    st = grammar.stats()
    print(f"types={st['object_types']} attributes={st['attributes']} edges={st['child_edges']}")
    return 0


def cmd_roundtrip(args) -> int:
    man = _manifest(args, "roundtrip", config={"path_len": args.path_len})
    man.add_input(args.corpus)
    man.add_input(args.grammar)
    samples = load_corpus(args.corpus)
    grammar = GrammarGraph.load(args.grammar)
    failures = []
    for i, sample in enumerate(samples):
        try:
            tokens = linearize(sample.tree)
            back = delinearize(tokens, grammar)
            if back != sample.tree:
                failures.append((i, "round-trip mismatch"))
                continue
            paths = edge_paths(sample.tree, args.path_len)
            state = replay(grammar, tokens)
            if not state.finished:
                failures.append((i, "automaton did not finish"))
                continue
            del paths, state
        except Exception as exc:  # noqa: BLE001 - reported per sample
            failures.append((i, f"{type(exc).__name__}: {exc}"))
    man.write(args.corpus + ".roundtrip.manifest.json")
    for i, why in failures:
        print(f"sample {i}: {why}", file=sys.stderr)
    total = len(samples)
    print(f"{total - len(failures)}/{total} samples round-trip")
    if failures:
        raise VerificationError(f"{len(failures)} of {total} samples failed round-trip")
    return 0


def cmd_vocab_train(args) -> int:
    man = _manifest(args, "vocab train", config={"size": args.size})
    man.add_input(args.input)
    samples = load_corpus(args.input)
    if args.grammar:
        man.add_input(args.grammar)
        grammar = GrammarGraph.load(args.grammar)
    else:
        grammar = induce(s.tree for s in samples)
    subword = SubwordVocab.train(subword_training_texts(samples), args.size)
    ast = AstVocab.from_corpus(grammar, (linearize(s.tree) for s in samples))
    save_vocabs(args.out, subword, ast)
    man.add_output(args.out)
    man.write()
    print(f"subword size {subword.size} ({len(subword.merges)} merges), ast size {ast.size}")
    return 0


def _config_from_flags(args, src_vocab: int, tgt_vocab: int) -> ModelConfig:
    return ModelConfig(
        src_vocab=src_vocab,
        tgt_vocab=tgt_vocab,
        d_model=args.d_model,
        n_heads=args.n_heads,
        d_ff=args.d_ff,
        n_enc_layers=args.n_enc_layers,
        n_dec_layers=args.n_dec_layers,
        positional=args.positional,
        d_idx=args.d_idx,
        path_len=args.path_len,
        max_len=args.max_len,
        dtype=args.dtype,
    )


def cmd_train(args) -> int:
    subword, ast = load_vocabs(args.vocab)
    joint = JointVocab(ast, subword)
    cfg = _config_from_flags(args, subword.size, joint.size)
    man = _manifest(args, "train", seed=args.seed, config=cfg.to_doc())
    man.add_input(args.corpus)
    man.add_input(args.vocab)
    samples = load_corpus(args.corpus)
    examples = encode_corpus(samples, joint, cfg.path_len)

    def log(epoch, loss):
        if epoch % args.log_every == 0 or epoch == args.epochs:
            print(f"epoch {epoch:4d}  loss {loss:.4f}")

    params, history = train(
        cfg,
        examples,
        joint,
        epochs=args.epochs,
        lr=args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
        log_cb=log,
    )
    meta = {"epochs": args.epochs, "final_loss": history[-1] if history else None}
    save_checkpoint(args.out, cfg, params, meta)
    man.add_output(args.out)
    man.write()
    if history:
        print(f"final loss {history[-1]:.4f}")
    return 0


def cmd_predict(args) -> int:
    cfg, params, _meta = load_checkpoint(args.checkpoint)
    if args.positional is not None and args.positional != cfg.positional:
        raise ValidationError(
            f"--positional {args.positional} does not match checkpoint "
            f"(trained with {cfg.positional!r}); retrain instead"
        )
    subword, ast = load_vocabs(args.vocab)
    joint = JointVocab(ast, subword)
    grammar = GrammarGraph.load(args.grammar) if args.grammar else None
    man = _manifest(
        args,
        "predict",
        config={"beams": args.beams, "constrained": args.constrained, "max_len": args.max_len},
    )
    man.add_input(args.corpus)
    man.add_input(args.vocab)
    man.add_input(args.checkpoint)
    if args.grammar:
        man.add_input(args.grammar)
    samples = load_corpus(args.corpus)
    search = BeamSearch(
        cfg,
        params,
        joint,
        grammar,
        constrained=args.constrained,
        beams=args.beams,
        max_len=args.max_len,
    )
    n_parsable = 0
    with open(args.out, "w") as f:
        for sample in samples:
            nl_ids = subword.encode(sample.nl)
            top = search.decode(nl_ids)[0]
            parsable = grammar is not None and hyp_is_parsable(top, grammar)
            n_parsable += parsable
            row = {
                "tokens": tokens_to_json(top.tokens),
                "score": round(float(top.norm_score), 6),
                "parsable": parsable,
            }
            f.write(json.dumps(row) + "\n")
    man.add_output(args.out)
    man.write()
    print(f"decoded {len(samples)} samples, {n_parsable} parsable")
    return 0


def cmd_evaluate(args) -> int:
    man = _manifest(args, "evaluate", config={"mask_literals": args.mask_literals})
    man.add_input(args.predictions)
    man.add_input(args.references)
    preds = []
    with open(args.predictions) as f:
        for line in f:
            if line.strip():
                preds.append(tokens_from_json(json.loads(line)["tokens"]))
    refs = [linearize(s.tree) for s in load_corpus(args.references)]
    report = evaluate(preds, refs, mask=args.mask_literals)
    with open(args.out, "w") as f:
        json.dump(report.to_doc(), f, indent=2, sort_keys=True)
        f.write("\n")
    man.add_output(args.out)
    man.write()
    print(report.table())
    return 0


def cmd_dump_paths(args) -> int:
    man = _manifest(args, "dump-paths", config={"path_len": args.path_len})
    man.add_input(args.corpus)
    samples = load_corpus(args.corpus)
    with open(args.out, "w") as f:
        for i, sample in enumerate(samples):
            tokens = linearize(sample.tree)
            paths = edge_paths(sample.tree, args.path_len)
            depth = tree_depth(sample.tree)
            for tok, path in zip(tokens, paths):
                row = {"sample": i, "depth": depth, "token": tok.text(), "path": list(path)}
                f.write(json.dumps(row) + "\n")
    man.add_output(args.out)
    man.write()
    print(f"wrote paths for {len(samples)} samples to {args.out}")
    return 0


def cmd_dump_encoding(args) -> int:
    man = _manifest(
        args, "dump-encoding", config={"d_idx": args.d_idx, "max_index": args.max_index}
    )
    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index"] + [f"c{j}" for j in range(args.d_idx)])
        for idx in range(args.max_index + 1):
            vec = encode_index(idx, args.d_idx)
            writer.writerow([idx] + [f"{v:.12g}" for v in vec])
    man.add_output(args.out)
    man.write()
    print(f"wrote encodings for indices 0..{args.max_index} to {args.out}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    p = _Parser(prog="treeseq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"treeseq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-toy", help="generate a seeded toy corpus")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_toy)

    g = sub.add_parser("induce", help="induce a grammar graph from a corpus")
    g.add_argument("--corpus", required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_induce)

    g = sub.add_parser("roundtrip", help="verify linearize/delinearize on every sample")
    g.add_argument("--corpus", required=True)
    g.add_argument("--grammar", required=True)
    g.add_argument("--path-len", type=int, default=8)
    g.set_defaults(func=cmd_roundtrip)

    g = sub.add_parser("vocab", help="vocabulary tools")
    vsub = g.add_subparsers(dest="vocab_command", required=True)
    v = vsub.add_parser("train", help="train subword merges and build the tree vocabulary")
    v.add_argument("--input", required=True, help="corpus JSONL")
    v.add_argument("--size", type=int, default=2000)
    v.add_argument("--grammar", default=None, help="optional; induced from --input when omitted")
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_vocab_train)

    g = sub.add_parser("train", help="train a model")
    g.add_argument("--corpus", required=True)
    g.add_argument("--vocab", required=True)
    g.add_argument("--out", required=True, help="checkpoint path (.npz)")
    g.add_argument("--epochs", type=int, default=500)
    g.add_argument("--lr", type=float, default=1e-4)
    g.add_argument("--batch-size", type=int, default=15)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--log-every", type=int, default=50)
    g.add_argument("--positional", choices=("seq", "tree"), default="tree")
    g.add_argument("--d-model", type=int, default=64)
    g.add_argument("--n-heads", type=int, default=4)
    g.add_argument("--d-ff", type=int, default=128)
    g.add_argument("--n-enc-layers", type=int, default=2)
    g.add_argument("--n-dec-layers", type=int, default=2)
    g.add_argument("--d-idx", type=int, default=8)
    g.add_argument("--path-len", type=int, default=8)
    g.add_argument("--max-len", type=int, default=250)
    g.add_argument("--dtype", choices=("float32", "float64"), default="float32")
    g.set_defaults(func=cmd_train)

    g = sub.add_parser("predict", help="beam-decode a corpus")
    g.add_argument("--corpus", required=True)
    g.add_argument("--grammar", default=None)
    g.add_argument("--vocab", required=True)
    g.add_argument("--checkpoint", required=True)
    g.add_argument("--out", required=True, help="predictions JSONL")
    g.add_argument("--beams", type=int, default=5)
    g.add_argument("--max-len", type=int, default=250)
    g.add_argument("--constrained", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument(
        "--positional",
        choices=("seq", "tree"),
        default=None,
        help="sanity check only; must match the checkpoint",
    )
    g.set_defaults(func=cmd_predict)

    g = sub.add_parser("evaluate", help="score predictions against references")
    g.add_argument("--predictions", required=True)
    g.add_argument("--references", required=True, help="reference corpus JSONL")
    g.add_argument("--mask-literals", action="store_true")
    g.add_argument("--out", required=True, help="report JSON")
    g.set_defaults(func=cmd_evaluate)

    g = sub.add_parser("dump-paths", help="dump (token, edge path) rows as JSONL")
    g.add_argument("--corpus", required=True)
    g.add_argument("--path-len", type=int, default=8)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_dump_paths)

    g = sub.add_parser("dump-encoding", help="dump index encodings as CSV")
    g.add_argument("--d-idx", type=int, default=8)
    g.add_argument("--max-index", type=int, default=512)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_dump_encoding)

    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args._argv = argv
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
