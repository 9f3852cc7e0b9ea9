"""Command-line surface tying the modules into reproducible batch pipelines.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal failure.
Data goes to stdout when no output path is given; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path
from typing import IO, Iterator

from . import corpus as corpusio
from . import grammar as genfsm
from . import oie, prompts, responses
from .attention import enumerate_configs
from .errors import ParseError, SeqLabError
from .evaluation import evaluate
from .prompts import PromptLayout, PromptSpec, TokenLogProbs, build_prompt, loss

DEFAULT_SEED = 1337

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this toolkit reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def _out_stream(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ParseError(0, f"no such file: {path}")
    return p


def _split_options(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    options = [part.strip() for part in raw.split(",") if part.strip()]
    if not options:
        raise ParseError(0, f"empty option list: {raw!r}")
    return options


def _cmd_evaluate(args) -> int:
    refs = corpusio.read_jsonl(_require_file(args.refs))
    preds = corpusio.read_jsonl(_require_file(args.preds))
    report = evaluate(
        [r.to_labeled_sequence() for r in refs],
        [p.to_labeled_sequence() for p in preds],
        mode=args.mode.upper(),
        scheme=args.scheme,
        decode=args.decode,
    )
    with _out_stream(args.out) as out:
        if args.format == "json":
            out.write(report.to_json(indent=2))
            out.write("\n")
        else:
            out.write(report.to_table())
            out.write("\n")
    return EXIT_OK


def _cmd_rdrr(args) -> int:
    records = corpusio.read_jsonl(_require_file(args.corpus))
    ratio = corpusio.rdrr(records)
    with _out_stream(args.out) as out:
        out.write(f"{ratio}\n")
    return EXIT_OK


def _cmd_oie_filter(args) -> int:
    _require_file(args.triples)
    with _out_stream(args.out) as out:
        with open(args.triples, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    tokens = list(obj["tokens"])
                    triples = [oie.Triple.from_json_dict(t) for t in obj.get("triples", [])]
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ParseError(line_no, str(exc)) from exc
                labeling = oie.filter_and_merge(tokens, triples)
                out.write(corpusio.record_to_json_line(labeling.to_record()))
                out.write("\n")
    return EXIT_OK


def _cmd_build_prompts(args) -> int:
    records = corpusio.read_jsonl(_require_file(args.corpus))
    if args.no_instruction:
        instruction = None
    elif args.instruction is not None:
        instruction = args.instruction
    else:
        raise ParseError(0, "pass --instruction TEXT or --no-instruction")
    options = _split_options(args.options)
    if options is None:
        labels = sorted({t.label for r in records for t in r.tags if t.label is not None})
        options = labels
    meta = {
        "_meta": {
            "command": "build-prompts",
            "seed": args.seed,
            "shots": args.shots,
            "objective": args.objective,
            "eval": args.eval,
        }
    }
    with _out_stream(args.out) as out:
        out.write(json.dumps(meta, separators=(",", ":")))
        out.write("\n")
        for i, record in enumerate(records):
            demo_ids = prompts.sample_demonstrations(range(len(records)), i, args.shots, args.seed)
            spec = PromptSpec.from_records(
                query=record,
                demonstration_records=[records[j] for j in demo_ids],
                options=tuple(options),
                instruction=instruction,
                include_query_response=not args.eval,
                verb_field=args.verb_field,
            )
            out.write(build_prompt(spec).to_json_line())
            out.write("\n")
    return EXIT_OK


def _cmd_parse_responses(args) -> int:
    _require_file(args.responses)
    default_options = _split_options(args.options)
    with _out_stream(args.out) as out:
        with open(args.responses, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    tokens = list(obj["tokens"])
                    response = str(obj["response"])
                    options = obj.get("options", default_options)
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ParseError(line_no, str(exc)) from exc
                if options is None:
                    raise ParseError(line_no, "no 'options' in line and no --options given")
                tags = responses.parse_and_map(response, tokens, options)
                record = corpusio.CorpusRecord(tuple(tokens), tuple(tags))
                out.write(corpusio.record_to_json_line(record))
                out.write("\n")
    return EXIT_OK


def _cmd_compile_grammar(args) -> int:
    options = _split_options(args.options)
    if options is None:
        raise ParseError(0, "--options is required")
    dfa = genfsm.compile_grammar(genfsm.OutputGrammar(tuple(options), allows_na=args.na))
    with _out_stream(args.out) as out:
        out.write(dfa.to_json(indent=2))
        out.write("\n")
    return EXIT_OK


def _cmd_enum_configs(args) -> int:
    configs = enumerate_configs(args.groups, order=args.order)
    with _out_stream(args.out) as out:
        for config in configs:
            out.write(config.code)
            out.write("\n")
    return EXIT_OK


def _spec_from_json(obj: dict) -> PromptSpec:
    demos = []
    for entry in obj.get("demonstrations", []):
        if isinstance(entry, list):
            record_obj, response = entry
            demos.append((corpusio.CorpusRecord.from_json_dict(record_obj), str(response)))
        else:
            record = corpusio.CorpusRecord.from_json_dict(entry)
            demos.append((record, prompts.render_response(record)))
    return PromptSpec(
        query=corpusio.CorpusRecord.from_json_dict(obj["query"]),
        options=tuple(obj.get("options", ())),
        instruction=obj.get("instruction"),
        demonstrations=tuple(demos),
        include_query_response=bool(obj.get("include_query_response", True)),
        verb_field=bool(obj.get("verb_field", False)),
    )


def _cmd_render_prompt(args) -> int:
    with open(_require_file(args.spec), encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, f"invalid JSON: {exc.msg}") from exc
    try:
        spec = _spec_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(0, str(exc)) from exc
    layout = build_prompt(spec)
    with _out_stream(args.out) as out:
        out.write(json.dumps(layout.to_json_dict(), ensure_ascii=False, indent=2))
        out.write("\n")
    return EXIT_OK


def _iter_jsonl(path: str) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            if isinstance(obj, dict) and "_meta" in obj:
                continue
            yield line_no, obj


def _cmd_loss(args) -> int:
    _require_file(args.layouts)
    _require_file(args.logprobs)
    layout_lines = list(_iter_jsonl(args.layouts))
    logprob_lines = list(_iter_jsonl(args.logprobs))
    if len(layout_lines) != len(logprob_lines):
        raise ParseError(0, f"{len(layout_lines)} layouts vs {len(logprob_lines)} log-prob rows")
    with _out_stream(args.out) as out:
        for (_, layout_obj), (line_no, lp_obj) in zip(layout_lines, logprob_lines):
            try:
                layout = PromptLayout.from_json_dict(layout_obj)
                logprobs = list(lp_obj["logprobs"])
                offsets = [tuple(o) if o is not None else None for o in lp_obj["offsets"]]
                pad_mask = lp_obj.get("pad_mask", [o is None for o in offsets])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(line_no, str(exc)) from exc
            layout = layout.with_token_regions(offsets)
            result = loss(
                layout,
                TokenLogProbs(tuple(logprobs), tuple(pad_mask)),
                objective=args.objective,
                reduction=args.reduction,
            )
            out.write(
                json.dumps(
                    {"loss": result.value, "empty_target": result.empty_target},
                    separators=(",", ":"),
                )
            )
            out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqlabkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="score predictions against references")
    p.add_argument("refs", help="reference corpus JSONL")
    p.add_argument("preds", help="predicted corpus JSONL")
    p.add_argument("--mode", choices=["sd", "sc"], default="sc")
    p.add_argument("--scheme", choices=["iob2", "iob1"], default="iob2")
    p.add_argument("--decode", choices=["drop", "repair", "strict"], default="drop")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", dest="format", action="store_const", const="json")
    group.add_argument("--table", dest="format", action="store_const", const="table")
    p.set_defaults(format="table", func=_cmd_evaluate)
    p.add_argument("-o", "--out", default=None)

    p = sub.add_parser("rdrr", help="right-side dependency relations ratio of a corpus")
    p.add_argument("corpus", help="corpus JSONL with 'heads'")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=_cmd_rdrr)

    p = sub.add_parser("oie-filter", help="post-process triples into relation-labeled records")
    p.add_argument("triples", help="triples JSONL")
    p.add_argument("out", nargs="?", default=None)
    p.set_defaults(func=_cmd_oie_filter)

    p = sub.add_parser("build-prompts", help="render prompts for a corpus")
    p.add_argument("corpus", help="corpus JSONL")
    p.add_argument("out", nargs="?", default=None)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--instruction", default=None)
    p.add_argument("--no-instruction", action="store_true")
    p.add_argument("--objective", choices=["vanilla", "src", "mrc"], default="vanilla")
    p.add_argument("--options", default=None, help="comma-joined class names (default: from corpus)")
    p.add_argument("--eval", action="store_true", help="omit query responses")
    p.add_argument("--verb-field", action="store_true")
    p.set_defaults(func=_cmd_build_prompts)

    p = sub.add_parser("parse-responses", help="map generated responses to tagged records")
    p.add_argument("responses", help="responses JSONL")
    p.add_argument("out", nargs="?", default=None)
    p.add_argument("--options", default=None, help="comma-joined class names")
    p.set_defaults(func=_cmd_parse_responses)

    p = sub.add_parser("compile-grammar", help="compile the output grammar to a DFA")
    p.add_argument("out", nargs="?", default=None)
    p.add_argument("--options", required=True, help="comma-joined class names")
    na = p.add_mutually_exclusive_group()
    na.add_argument("--na", dest="na", action="store_true", default=True)
    na.add_argument("--no-na", dest="na", action="store_false")
    p.set_defaults(func=_cmd_compile_grammar)

    p = sub.add_parser("enum-configs", help="list layer-group unmasking codes")
    p.add_argument("--groups", type=int, default=4)
    p.add_argument("--order", choices=["binary", "gray"], default="binary")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=_cmd_enum_configs)

    p = sub.add_parser("render-prompt", help="render a single prompt spec JSON")
    p.add_argument("spec", help="prompt spec JSON file")
    p.add_argument("out", nargs="?", default=None)
    p.set_defaults(func=_cmd_render_prompt)

    p = sub.add_parser("loss", help="response-oriented losses from layouts and log-probs")
    p.add_argument("layouts", help="prompt layout JSONL (build-prompts output)")
    p.add_argument("logprobs", help="JSONL with 'logprobs' and 'offsets' per line")
    p.add_argument("out", nargs="?", default=None)
    p.add_argument("--objective", choices=["vanilla", "src", "mrc"], default="vanilla")
    p.add_argument("--reduction", choices=["sum", "mean"], default="sum")
    p.set_defaults(func=_cmd_loss)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK
    except (SeqLabError, OSError, ValueError) as exc:
        print(f"seqlabkit: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - internal invariant failures
        print(f"seqlabkit: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
