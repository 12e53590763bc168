"""Pipeline CLI: composable subcommands communicating through JSONL artifacts.

Exit codes: 0 success, 1 operation error, 2 usage error. All randomness flows
from --seed; a JSON --config file overrides built-in defaults and explicit
flags override the file. Progress goes to stderr, data only to declared paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import annotate, corpus, drfix, locator, metrics, report, taskgen
from .errors import ApiBenchError, UnbalancedOutput
from .gateway import (
    PARAM_PRESETS,
    CompletionRecord,
    Gateway,
    GenMode,
    GenParams,
    GenRequest,
    HttpBackend,
    ReplayStore,
)
from .langs import Language
from .taskgen import TaskInstance, TaskKind

DEFAULTS = {
    "seed": 42,
    "jobs": os.cpu_count() or 1,
    "cap": 3000,
    "prefix_chars": taskgen.DEFAULT_PREFIX_CHARS,
    "preset": "starcoder",
    "fixtures": "fixtures",
    "smoothing": "none",
    "fraction": 0.1,
    "clean_count": 100,
    "n_per_cell": 300,
    "max_in_flight": 4,
    "formats": "csv,json,txt",
}


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def _write_jsonl(path: str | Path, rows: list[dict]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


def _write_json(path: str | Path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ApiBenchError("--config must hold a JSON object")
    return data


def _cfg(args: argparse.Namespace, key: str, fallback=None):
    """Flag > config file > defaults; flags use a None sentinel when unset."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in args._config:
        return args._config[key]
    return DEFAULTS.get(key, fallback)


def _languages_arg(spec: str | None) -> set[Language] | None:
    if not spec:
        return None
    return {Language(part.strip()) for part in spec.split(",") if part.strip()}


def _gen_params(args: argparse.Namespace) -> GenParams:
    base = PARAM_PRESETS[_cfg(args, "preset")]
    return GenParams(
        temperature=base.temperature if args.temperature is None else args.temperature,
        top_p=base.top_p if args.top_p is None else args.top_p,
        max_new_tokens=base.max_new_tokens if args.max_new_tokens is None else args.max_new_tokens,
    )


def _gateway(args: argparse.Namespace) -> Gateway:
    backend_name = args.backend
    mode = args.mode
    store = None
    if mode in ("record", "replay"):
        store = ReplayStore(Path(_cfg(args, "fixtures")) / f"{backend_name}.jsonl")
    backend = None
    if mode in ("live", "record"):
        backend = HttpBackend(backend_name, fim_template=args.fim_template)
    return Gateway(
        backend=backend,
        store=store,
        mode=mode,
        max_in_flight=int(_cfg(args, "max_in_flight")),
        requests_per_minute=args.rpm,
        max_requests=args.max_requests,
    )


# --- subcommands ---------------------------------------------------------------


def cmd_ingest(args) -> int:
    manifest, files = corpus.ingest(
        root=args.root,
        languages=_languages_arg(args.languages),
        exclusions=args.exclude or [],
        seed=int(_cfg(args, "seed")),
        max_bytes=(args.max_kib * 1024) if args.max_kib else corpus.MAX_FILE_BYTES,
    )
    out = Path(args.out)
    corpus.write_corpus(files, out)
    manifest_path = out.with_suffix(".manifest.json")
    corpus.write_manifest(manifest, manifest_path)
    _note(
        f"ingested {len(files)} files ({manifest.counts}), "
        f"skipped {len(manifest.skipped)} of {manifest.discovered} -> {out}"
    )
    return 0


def cmd_localize(args) -> int:
    files = corpus.load_corpus(args.corpus)
    jobs = int(_cfg(args, "jobs"))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        per_file = list(pool.map(locator.locate, files))
    sites = [site for group in per_file for site in group]
    if args.exclude_stdlib:
        sites = locator.drop_stdlib(sites)
    _write_jsonl(args.out, [s.to_dict() for s in sites])
    resolved = sum(s.receiver_kind is not locator.ReceiverKind.UNRESOLVED for s in sites)
    _note(f"located {len(sites)} call sites ({resolved} resolved) -> {args.out}")
    return 0


def cmd_gen_tasks(args) -> int:
    files = {f.file_id: f for f in corpus.load_corpus(args.corpus)}
    sites = [locator.ApiCallSite.from_dict(d) for d in _read_jsonl(args.callsites)]
    seed = int(_cfg(args, "seed"))
    cap = int(_cfg(args, "cap"))
    prefix_chars = int(_cfg(args, "prefix_chars"))

    by_language: dict[Language, list] = {}
    for site in sites:
        by_language.setdefault(site.language, []).append(site)

    tasks: list[TaskInstance] = []
    for language in sorted(by_language, key=lambda l: l.value):
        sampled = locator.dedup_sample(by_language[language], cap, seed)
        _note(f"{language.value}: sampled {len(sampled)} sites")
        for site in sampled:
            file = files.get(site.file_id)
            if file is None:
                raise ApiBenchError(f"call site references unknown file {site.file_id}")
            if args.kind in ("method", "both"):
                tasks.append(
                    taskgen.gen_method_infill(
                        site, file, prefix_chars, extend_suffix_to_eof=args.suffix_to_eof
                    )
                )
            if args.kind in ("param", "both"):
                tasks.append(taskgen.gen_param_completion(site, file, prefix_chars))
    _write_jsonl(args.out, [t.to_dict() for t in tasks])
    _note(f"generated {len(tasks)} tasks -> {args.out}")
    return 0


def _task_request(task: TaskInstance, model: str, params: GenParams) -> GenRequest:
    if task.kind is TaskKind.METHOD_INFILL:
        return GenRequest(
            mode=GenMode.FILL_IN_MIDDLE,
            model_name=model,
            params=params,
            prefix=task.prefix,
            suffix=task.suffix,
        )
    return GenRequest(
        mode=GenMode.LEFT_TO_RIGHT, model_name=model, params=params, prefix=task.prefix
    )


def cmd_complete(args) -> int:
    tasks = [TaskInstance.from_dict(d) for d in _read_jsonl(args.tasks)]
    params = _gen_params(args)
    gw = _gateway(args)
    jobs = int(_cfg(args, "jobs"))

    def one(task: TaskInstance) -> CompletionRecord:
        resp = gw.generate(_task_request(task, args.model, params))
        return CompletionRecord(
            task_id=task.task_id,
            model=args.model,
            backend=resp.backend,
            text=resp.text,
            cached=resp.cached,
            latency_ms=resp.latency_ms,
        )

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        records = list(pool.map(one, tasks))
    _write_jsonl(args.out, [r.to_dict() for r in records])
    _note(f"completed {len(records)} tasks via {args.backend} ({args.mode}) -> {args.out}")
    return 0


_METRIC_KEYS = {"bleu": "bleu", "cbs": "cbs_f3", "em": "em_pct"}


def cmd_score(args) -> int:
    tasks = {t.task_id: t for t in (TaskInstance.from_dict(d) for d in _read_jsonl(args.tasks))}
    smoothing = metrics.Smoothing(_cfg(args, "smoothing"))
    selected = [m.strip() for m in (args.metrics or "bleu,cbs,em").split(",") if m.strip()]
    unknown = [m for m in selected if m not in _METRIC_KEYS]
    if unknown:
        raise ApiBenchError(f"unknown metrics: {unknown}; choose from {sorted(_METRIC_KEYS)}")

    scored: list[metrics.ScoredTask] = []
    if args.completions:
        for row in _read_jsonl(args.completions):
            rec = CompletionRecord.from_dict(row)
            task = tasks.get(rec.task_id)
            if task is None:
                raise ApiBenchError(f"completion for unknown task {rec.task_id}")
            scored.append(metrics.score_completion(task, rec.text, rec.model, smoothing))
    else:
        model_label = args.model_label or "repair-model"
        for row in _read_jsonl(args.repairs):
            trace = drfix.RepairTrace.from_dict(row)
            task = tasks.get(trace.task_id)
            if task is None:
                raise ApiBenchError(f"repair trace for unknown task {trace.task_id}")
            reference = task.prefix + task.ground_truth + task.suffix
            cand_tokens = metrics.code_tokens(trace.repaired_code, task.language)
            ref_tokens = metrics.code_tokens(reference, task.language)
            scored.append(
                metrics.ScoredTask(
                    task_id=trace.task_id,
                    model=model_label,
                    language=task.language,
                    kind=task.kind,
                    em=metrics.em_snippet(trace.repaired_code, reference, task.language),
                    bleu=metrics.bleu(cand_tokens, ref_tokens, smoothing).score if ref_tokens else 0.0,
                    cbs_f3=metrics.codebertscore(cand_tokens, ref_tokens, metrics.OneHotProvider()).f3,
                    extract_ok=True,
                )
            )

    _write_jsonl(args.out_scores, [s.to_dict() for s in scored])
    aggregated = metrics.aggregate(scored)
    filtered = {
        model: {
            language: {
                kind: {
                    **{_METRIC_KEYS[m]: cell[_METRIC_KEYS[m]] for m in selected},
                    "n": cell["n"],
                }
                for kind, cell in by_kind.items()
            }
            for language, by_kind in by_lang.items()
        }
        for model, by_lang in aggregated.items()
    }
    _write_json(args.out_report, filtered)
    _note(f"scored {len(scored)} rows -> {args.out_scores}, {args.out_report}")
    return 0


def cmd_sample_failures(args) -> int:
    scored = [metrics.ScoredTask.from_dict(d) for d in _read_jsonl(args.scores)]
    cells = annotate.sample_failures(scored, int(_cfg(args, "n_per_cell")), int(_cfg(args, "seed")))
    payload = {
        "cells": {"|".join(key): ids for key, ids in cells.items()},
        "task_ids": [tid for key in sorted(cells) for tid in cells[key]],
    }
    _write_json(args.out, payload)
    _note(f"sampled {len(payload['task_ids'])} failures over {len(cells)} cells -> {args.out}")
    return 0


def cmd_mitigation_set(args) -> int:
    labels = annotate.load_labels(args.labels)
    scored = [metrics.ScoredTask.from_dict(d) for d in _read_jsonl(args.scores)]
    language_by_task = {
        d["task_id"]: d["language"] for d in _read_jsonl(args.tasks)
    }
    clean_pool = [s.task_id for s in scored if s.em]
    ms = annotate.build_mitigation_set(
        labels=labels,
        clean_pool=clean_pool,
        fraction=float(_cfg(args, "fraction")),
        clean_count=int(_cfg(args, "clean_count")),
        seed=int(_cfg(args, "seed")),
        language_by_task=language_by_task,
    )
    _write_json(args.out, ms.to_dict())
    _note(f"mitigation set: {len(ms.misused)} misused + {len(ms.clean)} clean -> {args.out}")
    return 0


def _load_snippets(args) -> list[dict]:
    """Records of {task_id, language, snippet} to repair."""
    if args.snippets:
        return _read_jsonl(args.snippets)
    if not (args.mitigation and args.tasks and args.completions):
        raise ApiBenchError("drfix needs --snippets or --mitigation with --tasks and --completions")
    ms = annotate.MitigationSet.from_dict(json.loads(Path(args.mitigation).read_text("utf-8")))
    tasks = {t.task_id: t for t in (TaskInstance.from_dict(d) for d in _read_jsonl(args.tasks))}
    texts = {d["task_id"]: d["text"] for d in _read_jsonl(args.completions)}
    records = []
    for task_id, _category in ms.misused:
        task = tasks[task_id]
        raw = texts.get(task_id, "")
        try:
            element = taskgen.extract_element(raw, task.kind, task.language)
        except UnbalancedOutput:
            element = raw
        records.append(
            {
                "task_id": task_id,
                "language": task.language.value,
                "snippet": task.prefix + element + task.suffix,
            }
        )
    for task_id in ms.clean:
        task = tasks[task_id]
        records.append(
            {
                "task_id": task_id,
                "language": task.language.value,
                "snippet": task.prefix + task.ground_truth + task.suffix,
            }
        )
    return records


def cmd_drfix(args) -> int:
    snippets = _load_snippets(args)
    variant = drfix.PipelineVariant(args.variant)
    pack = drfix.TemplatePack(args.prompts) if args.prompts else drfix.TemplatePack.default()
    store = drfix.ExemplarStore.from_pack(pack)
    params = _gen_params(args)
    gw = _gateway(args)
    jobs = int(_cfg(args, "jobs"))

    def one(rec: dict) -> dict:
        try:
            trace = drfix.run_pipeline(
                task_id=rec["task_id"],
                snippet=rec["snippet"],
                variant=variant,
                gateway=gw,
                params=params,
                model_name=args.model,
                language=Language(rec["language"]),
                store=store,
                pack=pack,
            )
            return trace.to_dict()
        except (drfix.CategoryParseFailure, drfix.RepairExtractionFailure) as exc:
            _note(f"{rec['task_id']}: {type(exc).__name__}: {exc}")
            return {
                "task_id": rec["task_id"],
                "variant": variant.value,
                "detect_raw": "",
                "detected_category": None,
                "reason_raw": "",
                "fix_raw": "",
                "repaired_code": rec["snippet"],
                "refused": False,
                "requests_made": 0,
                "error": type(exc).__name__,
            }

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        traces = list(pool.map(one, snippets))
    _write_jsonl(args.out, traces)
    refused = sum(bool(t.get("refused")) for t in traces)
    _note(f"repaired {len(traces)} snippets ({refused} refusals) -> {args.out}")
    return 0


def cmd_report(args) -> int:
    if not args.table and not args.overlap_scores:
        raise ApiBenchError("report needs --table and/or --overlap-scores")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.table:
        data: dict = {}
        for item in args.table:
            if "=" in item:
                label, path = item.split("=", 1)
            else:
                label, path = Path(item).stem, item
            rep = json.loads(Path(path).read_text("utf-8"))
            data.update(report.table_from_report(rep, label))
        spec = report.spec_from_data(data)
        for fmt in [f.strip() for f in _cfg(args, "formats").split(",") if f.strip()]:
            rendered = report.render(spec, data, fmt, strict=args.strict)
            target = out_dir / f"tables.{fmt}"
            target.write_text(rendered, encoding="utf-8")
            _note(f"wrote {target}")

    if args.overlap_scores:
        if len(args.overlap_scores) != 3:
            raise ApiBenchError("--overlap-scores takes exactly three scores files")
        sets = []
        labels = []
        for path in args.overlap_scores:
            rows = [metrics.ScoredTask.from_dict(d) for d in _read_jsonl(path)]
            if args.overlap_language:
                rows = [r for r in rows if r.language.value == args.overlap_language]
            if args.overlap_kind:
                rows = [r for r in rows if r.kind.value == args.overlap_kind]
            labels.append(rows[0].model if rows else Path(path).stem)
            sets.append({r.task_id for r in rows if not r.em})
        part = report.overlap_partition(*sets)
        payload = {
            "labels": labels,
            "regions": part.to_dict(),
            "sizes": {"a": part.size_a, "b": part.size_b, "c": part.size_c},
            "total": part.total,
        }
        target = out_dir / "overlap.json"
        _write_json(target, payload)
        _note(f"wrote {target}")
    return 0


# --- parser --------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--seed", type=int, help="single source of randomness (default 42)")
    p.add_argument("--jobs", type=int, help="worker threads (default: logical CPUs)")


def _add_gateway_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", required=True, help="backend name; names the fixture file")
    p.add_argument("--model", required=True, help="model name sent to the backend")
    p.add_argument("--mode", choices=["live", "record", "replay"], default="replay")
    p.add_argument("--fixtures", help="directory of replay stores (default fixtures/)")
    p.add_argument("--preset", choices=sorted(PARAM_PRESETS))
    p.add_argument("--temperature", type=float)
    p.add_argument("--top-p", dest="top_p", type=float)
    p.add_argument("--max-new-tokens", dest="max_new_tokens", type=int)
    p.add_argument("--max-requests", dest="max_requests", type=int)
    p.add_argument("--rpm", type=int, help="live requests per minute")
    p.add_argument("--max-in-flight", dest="max_in_flight", type=int)
    p.add_argument("--fim-template", dest="fim_template")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apibench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a source tree into corpus.jsonl")
    p.add_argument("--root", required=True)
    p.add_argument("--out", default="corpus.jsonl")
    p.add_argument("--languages", help="comma list, e.g. python,java")
    p.add_argument("--exclude", action="append", help="glob to skip; repeatable")
    p.add_argument("--max-kib", dest="max_kib", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("localize", help="find API call sites in the corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default="callsites.jsonl")
    p.add_argument("--exclude-stdlib", dest="exclude_stdlib", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("gen-tasks", help="sample signatures and emit masked tasks")
    p.add_argument("--corpus", required=True)
    p.add_argument("--callsites", required=True)
    p.add_argument("--out", default="tasks.jsonl")
    p.add_argument("--kind", choices=["method", "param", "both"], default="both")
    p.add_argument("--cap", type=int, help="per-language signature cap (default 3000)")
    p.add_argument("--prefix-chars", dest="prefix_chars", type=int)
    p.add_argument("--suffix-to-eof", dest="suffix_to_eof", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_gen_tasks)

    p = sub.add_parser("complete", help="request completions for every task")
    p.add_argument("--tasks", required=True)
    p.add_argument("--out", default="completions.jsonl")
    _add_gateway_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("score", help="score completions or repairs, emit report.json")
    p.add_argument("--tasks", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--completions")
    group.add_argument("--repairs")
    p.add_argument("--model-label", dest="model_label", help="row label for --repairs scoring")
    p.add_argument("--out-scores", dest="out_scores", default="scores.jsonl")
    p.add_argument("--out-report", dest="out_report", default="report.json")
    p.add_argument("--smoothing", choices=[s.value for s in metrics.Smoothing])
    p.add_argument("--metrics", help="comma list of bleu,cbs,em (default all)")
    _add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sample-failures", help="seeded per-cell sample of EM failures")
    p.add_argument("--scores", required=True)
    p.add_argument("--n-per-cell", dest="n_per_cell", type=int)
    p.add_argument("--out", default="failures.json")
    _add_common(p)
    p.set_defaults(func=cmd_sample_failures)

    p = sub.add_parser("mitigation-set", help="stratified misuse sample plus clean controls")
    p.add_argument("--labels", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--fraction", type=float)
    p.add_argument("--clean-count", dest="clean_count", type=int)
    p.add_argument("--out", default="mitigation.json")
    _add_common(p)
    p.set_defaults(func=cmd_mitigation_set)

    p = sub.add_parser("drfix", help="run the staged repair pipeline")
    p.add_argument("--snippets", help="JSONL of {task_id, language, snippet}")
    p.add_argument("--mitigation")
    p.add_argument("--tasks")
    p.add_argument("--completions")
    p.add_argument("--variant", choices=[v.value for v in drfix.PipelineVariant], default="full")
    p.add_argument("--prompts", help="template pack directory (default: bundled pack)")
    p.add_argument("--out", default="repairs.jsonl")
    _add_gateway_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_drfix, preset_default="repair")

    p = sub.add_parser("report", help="render tables and failure overlaps")
    p.add_argument("--table", action="append", help="label=report.json; repeatable")
    p.add_argument("--out-dir", dest="out_dir", default="reports")
    p.add_argument("--formats", help="comma list of csv,json,txt")
    p.add_argument("--strict", action="store_true", help="missing cells become errors")
    p.add_argument("--overlap-scores", dest="overlap_scores", nargs="+")
    p.add_argument("--overlap-language", dest="overlap_language")
    p.add_argument("--overlap-kind", dest="overlap_kind")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _load_config(getattr(args, "config", None))
        if getattr(args, "preset", None) is None and hasattr(args, "preset"):
            args.preset = args._config.get("preset", getattr(args, "preset_default", None))
        return args.func(args)
    except ApiBenchError as exc:
        _note(f"error: {exc}")
        return 1
    except OSError as exc:
        _note(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
