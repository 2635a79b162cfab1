"""Command-line entry point: one subcommand per stage plus a pipeline driver.

Stages compose through manifest files only; there is no hidden state between
them, so any stage can be re-run in isolation. Every invocation writes a
``<output>.summary.json`` with inputs, outputs, counts, seed, and the config
hash, and a global ``--seed`` makes runs bit-reproducible.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .alignment import TextGridError, parse_textgrid, resegment
from .audio import AudioError, read_wav
from .augment import AugmentConfig, assemble_long_form, mix_code_switch, perturb
from .backends import BackendError, open_backend
from .batch import run_ordered
from .config import ConfigError, PipelineConfig, config_hash, load_config
from .corpus import (
    LanguageTag,
    Manifest,
    ManifestError,
    Utterance,
    read_manifest,
    write_manifest,
)
from .evaluate import EvalError, evaluate_manifest, write_report
from .filtering import FilterConfig, filter_pairs
from .fixtures import (
    render_speech_fixtures,
    sample_en_text,
    sample_zh_text,
    text_manifest,
)
from .mixer import compose_mix
from .pseudo_label import pseudo_label_corpus
from .seeding import derive_seed
from .synthesis import SpeakerPool, synthesize_corpus

logger = logging.getLogger(__name__)


def _write_summary(
    out_path: str | Path,
    stage: str,
    inputs: dict[str, object],
    outputs: dict[str, object],
    counts: dict[str, int],
    seed: int,
    cfg_hash: str,
) -> None:
    summary = {
        "stage": stage,
        "inputs": inputs,
        "outputs": outputs,
        "counts": counts,
        "seed": seed,
        "config_hash": cfg_hash,
    }
    path = Path(str(out_path) + ".summary.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _load_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = PipelineConfig()
    if getattr(args, "seed", None) is not None:
        cfg = _reseed(cfg, args.seed)
    return cfg


def _reseed(cfg: PipelineConfig, seed: int) -> PipelineConfig:
    cfg.seed = seed
    for section, ep in list(cfg.backends.items()):
        params = dict(ep.params)
        params["seed"] = seed
        cfg.backends[section] = ep.__class__(
            role=ep.role, kind=ep.kind, command=ep.command, params=params, timeout_s=ep.timeout_s
        )
    cfg.augment = AugmentConfig(
        l_max_s=cfg.augment.l_max_s,
        continuation_tag=cfg.augment.continuation_tag,
        perturb_probability=cfg.augment.perturb_probability,
        snr_range_db=cfg.augment.snr_range_db,
        blur_probability=cfg.augment.blur_probability,
        blur_window_ms_range=cfg.augment.blur_window_ms_range,
        seed=seed,
    )
    return cfg


# --- stage commands --------------------------------------------------------


def _cmd_pseudo_label(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    speech = read_manifest(args.infile)
    result = pseudo_label_corpus(speech, cfg.endpoint("asr"), args.parallelism or cfg.parallelism)
    write_manifest(result.labeled, args.out)
    write_manifest(result.rejects, str(args.out) + ".rejects")
    _write_summary(
        args.out,
        "pseudo-label",
        {"manifest": str(args.infile)},
        {"manifest": str(args.out), "rejects": str(args.out) + ".rejects"},
        {"in": len(speech), "out": len(result.labeled), "rejects": len(result.rejects)},
        cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_synthesize(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    if args.texts:
        lines = [ln.strip() for ln in Path(args.texts).read_text(encoding="utf-8").splitlines()]
        texts = text_manifest(
            [ln for ln in lines if ln], LanguageTag(args.lang), Path(args.texts).stem
        )
    else:
        texts = read_manifest(args.infile)
    pool = SpeakerPool(cfg.speakers, seed=cfg.seed)
    result = synthesize_corpus(
        texts,
        cfg.endpoint("tts"),
        pool,
        args.parallelism or cfg.parallelism,
        out_dir=args.audio_dir,
    )
    write_manifest(result.synthesized, args.out)
    write_manifest(result.rejects, str(args.out) + ".rejects")
    _write_summary(
        args.out,
        "synthesize",
        {"texts": str(args.texts or args.infile)},
        {"manifest": str(args.out), "audio_dir": str(args.audio_dir)},
        {"in": len(texts), "out": len(result.synthesized), "rejects": len(result.rejects)},
        cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    synth = read_manifest(args.infile)
    filter_cfg = FilterConfig(
        alpha=args.alpha if args.alpha is not None else cfg.alpha,
        validator=cfg.endpoint("validator"),
        phonemizer=cfg.phonemizer,
        table_path=cfg.table_path,
    )
    outcome = filter_pairs(synth, filter_cfg, args.parallelism or cfg.parallelism)
    write_manifest(outcome.kept, args.out)
    write_manifest(outcome.removed, args.removed)
    write_manifest(outcome.rejects, str(args.out) + ".rejects")
    _write_summary(
        args.out,
        "filter",
        {"manifest": str(args.infile), "alpha": filter_cfg.alpha},
        {"kept": str(args.out), "removed": str(args.removed)},
        {
            "in": len(synth),
            "kept": len(outcome.kept),
            "removed": len(outcome.removed),
            "rejects": len(outcome.rejects),
        },
        cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _attach_alignments(
    m: Manifest,
    cfg: PipelineConfig,
    parallelism: int,
    textgrid_dir: str | None,
) -> tuple[Manifest, Manifest]:
    if textgrid_dir is not None:
        def aligned(record: Utterance) -> Utterance:
            grid = Path(textgrid_dir) / f"{record.id}.TextGrid"
            return record.evolved(segments=tuple(parse_textgrid(grid)))

        results = run_ordered(m.records, aligned, parallelism)
    else:
        with open_backend(cfg.endpoint("aligner"), parallelism) as backend:

            def aligned(record: Utterance) -> Utterance:
                audio = read_wav(record.audio_path)
                return record.evolved(segments=tuple(backend.align(audio, record.text)))

            results = run_ordered(m.records, aligned, parallelism)
    good: list[Utterance] = []
    bad: list[Utterance] = []
    for record, value, error in results:
        if error is not None or value is None:
            logger.warning("alignment failed on %s: %s", record.id, error)
            bad.append(record)
        else:
            good.append(value)
    return Manifest(good, name=f"{m.name}.aligned"), Manifest(bad, name=f"{m.name}.rejects")


def _cmd_align_ingest(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    m = read_manifest(args.infile)
    aligned, rejects = _attach_alignments(
        m, cfg, args.parallelism or cfg.parallelism, args.textgrid_dir
    )
    write_manifest(aligned, args.out)
    write_manifest(rejects, str(args.out) + ".rejects")
    _write_summary(
        args.out,
        "align-ingest",
        {"manifest": str(args.infile), "textgrid_dir": args.textgrid_dir},
        {"manifest": str(args.out)},
        {"in": len(m), "out": len(aligned), "rejects": len(rejects)},
        cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_resegment(args: argparse.Namespace) -> int:
    m = read_manifest(args.infile)
    snippets: list[Utterance] = []
    for record in m:
        snippets.extend(
            resegment(record, args.min_s, args.max_s, out_dir=args.audio_dir)
        )
    out = Manifest(snippets, name=f"{m.name}.snippets")
    write_manifest(out, args.out)
    _write_summary(
        args.out,
        "resegment",
        {"manifest": str(args.infile), "min_s": args.min_s, "max_s": args.max_s},
        {"manifest": str(args.out), "audio_dir": str(args.audio_dir)},
        {"in": len(m), "out": len(out)},
        0,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _augment_cfg(args: argparse.Namespace, cfg: PipelineConfig) -> AugmentConfig:
    base = cfg.augment
    return AugmentConfig(
        l_max_s=args.l_max if args.l_max is not None else base.l_max_s,
        continuation_tag=base.continuation_tag,
        perturb_probability=base.perturb_probability,
        snr_range_db=base.snr_range_db,
        blur_probability=base.blur_probability,
        blur_window_ms_range=base.blur_window_ms_range,
        seed=args.seed if args.seed is not None else base.seed,
    )


def _cmd_augment_longform(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    pool = read_manifest(args.infile)
    out = assemble_long_form(
        pool, _augment_cfg(args, cfg), args.count, out_dir=args.audio_dir
    )
    write_manifest(out, args.out)
    _write_summary(
        args.out,
        "augment-longform",
        {"manifest": str(args.infile), "count": args.count},
        {"manifest": str(args.out), "audio_dir": str(args.audio_dir)},
        {"in": len(pool), "out": len(out)},
        args.seed if args.seed is not None else cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_augment_codeswitch(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    pool_a = read_manifest(args.in_a)
    pool_b = read_manifest(args.in_b)
    out = mix_code_switch(
        pool_a, pool_b, _augment_cfg(args, cfg), args.count, out_dir=args.audio_dir
    )
    write_manifest(out, args.out)
    _write_summary(
        args.out,
        "augment-codeswitch",
        {"pool_a": str(args.in_a), "pool_b": str(args.in_b), "count": args.count},
        {"manifest": str(args.out), "audio_dir": str(args.audio_dir)},
        {"in_a": len(pool_a), "in_b": len(pool_b), "out": len(out)},
        args.seed if args.seed is not None else cfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_perturb(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    m = read_manifest(args.infile)
    base = cfg.augment
    pcfg = AugmentConfig(
        l_max_s=base.l_max_s,
        continuation_tag=base.continuation_tag,
        perturb_probability=(
            args.probability if args.probability is not None else base.perturb_probability
        ),
        snr_range_db=(
            (args.snr_low, args.snr_high)
            if args.snr_low is not None and args.snr_high is not None
            else base.snr_range_db
        ),
        blur_probability=(
            args.blur_probability if args.blur_probability is not None else base.blur_probability
        ),
        blur_window_ms_range=base.blur_window_ms_range,
        seed=args.seed if args.seed is not None else base.seed,
    )
    noise_bank = None
    if args.noise_dir:
        noise_bank = [read_wav(p) for p in sorted(Path(args.noise_dir).glob("*.wav"))]
    result = perturb(m, pcfg, noise_bank, out_dir=args.audio_dir)
    write_manifest(result.perturbed, args.out)
    write_manifest(result.rejects, str(args.out) + ".rejects")
    _write_summary(
        args.out,
        "perturb",
        {"manifest": str(args.infile)},
        {"manifest": str(args.out), "audio_dir": str(args.audio_dir)},
        {"in": len(m), "out": len(result.perturbed), "rejects": len(result.rejects)},
        pcfg.seed,
        config_hash(getattr(args, "config", None)),
    )
    return 0


def _cmd_mix(args: argparse.Namespace) -> int:
    spec = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    sources = [
        (read_manifest(entry["path"]), float(entry.get("weight", 1.0)))
        for entry in spec["sources"]
    ]
    total = int(spec["total"])
    seed = int(spec.get("seed", 0)) if args.seed is None else args.seed
    out = compose_mix(sources, total, seed, replace=bool(spec.get("replace", True)))
    write_manifest(out, args.out)
    _write_summary(
        args.out,
        "mix",
        {"spec": str(args.spec)},
        {"manifest": str(args.out)},
        {"total": len(out)},
        seed,
        config_hash(args.spec),
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    refs = read_manifest(args.refs)
    hyps = read_manifest(args.hyps)
    report = evaluate_manifest(refs, hyps)
    write_report(report, args.report)
    print(f"mer {report.mer:.6f} over {report.ref_units} units ({len(report.per_record)} records)")
    _write_summary(
        args.report,
        "eval",
        {"refs": str(args.refs), "hyps": str(args.hyps)},
        {"report": str(args.report)},
        {"records": len(report.per_record), "missing": len(report.missing_ids)},
        0,
        "none",
    )
    return 0


# --- pipeline driver ---------------------------------------------------------


def run_pipeline(cfg: PipelineConfig, cfg_hash: str) -> Path:
    """Run the full curation chain under cfg.run_dir; returns the final manifest path."""
    run_dir = Path(cfg.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    par = cfg.parallelism

    # inputs: collected speech and raw text, generated here when requested
    if cfg.fixtures.generate:
        speech = render_speech_fixtures(run_dir / "speech", cfg.fixtures.zh_clips, cfg.seed)
        write_manifest(speech, run_dir / "speech.mf")
        rng = random.Random(derive_seed("pipeline-texts", cfg.seed))
        zh_texts = [sample_zh_text(rng, 6, 12) for _ in range(cfg.fixtures.zh_texts)]
        en_texts = [sample_en_text(rng, 4, 8) for _ in range(cfg.fixtures.en_texts)]
    elif cfg.speech_manifest and cfg.text_file:
        speech = read_manifest(cfg.speech_manifest)
        lines = [
            ln.strip()
            for ln in Path(cfg.text_file).read_text(encoding="utf-8").splitlines()
            if ln.strip()
        ]
        zh_texts = [ln for ln in lines if not ln.startswith("en:")]
        en_texts = [ln[3:].strip() for ln in lines if ln.startswith("en:")]
    else:
        raise ConfigError(
            "pipeline needs [fixtures] generate=true or both speech_manifest and text_file"
        )

    # stage 1: pseudo-label the collected speech
    labeled = pseudo_label_corpus(speech, cfg.endpoint("asr"), par)
    write_manifest(labeled.labeled, run_dir / "pseudo.mf")
    write_manifest(labeled.rejects, run_dir / "pseudo.mf.rejects")

    # stage 2: synthesize pairs from the text corpus
    pool = SpeakerPool(cfg.speakers, seed=cfg.seed)
    zh_manifest = text_manifest(zh_texts, LanguageTag.ZH, "zh-texts", id_prefix="zh")
    synth = synthesize_corpus(
        zh_manifest, cfg.endpoint("tts"), pool, par, out_dir=run_dir / "synth"
    )
    write_manifest(synth.synthesized, run_dir / "synth.mf")
    write_manifest(synth.rejects, run_dir / "synth.mf.rejects")

    en_manifest = text_manifest(en_texts, LanguageTag.EN, "en-texts", id_prefix="en")
    en_synth = synthesize_corpus(
        en_manifest, cfg.endpoint("tts"), pool, par, out_dir=run_dir / "synth-en"
    )
    write_manifest(en_synth.synthesized, run_dir / "synth-en.mf")

    # stage 3: validator-driven filtering of the synthesized pairs
    outcome = filter_pairs(
        synth.synthesized,
        FilterConfig(
            alpha=cfg.alpha,
            validator=cfg.endpoint("validator"),
            phonemizer=cfg.phonemizer,
            table_path=cfg.table_path,
        ),
        par,
    )
    write_manifest(outcome.kept, run_dir / "kept.mf")
    write_manifest(outcome.removed, run_dir / "removed.mf")
    write_manifest(outcome.rejects, run_dir / "kept.mf.rejects")

    # stage 4: align and resegment the surviving pairs
    aligned, align_rejects = _attach_alignments(outcome.kept, cfg, par, None)
    write_manifest(aligned, run_dir / "aligned.mf")
    write_manifest(align_rejects, run_dir / "aligned.mf.rejects")
    snippets: list[Utterance] = []
    for record in aligned:
        snippets.extend(
            resegment(
                record, cfg.min_snippet_s, cfg.max_snippet_s, out_dir=run_dir / "snippets"
            )
        )
    snippet_manifest = Manifest(snippets, name="snippets")
    write_manifest(snippet_manifest, run_dir / "snippets.mf")

    en_aligned, _ = _attach_alignments(en_synth.synthesized, cfg, par, None)
    write_manifest(en_aligned, run_dir / "aligned-en.mf")

    # stage 5: long-form and code-switch augmentation
    longform = Manifest(name="longform")
    if cfg.longform_count > 0:
        longform = assemble_long_form(
            snippet_manifest, cfg.augment, cfg.longform_count, out_dir=run_dir / "longform"
        )
    write_manifest(longform, run_dir / "longform.mf")
    codeswitch = Manifest(name="codeswitch")
    if cfg.codeswitch_count > 0:
        codeswitch = mix_code_switch(
            snippet_manifest,
            en_aligned,
            cfg.augment,
            cfg.codeswitch_count,
            out_dir=run_dir / "codeswitch",
        )
    write_manifest(codeswitch, run_dir / "codeswitch.mf")

    # stage 6: perturb the augmented clips
    union = Manifest(longform.records + codeswitch.records, name="augmented")
    perturbed = perturb(union, cfg.augment, None, out_dir=run_dir / "perturbed")
    write_manifest(perturbed.perturbed, run_dir / "perturbed.mf")

    # stage 7: compose the final training mix
    final = compose_mix(
        [
            (perturbed.perturbed, 1.0),
            (snippet_manifest, 1.0),
            (en_aligned, 1.0),
        ],
        cfg.mix_total,
        cfg.seed,
        name="final",
    )
    final_path = run_dir / "final.mf"
    write_manifest(final, final_path)
    _write_summary(
        final_path,
        "pipeline",
        {"speech": len(speech), "zh_texts": len(zh_texts), "en_texts": len(en_texts)},
        {"manifest": str(final_path)},
        {
            "pseudo": len(labeled.labeled),
            "synth": len(synth.synthesized),
            "kept": len(outcome.kept),
            "removed": len(outcome.removed),
            "snippets": len(snippet_manifest),
            "longform": len(longform),
            "codeswitch": len(codeswitch),
            "final": len(final),
        },
        cfg.seed,
        cfg_hash,
    )
    return final_path


def _cmd_pipeline(args: argparse.Namespace) -> int:
    if args.action != "run":
        raise ValueError(f"unknown pipeline action {args.action!r}")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = _reseed(cfg, args.seed)
    if args.out_dir is not None:
        cfg.run_dir = args.out_dir
    final = run_pipeline(cfg, config_hash(args.config))
    print(f"final manifest: {final}")
    return 0


# --- argument parsing --------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config file (backend and stage defaults)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--parallelism", type=int, default=0, help="worker count (0 = config value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refinery",
        description="Self-refining speech-data curation stages, composable via manifest files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pseudo-label", help="transcribe an unpaired-speech manifest")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_pseudo_label)

    p = sub.add_parser("synthesize", help="render a text corpus to speech pairs")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--texts", help="plain text file, one sentence per line")
    group.add_argument("--in", dest="infile", help="manifest with text records")
    p.add_argument("--lang", default="zh", choices=["zh", "en", "mixed"])
    p.add_argument("--out", required=True)
    p.add_argument("--audio-dir", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_synthesize, texts=None, infile=None)

    p = sub.add_parser("filter", help="drop pairs whose validator PER reaches alpha")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--removed", required=True)
    p.add_argument("--alpha", type=float, default=None, help="PER threshold (default 0.6)")
    _add_common(p)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("align-ingest", help="attach aligner output to records")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--textgrid-dir", default=None, help="parse <id>.TextGrid files from here")
    _add_common(p)
    p.set_defaults(func=_cmd_align_ingest)

    p = sub.add_parser("resegment", help="split aligned records into 3-5 s snippets")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--min-s", type=float, default=3.0)
    p.add_argument("--max-s", type=float, default=5.0)
    p.add_argument("--config", help="unused; accepted for orchestration symmetry")
    p.set_defaults(func=_cmd_resegment)

    p = sub.add_parser("augment", help="concatenative augmentation")
    aug_sub = p.add_subparsers(dest="augment_kind", required=True)

    pl = aug_sub.add_parser("longform", help="assemble window-sized clips")
    pl.add_argument("--in", dest="infile", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--audio-dir", required=True)
    pl.add_argument("--count", type=int, required=True)
    pl.add_argument("--l-max", type=float, default=None)
    _add_common(pl)
    pl.set_defaults(func=_cmd_augment_longform)

    pc = aug_sub.add_parser("codeswitch", help="alternate clips from two language pools")
    pc.add_argument("--in-a", dest="in_a", required=True)
    pc.add_argument("--in-b", dest="in_b", required=True)
    pc.add_argument("--out", required=True)
    pc.add_argument("--audio-dir", required=True)
    pc.add_argument("--count", type=int, required=True)
    pc.add_argument("--l-max", type=float, default=None)
    _add_common(pc)
    pc.set_defaults(func=_cmd_augment_codeswitch)

    p = sub.add_parser("perturb", help="seeded noise injection and blurring")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--count", type=int, default=None, help="unused; parity with augment")
    p.add_argument("--l-max", type=float, default=None, help="unused; parity with augment")
    p.add_argument("--probability", type=float, default=None)
    p.add_argument("--blur-probability", type=float, default=None)
    p.add_argument("--snr-low", type=float, default=None)
    p.add_argument("--snr-high", type=float, default=None)
    p.add_argument("--noise-dir", default=None, help="optional WAV bank; white noise otherwise")
    _add_common(p)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("mix", help="compose the final corpus from weighted sources")
    p.add_argument("--spec", required=True, help="JSON: {sources: [{path, weight}], total, seed}")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("eval", help="mixed error rate over ref/hyp manifests")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("pipeline", help="config-driven end-to-end run")
    p.add_argument("action", choices=["run"])
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=None, help="override [pipeline] run_dir")
    p.set_defaults(func=_cmd_pipeline)

    return parser


_ERROR_CATEGORIES: list[tuple[type[Exception], str]] = [
    (ConfigError, "config"),
    (ManifestError, "manifest"),
    (TextGridError, "textgrid"),
    (AudioError, "audio"),
    (BackendError, "backend"),
    (FileNotFoundError, "missing-file"),
    (EvalError, "eval"),
    (ValueError, "invalid-input"),
]


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        for exc_type, category in _ERROR_CATEGORIES:
            if isinstance(exc, exc_type):
                print(f"error: {category}: {exc}", file=sys.stderr)
                return 1
        print(f"error: internal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
