"""Mixed error rate evaluation over hypothesis/reference manifests.

The unit inventory follows the natural granularity of each script: every
Han character is one unit, every maximal Latin/digit run is one unit. Edit
distance over those units therefore reduces to character error rate on
pure-Han text and to word error rate on pure-Latin text, and handles
code-switched text uniformly in between.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CONTINUATION_TAG, Manifest

__all__ = [
    "EvalError",
    "EvalReport",
    "normalize_text",
    "tokenize_mixed",
    "edit_ops",
    "mer",
    "evaluate_manifest",
    "write_report",
]


class EvalError(ValueError):
    """Raised when a reference side cannot be scored."""


def _is_han(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0xF900 <= cp <= 0xFAFF
    )


def normalize_text(s: str, *, continuation_tag: str = CONTINUATION_TAG) -> str:
    """Lowercase Latin, strip punctuation and pipeline tags, tidy whitespace."""
    s = s.replace(continuation_tag, " ")
    kept = []
    for ch in s:
        if unicodedata.category(ch).startswith("P"):
            continue
        kept.append(ch.lower())
    return " ".join("".join(kept).split())


def tokenize_mixed(s: str) -> list[str]:
    """Split normalized text into scoring units: Han chars and Latin runs."""
    units: list[str] = []
    run: list[str] = []

    def flush() -> None:
        if run:
            units.append("".join(run))
            run.clear()

    for ch in s:
        if _is_han(ch):
            flush()
            units.append(ch)
        elif ch.isalnum():
            run.append(ch)
        else:
            flush()
    flush()
    return units


def edit_ops(ref: list[str], hyp: list[str]) -> tuple[int, int, int]:
    """Substitution/insertion/deletion counts of one minimal edit script."""
    m, n = len(ref), len(hyp)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dp[i][0] = i
    for j in range(n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            dp[i][j] = min(
                dp[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                dp[i - 1][j] + 1,
                dp[i][j - 1] + 1,
            )
    subs = ins = dels = 0
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            subs += ref[i - 1] != hyp[j - 1]
            i -= 1
            j -= 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return subs, ins, dels


def mer(ref: str, hyp: str) -> float:
    """Mixed error rate of one hypothesis against one reference."""
    ref_units = tokenize_mixed(normalize_text(ref))
    if not ref_units:
        raise EvalError(f"reference {ref!r} has no scorable units")
    hyp_units = tokenize_mixed(normalize_text(hyp))
    s, i, d = edit_ops(ref_units, hyp_units)
    return (s + i + d) / len(ref_units)


@dataclass
class EvalReport:
    """Corpus-level mixed error rate with per-record breakdown."""

    dataset: str
    mer: float
    substitutions: int
    insertions: int
    deletions: int
    ref_units: int
    per_record: list[tuple[str, float]] = field(default_factory=list)
    missing_ids: list[str] = field(default_factory=list)


def evaluate_manifest(refs: Manifest, hyps: Manifest) -> EvalReport:
    """Micro-averaged MER: total edits over total reference units.

    Records present in refs but absent from hyps are flagged and scored
    against an empty hypothesis, i.e. as full deletions.
    """
    if len(refs) == 0:
        raise EvalError("empty reference manifest")
    hyp_by_id = hyps.by_id()
    total_s = total_i = total_d = total_units = 0
    per_record: list[tuple[str, float]] = []
    missing: list[str] = []
    for ref in refs:
        ref_units = tokenize_mixed(normalize_text(ref.text))
        if not ref_units:
            raise EvalError(f"reference {ref.id!r} has no scorable units")
        hyp = hyp_by_id.get(ref.id)
        if hyp is None:
            missing.append(ref.id)
            hyp_units: list[str] = []
        else:
            hyp_units = tokenize_mixed(normalize_text(hyp.text))
        s, i, d = edit_ops(ref_units, hyp_units)
        total_s += s
        total_i += i
        total_d += d
        total_units += len(ref_units)
        per_record.append((ref.id, (s + i + d) / len(ref_units)))
    return EvalReport(
        dataset=refs.name,
        mer=(total_s + total_i + total_d) / total_units,
        substitutions=total_s,
        insertions=total_i,
        deletions=total_d,
        ref_units=total_units,
        per_record=per_record,
        missing_ids=missing,
    )


def write_report(report: EvalReport, path: str | Path) -> None:
    """Write a readable text report plus a machine-readable JSON twin."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"dataset: {report.dataset}",
        f"mer: {report.mer:.6f}",
        f"substitutions: {report.substitutions}",
        f"insertions: {report.insertions}",
        f"deletions: {report.deletions}",
        f"ref_units: {report.ref_units}",
        f"records: {len(report.per_record)}",
        f"missing_hypotheses: {len(report.missing_ids)}",
        "",
    ]
    lines += [f"{rid}\t{value:.6f}" for rid, value in report.per_record]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = {
        "dataset": report.dataset,
        "mer": round(report.mer, 6),
        "substitutions": report.substitutions,
        "insertions": report.insertions,
        "deletions": report.deletions,
        "ref_units": report.ref_units,
        "missing_ids": report.missing_ids,
        "per_record": [[rid, round(value, 6)] for rid, value in report.per_record],
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(summary, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
