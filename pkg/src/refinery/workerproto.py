"""Conformance runner for worker processes speaking the wire protocol.

Replays the bundled vector script against any worker command and reports
per-step pass/fail. Adapters in any language can be checked against the
same vectors the in-repo tests use.
"""

from __future__ import annotations

import json
import os
import select
import shlex
import subprocess
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

__all__ = ["StepResult", "load_vectors", "run_vectors"]


@dataclass
class StepResult:
    step: int
    kind: str
    ok: bool
    detail: str = ""


def load_vectors() -> dict:
    path = resources.files("refinery.data").joinpath("protocol_vectors.json")
    return json.loads(path.read_text(encoding="utf-8"))


def _read_line(proc: subprocess.Popen, timeout_s: float) -> str:
    assert proc.stdout is not None
    ready, _, _ = select.select([proc.stdout], [], [], timeout_s)
    if not ready:
        raise TimeoutError(f"no response within {timeout_s} s")
    line = proc.stdout.readline()
    if not line:
        raise EOFError("worker closed stdout")
    return line


def _segments_valid(raw: object, expected_count: int | None) -> str:
    if not isinstance(raw, list) or not raw:
        return "segments missing or empty"
    if expected_count is not None and len(raw) != expected_count:
        return f"expected {expected_count} segments, got {len(raw)}"
    prev_end = 0.0
    for triple in raw:
        if not (isinstance(triple, list) and len(triple) == 3):
            return f"bad segment triple {triple!r}"
        start, end, token = triple
        if not (isinstance(start, (int, float)) and isinstance(end, (int, float))):
            return f"non-numeric bounds in {triple!r}"
        if not (0 <= start < end):
            return f"degenerate segment {triple!r}"
        if start < prev_end:
            return f"segment {triple!r} overlaps previous end {prev_end}"
        prev_end = end
        if not isinstance(token, str) or not token:
            return f"empty token in {triple!r}"
    return ""


def _check_expectation(
    expect: dict, response: dict, audio_paths: dict[str, str]
) -> str:
    if bool(response.get("ok")) != bool(expect.get("ok")):
        return f"ok={response.get('ok')} (wanted {expect.get('ok')}); {response}"
    if "id" in expect and response.get("id") != expect["id"]:
        return f"id={response.get('id')!r} (wanted {expect['id']!r})"
    result = response.get("result") or {}
    if expect.get("ready") and not result.get("ready"):
        return "handshake lacks result.ready"
    if expect.get("text_nonempty"):
        text = result.get("text")
        if not isinstance(text, str) or not text.strip():
            return f"text missing or empty: {result!r}"
    if expect.get("audio_exists"):
        audio = result.get("audio")
        if not isinstance(audio, str) or not Path(audio).is_file():
            return f"audio path missing or nonexistent: {audio!r}"
    if expect.get("segments_valid"):
        problem = _segments_valid(result.get("segments"), expect.get("segment_count"))
        if problem:
            return problem
    return ""


def run_vectors(
    command: str,
    work_dir: str | Path,
    timeout_s: float = 30.0,
) -> list[StepResult]:
    """Spawn the worker command and replay every vector step against it."""
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    env = dict(os.environ)
    env["REFINERY_WORK_DIR"] = str(work_dir)
    vectors = load_vectors()
    proc = subprocess.Popen(
        shlex.split(command),
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
        encoding="utf-8",
        env=env,
    )
    results: list[StepResult] = []
    audio_paths: dict[str, str] = {}
    try:
        for i, step in enumerate(vectors["steps"]):
            kind = step["kind"]
            expect = step.get("expect", {})
            try:
                if kind == "handshake":
                    response = json.loads(_read_line(proc, timeout_s))
                else:
                    if kind == "raw":
                        line = step["send"]
                    else:
                        payload = json.loads(json.dumps(step["send"]))
                        for key in ("audio",):
                            value = payload.get(key)
                            if isinstance(value, str) and value.startswith("${AUDIO:"):
                                ref = value[len("${AUDIO:") : -1]
                                payload[key] = audio_paths[ref]
                        line = json.dumps(payload)
                    assert proc.stdin is not None
                    proc.stdin.write(line + "\n")
                    proc.stdin.flush()
                    response = json.loads(_read_line(proc, timeout_s))
                problem = _check_expectation(expect, response, audio_paths)
                if not problem and kind == "request":
                    result = response.get("result") or {}
                    if isinstance(result.get("audio"), str):
                        audio_paths[step["send"]["id"]] = result["audio"]
                results.append(StepResult(i, kind, not problem, problem))
            except Exception as exc:  # noqa: BLE001 - fold into the report
                results.append(StepResult(i, kind, False, str(exc)))
    finally:
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=5)
        except Exception:  # noqa: BLE001
            proc.kill()
    return results
