// Wrap an external model command (whisper.cpp-style CLI, an aligner script,
// a synthesis binary) as a worker model. The command template is expanded
// per request:
//   {audio}  input WAV path          (transcribe, align)
//   {text}   input text, shell-safe  (synthesize, align)
//   {out}    output WAV path the command must create (synthesize)
//
// transcribe: the command's stdout is the transcript.
// synthesize: the command writes {out}; the path is returned.
// align:      the command's stdout is JSON [[start, end, token], ...].

import { execFile } from "child_process";
import { randomBytes } from "crypto";
import { join } from "path";
import { promisify } from "util";

import { AlignedTriple, WorkerModel } from "./protocol";

const run = promisify(execFile);

function expand(template: string, substitutions: Record<string, string>): string[] {
  return template
    .split(/\s+/)
    .filter((piece) => piece.length > 0)
    .map((piece) =>
      piece.replace(/\{(audio|text|out)\}/g, (_, key: string) => substitutions[key] ?? ""),
    );
}

export function createExecModel(template: string, workDir: string): WorkerModel {
  if (!template.trim()) {
    throw new Error("exec model needs a non-empty command template");
  }
  const [command, ...fixed] = expand(template, {});

  async function invoke(substitutions: Record<string, string>): Promise<string> {
    const argv = expand(template, substitutions);
    const { stdout } = await run(argv[0], argv.slice(1), { maxBuffer: 16 * 1024 * 1024 });
    return stdout;
  }

  void command;
  void fixed;

  return {
    async transcribe(audioPath: string): Promise<string> {
      const stdout = await invoke({ audio: audioPath });
      const text = stdout.trim();
      if (!text) {
        throw new Error("model command produced an empty transcript");
      }
      return text;
    },

    async synthesize(text: string, _speaker: string): Promise<string> {
      if (!text.trim()) {
        throw new Error("cannot synthesize empty text");
      }
      const out = join(workDir, `exec-${randomBytes(8).toString("hex")}.wav`);
      await invoke({ text, out });
      return out;
    },

    async align(audioPath: string, text: string): Promise<AlignedTriple[]> {
      const stdout = await invoke({ audio: audioPath, text });
      const parsed = JSON.parse(stdout);
      if (!Array.isArray(parsed)) {
        throw new Error("aligner command must print a JSON array of [start, end, token]");
      }
      return parsed as AlignedTriple[];
    },
  };
}
