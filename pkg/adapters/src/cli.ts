#!/usr/bin/env node
// refinery-worker --role asr|tts|aligner|all --model stub|exec:<template>
//
// Speaks the line-delimited JSON protocol on stdin/stdout. The handshake
// reports readiness (or the load failure) once, before any request.

import { mkdirSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { createExecModel } from "./exec";
import { WorkerModel, WorkerRole } from "./protocol";
import { createStubModel } from "./stub";
import { serveWorker } from "./worker";

function parseArgs(argv: string[]): { role: WorkerRole; model: string } {
  let role = "";
  let model = "stub";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--role") {
      role = argv[++i] ?? "";
    } else if (argv[i] === "--model") {
      model = argv[++i] ?? "";
    } else {
      throw new Error(`unknown argument '${argv[i]}'`);
    }
  }
  if (!["asr", "tts", "aligner", "all"].includes(role)) {
    throw new Error("--role must be one of asr, tts, aligner, all");
  }
  return { role: role as WorkerRole, model };
}

function loadModel(model: string, workDir: string): WorkerModel {
  if (model === "stub") {
    return createStubModel(workDir);
  }
  if (model.startsWith("exec:")) {
    return createExecModel(model.slice("exec:".length), workDir);
  }
  throw new Error(`unknown model '${model}'; use 'stub' or 'exec:<command template>'`);
}

async function main(): Promise<void> {
  const workDir = process.env.REFINERY_WORK_DIR ?? join(tmpdir(), "refinery-work");
  try {
    mkdirSync(workDir, { recursive: true });
    const { role, model } = parseArgs(process.argv.slice(2));
    await serveWorker(loadModel(model, workDir), role);
  } catch (error) {
    process.stdout.write(
      JSON.stringify({ id: null, ok: false, error: (error as Error).message }) + "\n",
    );
    process.exit(1);
  }
}

void main();
