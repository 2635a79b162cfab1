// The worker loop: handshake once, then answer requests line by line.
// A malformed request line fails that line only; the loop keeps serving.

import { createInterface } from "readline";
import { Writable } from "stream";

import {
  OPS_BY_ROLE,
  WorkerModel,
  WorkerRequest,
  WorkerResponse,
  WorkerRole,
} from "./protocol";

function send(output: Writable, response: WorkerResponse): void {
  output.write(JSON.stringify(response) + "\n");
}

async function dispatch(
  model: WorkerModel,
  role: WorkerRole,
  request: WorkerRequest,
): Promise<WorkerResponse> {
  const { id, op } = request;
  if (!id || typeof id !== "string") {
    return { id: null, ok: false, error: "request carries no id" };
  }
  if (!OPS_BY_ROLE[role].includes(op)) {
    return { id, ok: false, error: `role '${role}' cannot serve op '${op}'` };
  }
  try {
    if (op === "transcribe") {
      if (!model.transcribe) throw new Error("model does not transcribe");
      if (!request.audio) throw new Error("transcribe needs an audio path");
      const text = await model.transcribe(request.audio, request.lang_hint);
      return { id, ok: true, result: { text } };
    }
    if (op === "synthesize") {
      if (!model.synthesize) throw new Error("model does not synthesize");
      const audio = await model.synthesize(request.text ?? "", request.speaker ?? "");
      return { id, ok: true, result: { audio } };
    }
    if (op === "align") {
      if (!model.align) throw new Error("model does not align");
      if (!request.audio) throw new Error("align needs an audio path");
      const segments = await model.align(request.audio, request.text ?? "");
      return { id, ok: true, result: { segments } };
    }
    return { id, ok: false, error: `unknown op '${op as string}'` };
  } catch (error) {
    return { id, ok: false, error: (error as Error).message };
  }
}

export async function serveWorker(
  model: WorkerModel,
  role: WorkerRole,
  input: NodeJS.ReadableStream = process.stdin,
  output: Writable = process.stdout,
): Promise<void> {
  send(output, { id: null, ok: true, result: { ready: true } });
  const lines = createInterface({ input, crlfDelay: Infinity });
  for await (const line of lines) {
    if (!line.trim()) {
      continue;
    }
    let request: WorkerRequest;
    try {
      request = JSON.parse(line);
    } catch {
      send(output, { id: null, ok: false, error: "malformed request line" });
      continue;
    }
    // strictly one request in flight: await before reading the next line
    send(output, await dispatch(model, role, request));
  }
}
