// Wire protocol types shared by every worker: newline-delimited JSON on
// stdin/stdout, one request in flight per process. Synthesized audio is
// written under the directory named by REFINERY_WORK_DIR and returned by path.

export type AlignedTriple = [number, number, string];

export interface WorkerRequest {
  id: string;
  op: "transcribe" | "synthesize" | "align";
  audio?: string;
  text?: string;
  speaker?: string;
  lang_hint?: string;
}

export type WorkerResult =
  | { text: string }
  | { audio: string }
  | { segments: AlignedTriple[] };

export interface WorkerResponse {
  id: string | null;
  ok: boolean;
  result?: WorkerResult | { ready: true };
  error?: string;
}

// A model backend implements whichever operations its role serves; the
// worker loop reports unimplemented ops as per-request errors.
export interface WorkerModel {
  transcribe?(audioPath: string, langHint?: string): Promise<string>;
  synthesize?(text: string, speaker: string): Promise<string>;
  align?(audioPath: string, text: string): Promise<AlignedTriple[]>;
}

export type WorkerRole = "asr" | "tts" | "aligner" | "all";

export const OPS_BY_ROLE: Record<WorkerRole, ReadonlyArray<WorkerRequest["op"]>> = {
  asr: ["transcribe"],
  tts: ["synthesize"],
  aligner: ["align"],
  all: ["transcribe", "synthesize", "align"],
};
