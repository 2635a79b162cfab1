// Deterministic stand-in models so the worker can be exercised without any
// real ASR/TTS/aligner installed. Outputs are pure functions of the inputs.

import { createHash } from "crypto";
import { join } from "path";

import { RawAudio, readWav, writeWav } from "./wav";
import { AlignedTriple, WorkerModel } from "./protocol";

const SAMPLE_RATE = 16000;
const SECONDS_PER_TOKEN = 0.5;

const STUB_VOCABULARY = [
  "alpha", "bravo", "carrier", "delta", "echo", "fable", "granite", "harbor",
  "indigo", "jasper", "karma", "lumen", "meadow", "nectar", "onyx", "prairie",
];

function digest(material: Buffer | string): Buffer {
  return createHash("sha256").update(material).digest();
}

function tokenFrequency(token: string, speaker: string): number {
  const value = digest(`${token}${speaker}`).readUInt16BE(0);
  return 300 + (value % 48) * 50; // 300..2650 Hz, under Nyquist at 16 kHz
}

export function createStubModel(workDir: string): WorkerModel {
  return {
    async transcribe(audioPath: string): Promise<string> {
      const audio = readWav(audioPath);
      const duration = audio.samples.length / audio.sampleRate;
      const wordCount = Math.max(1, Math.round(duration / SECONDS_PER_TOKEN));
      // derive a stable fingerprint from the waveform so equal audio always
      // transcribes identically
      const quantized = Buffer.alloc(Math.min(audio.samples.length, 4096) * 2);
      for (let i = 0; i < quantized.length / 2; i++) {
        quantized.writeInt16LE(Math.round(audio.samples[i] * 32767), 2 * i);
      }
      const fingerprint = digest(quantized);
      const words: string[] = [];
      for (let i = 0; i < wordCount; i++) {
        words.push(STUB_VOCABULARY[fingerprint[i % fingerprint.length] % STUB_VOCABULARY.length]);
      }
      return words.join(" ");
    },

    async synthesize(text: string, speaker: string): Promise<string> {
      const tokens = text.trim().split(/\s+/).filter((t) => t.length > 0);
      if (tokens.length === 0) {
        throw new Error("cannot synthesize empty text");
      }
      const perToken = Math.round(SECONDS_PER_TOKEN * SAMPLE_RATE);
      const samples = new Float64Array(tokens.length * perToken);
      tokens.forEach((token, index) => {
        const freq = tokenFrequency(token, speaker);
        for (let k = 0; k < perToken; k++) {
          samples[index * perToken + k] = 0.4 * Math.sin((2 * Math.PI * freq * k) / SAMPLE_RATE);
        }
      });
      const audio: RawAudio = { samples, sampleRate: SAMPLE_RATE };
      const name = `stub-${digest(`${text}${speaker}`).toString("hex").slice(0, 16)}.wav`;
      const path = join(workDir, name);
      writeWav(audio, path);
      return path;
    },

    async align(audioPath: string, text: string): Promise<AlignedTriple[]> {
      const tokens = text.trim().split(/\s+/).filter((t) => t.length > 0);
      if (tokens.length === 0) {
        throw new Error("cannot align empty text");
      }
      const audio = readWav(audioPath);
      const duration = audio.samples.length / audio.sampleRate;
      const segments: AlignedTriple[] = [];
      for (let i = 0; i < tokens.length; i++) {
        const start = Math.round((i * duration * 1000) / tokens.length) / 1000;
        const end = Math.round(((i + 1) * duration * 1000) / tokens.length) / 1000;
        if (end <= start) {
          throw new Error(`audio of ${duration.toFixed(3)} s too short for ${tokens.length} tokens`);
        }
        segments.push([start, end, tokens[i]]);
      }
      return segments;
    },
  };
}
