// Minimal 16-bit PCM WAV reader/writer; mono preferred, stereo downmixed.

import { readFileSync, writeFileSync } from "fs";

export interface RawAudio {
  samples: Float64Array;
  sampleRate: number;
}

export function readWav(path: string): RawAudio {
  const data = readFileSync(path);
  if (data.length < 44 || data.toString("ascii", 0, 4) !== "RIFF" || data.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`not a RIFF/WAVE file: ${path}`);
  }
  let offset = 12;
  let sampleRate = 0;
  let channels = 0;
  let bitsPerSample = 0;
  let dataStart = -1;
  let dataLength = 0;
  while (offset + 8 <= data.length) {
    const chunkId = data.toString("ascii", offset, offset + 4);
    const chunkSize = data.readUInt32LE(offset + 4);
    if (chunkId === "fmt ") {
      const format = data.readUInt16LE(offset + 8);
      if (format !== 1) {
        throw new Error(`unsupported WAV format code ${format}; need integer PCM`);
      }
      channels = data.readUInt16LE(offset + 10);
      sampleRate = data.readUInt32LE(offset + 12);
      bitsPerSample = data.readUInt16LE(offset + 22);
    } else if (chunkId === "data") {
      dataStart = offset + 8;
      dataLength = chunkSize;
    }
    offset += 8 + chunkSize + (chunkSize % 2);
  }
  if (dataStart < 0 || sampleRate === 0) {
    throw new Error(`missing fmt/data chunk in ${path}`);
  }
  if (bitsPerSample !== 16) {
    throw new Error(`unsupported bit depth ${bitsPerSample} in ${path}; need 16-bit PCM`);
  }
  if (channels !== 1 && channels !== 2) {
    throw new Error(`unsupported channel count ${channels} in ${path}`);
  }
  const frameCount = Math.floor(dataLength / (2 * channels));
  if (frameCount === 0) {
    throw new Error(`zero-length audio: ${path}`);
  }
  const samples = new Float64Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    if (channels === 1) {
      samples[i] = data.readInt16LE(dataStart + 2 * i) / 32768;
    } else {
      const left = data.readInt16LE(dataStart + 4 * i);
      const right = data.readInt16LE(dataStart + 4 * i + 2);
      samples[i] = (left + right) / 2 / 32768;
    }
  }
  return { samples, sampleRate };
}

export function writeWav(audio: RawAudio, path: string): void {
  const { samples, sampleRate } = audio;
  if (samples.length === 0) {
    throw new Error("refusing to write an empty buffer");
  }
  const dataLength = samples.length * 2;
  const buffer = Buffer.alloc(44 + dataLength);
  buffer.write("RIFF", 0, "ascii");
  buffer.writeUInt32LE(36 + dataLength, 4);
  buffer.write("WAVE", 8, "ascii");
  buffer.write("fmt ", 12, "ascii");
  buffer.writeUInt32LE(16, 16);
  buffer.writeUInt16LE(1, 20); // integer PCM
  buffer.writeUInt16LE(1, 22); // mono
  buffer.writeUInt32LE(sampleRate, 24);
  buffer.writeUInt32LE(sampleRate * 2, 28);
  buffer.writeUInt16LE(2, 32);
  buffer.writeUInt16LE(16, 34);
  buffer.write("data", 36, "ascii");
  buffer.writeUInt32LE(dataLength, 40);
  for (let i = 0; i < samples.length; i++) {
    const clipped = Math.max(-1, Math.min(1, samples[i]));
    const value = Math.max(-32768, Math.min(32767, Math.round(clipped * 32768)));
    buffer.writeInt16LE(value, 44 + 2 * i);
  }
  writeFileSync(path, buffer);
}
