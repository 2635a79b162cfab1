#!/usr/bin/env node
// refinery-embed --checkpoint model.json --zh "<|zh|>" --en "<|en|>" --target "<|mixed|>"
//
// Writes the element-wise average of two language-token embeddings into the
// checkpoint's target token slot and prints the resulting vector length.

import { writeMixedEmbedding } from "./embedding";

function required(value: string | undefined, flag: string): string {
  if (!value) {
    throw new Error(`missing required flag ${flag}`);
  }
  return value;
}

function main(): void {
  const args = new Map<string, string>();
  const argv = process.argv.slice(2);
  for (let i = 0; i < argv.length; i += 2) {
    args.set(argv[i], argv[i + 1] ?? "");
  }
  try {
    const mixed = writeMixedEmbedding(
      required(args.get("--checkpoint"), "--checkpoint"),
      args.get("--zh") ?? "<|zh|>",
      args.get("--en") ?? "<|en|>",
      required(args.get("--target"), "--target"),
    );
    console.log(`wrote ${mixed.length}-dim embedding to ${args.get("--target")}`);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    process.exit(1);
  }
}

main();
