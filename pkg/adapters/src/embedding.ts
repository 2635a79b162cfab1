// Language-neutral embedding initialization: the element-wise average of
// two language-token embeddings, optionally written back into a checkpoint's
// token slot. Checkpoints here are JSON maps {"embeddings": {token: [...]}}.

import { readFileSync, writeFileSync } from "fs";

export function mixedLanguageEmbedding(vZh: number[], vEn: number[]): number[] {
  if (vZh.length !== vEn.length) {
    throw new Error(`dimension mismatch: ${vZh.length} vs ${vEn.length}`);
  }
  return vZh.map((value, i) => (value + vEn[i]) / 2);
}

export interface Checkpoint {
  embeddings: Record<string, number[]>;
}

export function writeMixedEmbedding(
  checkpointPath: string,
  zhToken: string,
  enToken: string,
  targetToken: string,
): number[] {
  const checkpoint = JSON.parse(readFileSync(checkpointPath, "utf-8")) as Checkpoint;
  if (!checkpoint.embeddings) {
    throw new Error(`checkpoint ${checkpointPath} has no embeddings table`);
  }
  const vZh = checkpoint.embeddings[zhToken];
  const vEn = checkpoint.embeddings[enToken];
  if (!vZh || !vEn) {
    throw new Error(`checkpoint lacks embeddings for ${zhToken} or ${enToken}`);
  }
  const mixed = mixedLanguageEmbedding(vZh, vEn);
  checkpoint.embeddings[targetToken] = mixed;
  writeFileSync(checkpointPath, JSON.stringify(checkpoint, null, 2) + "\n");
  return mixed;
}
