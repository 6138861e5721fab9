/** Client-side audit-path verification (RFC 6962 hashing: leaves are
 * SHA-256(0x00 || data), interior nodes SHA-256(0x01 || left || right)).
 * Recomputed in the browser so inclusion claims do not rest on trusting
 * the API response alone. Uses WebCrypto, hence async throughout. */

import type { AuditPath } from "./api.js";

const subtle: SubtleCrypto = globalThis.crypto.subtle;

export function hexToBytes(hex: string): Uint8Array {
  if (hex.length % 2 !== 0 || /[^0-9a-f]/i.test(hex)) {
    throw new Error(`not a hex string: ${hex}`);
  }
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(2 * i, 2 * i + 2), 16);
  }
  return out;
}

export function bytesToHex(bytes: Uint8Array): string {
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

async function sha256(...parts: Uint8Array[]): Promise<Uint8Array> {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const buf = new Uint8Array(total);
  let off = 0;
  for (const p of parts) {
    buf.set(p, off);
    off += p.length;
  }
  return new Uint8Array(await subtle.digest("SHA-256", buf));
}

async function leafHash(leaf: Uint8Array): Promise<Uint8Array> {
  return sha256(new Uint8Array([0x00]), leaf);
}

async function nodeHash(left: Uint8Array, right: Uint8Array): Promise<Uint8Array> {
  return sha256(new Uint8Array([0x01]), left, right);
}

function equalBytes(a: Uint8Array, b: Uint8Array): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/** True iff recomputing from the raw leaf along the path reproduces the
 * advertised root. Mirrors RFC 6962 §2.1.1 semantics. */
export async function verifyAuditPath(
  rawLeaf: string,
  path: AuditPath,
  rootHex: string,
): Promise<boolean> {
  const { leaf_index: index, tree_size: size } = path;
  if (index < 0 || index >= size) {
    return false;
  }
  let hash = await leafHash(new TextEncoder().encode(rawLeaf));
  let fn = index;
  let sn = size - 1;
  for (const siblingHex of path.sibling_hashes) {
    if (sn === 0) {
      return false;
    }
    const sibling = hexToBytes(siblingHex);
    if (fn % 2 === 1 || fn === sn) {
      hash = await nodeHash(sibling, hash);
      while (fn % 2 === 0 && fn !== 0) {
        fn = Math.floor(fn / 2);
        sn = Math.floor(sn / 2);
      }
    } else {
      hash = await nodeHash(hash, sibling);
    }
    fn = Math.floor(fn / 2);
    sn = Math.floor(sn / 2);
  }
  return sn === 0 && equalBytes(hash, hexToBytes(rootHex));
}
