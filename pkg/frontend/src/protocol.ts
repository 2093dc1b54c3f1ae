/**
 * Wire protocol: envelope types and canonical JSON encoding.
 *
 * Outbound envelopes must be byte-identical to the backend encoder
 * (sorted keys, compact separators, ASCII escapes, Python float repr),
 * so a console session and a headless scripted session produce the
 * same bytes for the same event timeline. test/fixtures pins this.
 */

export type Json =
  | null
  | boolean
  | number
  | string
  | Json[]
  | { [key: string]: Json };

export interface EnvelopeObj {
  topic: string;
  sender: string;
  seq: number;
  stamp: number;
  kind: string;
  payload: { [key: string]: Json };
}

/** Keys whose numeric values are floats on the wire: integral values
 *  keep a trailing ".0" exactly like the backend's repr(). */
const FLOAT_KEYS = new Set(["stamp", "dx", "dy", "dyaw"]);

const SHORT_ESCAPES: { [code: number]: string } = {
  0x22: '\\"',
  0x5c: "\\\\",
  0x08: "\\b",
  0x09: "\\t",
  0x0a: "\\n",
  0x0c: "\\f",
  0x0d: "\\r",
};

function encodeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i++) {
    const c = s.charCodeAt(i);
    const short = SHORT_ESCAPES[c];
    if (short !== undefined) {
      out += short;
    } else if (c < 0x20 || c > 0x7e) {
      out += "\\u" + c.toString(16).padStart(4, "0");
    } else {
      out += s[i];
    }
  }
  return out + '"';
}

function encodeNumber(v: number, key?: string): string {
  if (!Number.isFinite(v)) {
    throw new Error(`non-finite number for key ${key}`);
  }
  if (Object.is(v, -0)) {
    v = 0;
  }
  if (Number.isInteger(v)) {
    const plain = String(v);
    return key !== undefined && FLOAT_KEYS.has(key) ? plain + ".0" : plain;
  }
  return String(v);
}

/** Canonical JSON text of a value; `key` is the owning object key, used
 *  to decide integer-vs-float formatting for integral numbers. */
export function canonicalJson(value: Json, key?: string): string {
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return encodeNumber(value, key);
  if (typeof value === "string") return encodeString(value);
  if (Array.isArray(value)) {
    return "[" + value.map((v) => canonicalJson(v, key)).join(",") + "]";
  }
  const keys = Object.keys(value).sort();
  return (
    "{" +
    keys.map((k) => encodeString(k) + ":" + canonicalJson(value[k], k)).join(",") +
    "}"
  );
}

export function encodeEnvelope(env: EnvelopeObj): string {
  return canonicalJson(env as unknown as Json);
}

/** Quantize a joystick offset so both sides print identical decimals. */
export function quantizeOffset(v: number): number {
  const q = Math.round(v * 1000) / 1000;
  return Object.is(q, -0) ? 0 : q;
}
