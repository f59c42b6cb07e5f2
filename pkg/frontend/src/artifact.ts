/**
 * Artifact parsing and validation (format_version 1).
 *
 * The viewer consumes the embedding artifact JSON as-is: every number kept
 * here is the exact double that the producer wrote (JSON round-trips doubles
 * bit-exactly).  Validation failures carry the offending field path so the
 * UI can point at the broken field instead of a generic "bad file".
 */

export const FORMAT_VERSION = 1;

/** Schema violation tagged with the path of the offending field. */
export class ArtifactError extends Error {
  readonly path: string;

  constructor(path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = "ArtifactError";
    this.path = path;
  }
}

export interface StageEntry {
  s: number;
  epochsUsed: number;
  full: boolean;
  /** Projection rows, row-major s x mPrime. */
  p: Float64Array;
  /** Embedding coordinates, row-major n x mPrime. */
  y: Float64Array;
  /** Row norms of p, length s (the spectral response of this stage). */
  response: Float64Array;
}

export interface ExplanationHead {
  k: number;
  /** Leading eigenvector entries, row-major n x k. */
  uHead: Float64Array;
  /** Final-stage response (row norms of the final P). */
  response: Float64Array;
  glyphRefScale: number;
}

/** Per-stage quality scores keyed by subspace size s; null = not computed. */
export interface MetricReport {
  perStage: Map<number, Record<string, number | null>>;
  parameters: Record<string, unknown>;
}

export interface Artifact {
  meta: Record<string, unknown>;
  n: number;
  mPrime: number;
  eigenvalues: Float64Array;
  stages: StageEntry[];
  /** Absent head disables the glyph panel; it is not a load error. */
  head: ExplanationHead | null;
  labels: Int32Array | null;
  metrics: MetricReport | null;
}

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function getObject(v: unknown, path: string): Record<string, unknown> {
  if (!isObject(v)) throw new ArtifactError(path, "expected an object");
  return v;
}

function getInt(v: unknown, path: string): number {
  if (typeof v !== "number" || !Number.isInteger(v)) {
    throw new ArtifactError(path, `expected an integer, got ${JSON.stringify(v)}`);
  }
  return v;
}

function getNumber(v: unknown, path: string): number {
  if (typeof v !== "number") {
    throw new ArtifactError(path, `expected a number, got ${JSON.stringify(v)}`);
  }
  return v;
}

/** Flat numeric list -> Float64Array with an exact length check. */
function getFloats(v: unknown, length: number, path: string): Float64Array {
  if (!Array.isArray(v)) throw new ArtifactError(path, "expected an array");
  if (v.length !== length) {
    throw new ArtifactError(path, `expected ${length} values, got ${v.length}`);
  }
  const out = new Float64Array(length);
  for (let i = 0; i < length; i++) {
    const x = v[i];
    if (typeof x !== "number") {
      throw new ArtifactError(`${path}[${i}]`, "expected a number");
    }
    out[i] = x;
  }
  return out;
}

function parseStage(raw: unknown, i: number, n: number, mPrime: number): StageEntry {
  const path = `stages[${i}]`;
  const obj = getObject(raw, path);
  const s = getInt(obj.s, `${path}.s`);
  if (s < 1) throw new ArtifactError(`${path}.s`, "must be >= 1");
  return {
    s,
    epochsUsed: getInt(obj.epochs_used, `${path}.epochs_used`),
    full: Boolean(obj.full),
    p: getFloats(obj.p, s * mPrime, `${path}.p`),
    y: getFloats(obj.y, n * mPrime, `${path}.y`),
    response: getFloats(obj.response, s, `${path}.response`),
  };
}

function parseHead(raw: unknown, n: number): ExplanationHead | null {
  if (raw === undefined || raw === null) return null;
  const obj = getObject(raw, "explanation_head");
  const k = getInt(obj.k, "explanation_head.k");
  if (k < 1) throw new ArtifactError("explanation_head.k", "must be >= 1");
  const resp = obj.response;
  if (!Array.isArray(resp)) {
    throw new ArtifactError("explanation_head.response", "expected an array");
  }
  return {
    k,
    uHead: getFloats(obj.u_head, n * k, "explanation_head.u_head"),
    response: getFloats(resp, resp.length, "explanation_head.response"),
    glyphRefScale: getNumber(obj.glyph_ref_scale, "explanation_head.glyph_ref_scale"),
  };
}

function parseMetrics(raw: unknown): MetricReport | null {
  if (raw === undefined || raw === null) return null;
  const obj = getObject(raw, "metrics");
  const perRaw = getObject(obj.per_stage ?? {}, "metrics.per_stage");
  const perStage = new Map<number, Record<string, number | null>>();
  for (const [key, entry] of Object.entries(perRaw)) {
    const s = Number(key);
    if (!Number.isInteger(s)) {
      throw new ArtifactError(`metrics.per_stage.${key}`, "key must be a stage size");
    }
    const row = getObject(entry, `metrics.per_stage.${key}`);
    const vals: Record<string, number | null> = {};
    for (const [col, v] of Object.entries(row)) {
      if (v !== null && typeof v !== "number") {
        throw new ArtifactError(`metrics.per_stage.${key}.${col}`, "expected a number or null");
      }
      vals[col] = v;
    }
    perStage.set(s, vals);
  }
  const parameters = isObject(obj.parameters) ? obj.parameters : {};
  return { perStage, parameters };
}

/** Validate a parsed JSON document and repackage it into typed arrays. */
export function parseArtifact(doc: unknown): Artifact {
  const root = getObject(doc, "artifact");
  const meta = getObject(root.meta, "meta");
  const version = meta.format_version;
  if (version !== FORMAT_VERSION) {
    throw new ArtifactError(
      "meta.format_version",
      `unsupported artifact format_version ${JSON.stringify(version)}; ` +
        `this viewer reads version ${FORMAT_VERSION}`,
    );
  }
  const n = getInt(meta.n, "meta.n");
  const mPrime = getInt(meta.m_prime, "meta.m_prime");
  if (n < 1) throw new ArtifactError("meta.n", "must be >= 1");
  if (mPrime < 1) throw new ArtifactError("meta.m_prime", "must be >= 1");

  if (!Array.isArray(root.stages) || root.stages.length === 0) {
    throw new ArtifactError("stages", "expected a non-empty array");
  }
  const stages = root.stages.map((raw, i) => parseStage(raw, i, n, mPrime));
  const progressive = stages.filter((st) => !st.full).map((st) => st.s);
  for (let i = 1; i < progressive.length; i++) {
    if (progressive[i] <= progressive[i - 1]) {
      throw new ArtifactError("stages", "stage sizes must be strictly increasing");
    }
  }

  const eigRaw = root.eigenvalues;
  if (!Array.isArray(eigRaw)) throw new ArtifactError("eigenvalues", "expected an array");
  const eigenvalues = getFloats(eigRaw, eigRaw.length, "eigenvalues");
  const sMax = Math.max(...stages.map((st) => st.s));
  if (eigenvalues.length < sMax) {
    throw new ArtifactError(
      "eigenvalues",
      `holds ${eigenvalues.length} values but the largest stage needs ${sMax}`,
    );
  }

  let labels: Int32Array | null = null;
  if (root.labels !== undefined && root.labels !== null) {
    if (!Array.isArray(root.labels) || root.labels.length !== n) {
      throw new ArtifactError("labels", `expected ${n} integers or null`);
    }
    labels = new Int32Array(n);
    for (let i = 0; i < n; i++) {
      labels[i] = getInt(root.labels[i], `labels[${i}]`);
    }
  }

  return {
    meta,
    n,
    mPrime,
    eigenvalues,
    stages,
    head: parseHead(root.explanation_head, n),
    labels,
    metrics: parseMetrics(root.metrics),
  };
}

/**
 * Parse artifact JSON text.  Strict JSON first; if that fails, retry with
 * bare NaN/Infinity tokens (which Python's json module emits for non-finite
 * metric values) mapped to null.  The token scan only rewrites value
 * positions, so string contents are untouched.
 */
export function parseArtifactText(text: string): Artifact {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    const cleaned = text.replace(
      /(?<=[:,[\s])-?(?:NaN|Infinity)(?=[,\]}\s])/g,
      "null",
    );
    try {
      doc = JSON.parse(cleaned);
    } catch (err) {
      throw new ArtifactError("document", `not valid JSON (${(err as Error).message})`);
    }
  }
  return parseArtifact(doc);
}

/** The deliverable embedding: last progressive stage, else the last stage. */
export function finalStage(artifact: Artifact): StageEntry {
  for (let i = artifact.stages.length - 1; i >= 0; i--) {
    if (!artifact.stages[i].full) return artifact.stages[i];
  }
  return artifact.stages[artifact.stages.length - 1];
}

/**
 * Full-precision number text: String() emits the shortest digits that parse
 * back to the same double, with an explicit sign for negative zero.
 */
export function formatExact(v: number): string {
  return Object.is(v, -0) ? "-0" : String(v);
}
