/**
 * Label vocabularies and client-side validation, mirroring the annotation
 * service exactly. Every record posted by the UI passes validate() first,
 * so an out-of-enum value can never leave the browser; the server enforces
 * the same rules again on its side.
 */

export const POLARITIES = [-1, 0, 1] as const;
export type Polarity = (typeof POLARITIES)[number];

export const SUBJECTIVITY_VALUES = ["subjective", "objective"] as const;
export type Subjectivity = (typeof SUBJECTIVITY_VALUES)[number];

export const SUBJECTIVITY_RULES = [
  "explicit_criticism",
  "third_person_opinion",
  "implicit_opinion",
] as const;
export type SubjectivityRule = (typeof SUBJECTIVITY_RULES)[number];

export const GESTURES = ["smile", "frown", "head_nod", "head_shake"] as const;
export type Gesture = (typeof GESTURES)[number];

export interface AnnotationRecord {
  utterance_id: string;
  annotator_id: string;
  polarity: Polarity;
  subjectivity: Subjectivity;
  subjectivity_rule: SubjectivityRule | null;
  gestures: Gesture[];
}

export interface AnnotationTask {
  utterance_id: string;
  transcript: string;
  start: number;
  end: number;
  media: { wav: string; mp4: string | null };
  assigned_annotator: string;
  status: "pending" | "done";
}

export class ValidationError extends Error {}

export function validateAnnotation(record: {
  utterance_id: unknown;
  annotator_id: unknown;
  polarity: unknown;
  subjectivity: unknown;
  subjectivity_rule?: unknown;
  gestures?: unknown;
}): AnnotationRecord {
  if (typeof record.utterance_id !== "string" || record.utterance_id === "") {
    throw new ValidationError("utterance_id must be a non-empty string");
  }
  if (typeof record.annotator_id !== "string" || record.annotator_id === "") {
    throw new ValidationError("annotator_id must be a non-empty string");
  }
  if (!POLARITIES.includes(record.polarity as Polarity)) {
    throw new ValidationError(
      `polarity ${String(record.polarity)} not in {-1, 0, +1}`,
    );
  }
  if (!SUBJECTIVITY_VALUES.includes(record.subjectivity as Subjectivity)) {
    throw new ValidationError(
      `subjectivity ${String(record.subjectivity)} not in {subjective, objective}`,
    );
  }
  const rule = record.subjectivity_rule ?? null;
  if (rule !== null && !SUBJECTIVITY_RULES.includes(rule as SubjectivityRule)) {
    throw new ValidationError(`unknown subjectivity rule ${String(rule)}`);
  }
  const gestures = record.gestures ?? [];
  if (!Array.isArray(gestures)) {
    throw new ValidationError("gestures must be an array");
  }
  const unknown = gestures.filter((g) => !GESTURES.includes(g as Gesture));
  if (unknown.length > 0) {
    throw new ValidationError(`unknown gestures: ${unknown.join(", ")}`);
  }
  const unique = [...new Set(gestures as Gesture[])].sort();
  return {
    utterance_id: record.utterance_id,
    annotator_id: record.annotator_id,
    polarity: record.polarity as Polarity,
    subjectivity: record.subjectivity as Subjectivity,
    subjectivity_rule: rule as SubjectivityRule | null,
    gestures: unique,
  };
}
