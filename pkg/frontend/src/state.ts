/**
 * Task-screen state: the current task plus an unsubmitted draft.
 *
 * Invariants the screen relies on:
 *  - submit stays disabled until a polarity is chosen, unless the draft is
 *    marked objective (objective utterances carry no polarity);
 *  - marking objective clears and disables the polarity choice;
 *  - the draft lives only in memory: a reload loses the draft and nothing
 *    else, because every other state lives on the server.
 */

import {
  AnnotationRecord,
  AnnotationTask,
  Gesture,
  Polarity,
  Subjectivity,
  SubjectivityRule,
} from "./schema.js";

export interface Draft {
  polarity: Polarity | null;
  subjectivity: Subjectivity;
  subjectivity_rule: SubjectivityRule | null;
  gestures: Set<Gesture>;
}

export function emptyDraft(): Draft {
  return {
    polarity: null,
    subjectivity: "subjective",
    subjectivity_rule: null,
    gestures: new Set(),
  };
}

export class TaskSession {
  task: AnnotationTask | null = null;
  draft: Draft = emptyDraft();

  constructor(public annotator: string) {}

  loadTask(task: AnnotationTask | null): void {
    this.task = task;
    this.draft = emptyDraft();
  }

  setPolarity(polarity: Polarity): void {
    if (this.draft.subjectivity === "objective") {
      return; // polarity input is disabled for objective drafts
    }
    this.draft.polarity = polarity;
  }

  setSubjectivity(value: Subjectivity, rule: SubjectivityRule | null = null): void {
    this.draft.subjectivity = value;
    if (value === "objective") {
      this.draft.polarity = null;
      this.draft.subjectivity_rule = null;
    } else {
      this.draft.subjectivity_rule = rule;
    }
  }

  toggleGesture(gesture: Gesture): void {
    if (this.draft.gestures.has(gesture)) {
      this.draft.gestures.delete(gesture);
    } else {
      this.draft.gestures.add(gesture);
    }
  }

  get polarityEnabled(): boolean {
    return this.draft.subjectivity === "subjective";
  }

  get submitEnabled(): boolean {
    if (this.task === null) {
      return false;
    }
    return this.draft.subjectivity === "objective" || this.draft.polarity !== null;
  }

  toRecord(): AnnotationRecord {
    if (this.task === null || !this.submitEnabled) {
      throw new Error("no submittable draft");
    }
    return {
      utterance_id: this.task.utterance_id,
      annotator_id: this.annotator,
      // objective utterances post the neutral polarity; the resolver
      // ignores polarity on objective judgments
      polarity: this.draft.polarity ?? 0,
      subjectivity: this.draft.subjectivity,
      subjectivity_rule: this.draft.subjectivity_rule,
      gestures: [...this.draft.gestures].sort(),
    };
  }
}
