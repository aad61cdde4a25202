import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationTask } from "../src/schema.js";
import { TaskSession } from "../src/state.js";

const task: AnnotationTask = {
  utterance_id: "utt0007",
  transcript: "فیلم خیلی خوب بود",
  start: 7,
  end: 8,
  media: { wav: "/api/media/utt0007.wav", mp4: null },
  assigned_annotator: "a1",
  status: "pending",
};

describe("task session draft", () => {
  let session: TaskSession;

  beforeEach(() => {
    session = new TaskSession("a1");
    session.loadTask(task);
  });

  it("disables submit until a polarity is chosen", () => {
    expect(session.submitEnabled).toBe(false);
    session.setPolarity(1);
    expect(session.submitEnabled).toBe(true);
  });

  it("objective drafts submit without polarity and disable polarity input", () => {
    session.setSubjectivity("objective");
    expect(session.polarityEnabled).toBe(false);
    expect(session.submitEnabled).toBe(true);
    session.setPolarity(-1); // ignored while objective
    expect(session.draft.polarity).toBeNull();
    const record = session.toRecord();
    expect(record.subjectivity).toBe("objective");
    expect(record.subjectivity_rule).toBeNull();
  });

  it("switching to objective clears a chosen polarity", () => {
    session.setPolarity(1);
    session.setSubjectivity("objective");
    expect(session.draft.polarity).toBeNull();
    session.setSubjectivity("subjective", "implicit_opinion");
    expect(session.submitEnabled).toBe(false); // polarity must be re-chosen
  });

  it("gesture multi-select posts exactly the toggled set", () => {
    session.setPolarity(1);
    session.toggleGesture("smile");
    session.toggleGesture("head_nod");
    session.toggleGesture("frown");
    session.toggleGesture("frown"); // toggled back off
    const record = session.toRecord();
    expect(record.gestures).toEqual(["head_nod", "smile"]);
  });

  it("loading the next task drops the draft", () => {
    session.setPolarity(-1);
    session.toggleGesture("frown");
    session.loadTask({ ...task, utterance_id: "utt0008" });
    expect(session.draft.polarity).toBeNull();
    expect(session.draft.gestures.size).toBe(0);
    expect(session.submitEnabled).toBe(false);
  });

  it("no task means no submission", () => {
    session.loadTask(null);
    expect(session.submitEnabled).toBe(false);
    expect(() => session.toRecord()).toThrow();
  });

  it("records carry the session annotator and task utterance", () => {
    session.setPolarity(-1);
    const record = session.toRecord();
    expect(record.annotator_id).toBe("a1");
    expect(record.utterance_id).toBe("utt0007");
    expect(record.polarity).toBe(-1);
  });
});
