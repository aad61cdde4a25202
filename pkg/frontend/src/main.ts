/**
 * Annotation screen wiring. Renders the clip player, right-to-left
 * transcript, polarity buttons (keyboard: 1 / 2 / 3 for -1 / 0 / +1),
 * subjectivity toggle with the three rationale rules, gesture checkboxes,
 * and the progress panel fed by /api/agreement.
 */

import { AgreementSnapshot, ApiClient, ApiError } from "./api.js";
import { formatAgreement, formatProgress } from "./format.js";
import { GESTURES, Polarity, SUBJECTIVITY_RULES, SubjectivityRule } from "./schema.js";
import { TaskSession } from "./state.js";

const POLARITY_KEYS: Record<string, Polarity> = { "1": -1, "2": 0, "3": 1 };
const POLARITY_LABELS: [Polarity, string][] = [
  [-1, "negative (-1)"],
  [0, "neutral (0)"],
  [1, "positive (+1)"],
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

export class AnnotationApp {
  private session: TaskSession;
  private root: HTMLElement;

  constructor(
    private api: ApiClient,
    annotator: string,
    root: HTMLElement,
  ) {
    this.session = new TaskSession(annotator);
    this.root = root;
  }

  async start(): Promise<void> {
    document.addEventListener("keydown", (event) => this.onKey(event));
    await this.advance();
    await this.refreshProgress();
  }

  private async advance(): Promise<void> {
    this.session.loadTask(await this.api.nextTask(this.session.annotator));
    this.renderTask();
  }

  private onKey(event: KeyboardEvent): void {
    const polarity = POLARITY_KEYS[event.key];
    if (polarity !== undefined && this.session.polarityEnabled) {
      this.session.setPolarity(polarity);
      this.renderTask();
    } else if (event.key === "Enter" && this.session.submitEnabled) {
      void this.submit();
    }
  }

  private async submit(): Promise<void> {
    try {
      await this.api.submit(this.session.toRecord());
    } catch (error) {
      this.flash(error instanceof ApiError ? error.message : String(error));
      return;
    }
    await this.advance();
    await this.refreshProgress();
  }

  private flash(message: string): void {
    const banner = this.root.querySelector("#flash");
    if (banner) {
      banner.textContent = message;
    }
  }

  private renderTask(): void {
    const pane = this.root.querySelector("#task")!;
    pane.replaceChildren();
    const task = this.session.task;
    if (task === null) {
      pane.append(el("p", {}, "All utterances are annotated. Thank you."));
      return;
    }

    pane.append(el("h2", {}, `Utterance ${task.utterance_id}`));
    const audio = el("audio", { controls: "", src: task.media.wav });
    pane.append(audio);
    if (task.media.mp4) {
      const video = el("video", {
        controls: "",
        width: "360",
        src: `${task.media.mp4}#t=${task.start},${task.end}`,
      });
      pane.append(video);
    }
    // Persian transcripts render right-to-left
    pane.append(el("p", { dir: "rtl", lang: "fa", class: "transcript" }, task.transcript));

    const polarityRow = el("div", { class: "row", id: "polarity" });
    for (const [value, label] of POLARITY_LABELS) {
      const button = el("button", {}, label);
      button.disabled = !this.session.polarityEnabled;
      if (this.session.draft.polarity === value) {
        button.classList.add("selected");
      }
      button.onclick = () => {
        this.session.setPolarity(value);
        this.renderTask();
      };
      polarityRow.append(button);
    }
    pane.append(polarityRow);

    const subjRow = el("div", { class: "row" });
    for (const value of ["subjective", "objective"] as const) {
      const button = el("button", {}, value);
      if (this.session.draft.subjectivity === value) {
        button.classList.add("selected");
      }
      button.onclick = () => {
        this.session.setSubjectivity(value, this.session.draft.subjectivity_rule);
        this.renderTask();
      };
      subjRow.append(button);
    }
    pane.append(subjRow);

    if (this.session.draft.subjectivity === "subjective") {
      const ruleRow = el("div", { class: "row" });
      ruleRow.append(el("span", {}, "why subjective: "));
      for (const rule of SUBJECTIVITY_RULES) {
        const button = el("button", {}, rule.replaceAll("_", " "));
        if (this.session.draft.subjectivity_rule === rule) {
          button.classList.add("selected");
        }
        button.onclick = () => {
          this.session.setSubjectivity("subjective", rule as SubjectivityRule);
          this.renderTask();
        };
        ruleRow.append(button);
      }
      pane.append(ruleRow);
    }

    const gestureRow = el("div", { class: "row" });
    for (const gesture of GESTURES) {
      const label = el("label", {}, ` ${gesture.replaceAll("_", " ")}`);
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = this.session.draft.gestures.has(gesture);
      box.onchange = () => this.session.toggleGesture(gesture);
      label.prepend(box);
      gestureRow.append(label);
    }
    pane.append(gestureRow);

    const submit = el("button", { id: "submit" }, "submit and next");
    submit.disabled = !this.session.submitEnabled;
    submit.onclick = () => void this.submit();
    pane.append(submit, el("p", { id: "flash" }));
  }

  private async refreshProgress(): Promise<void> {
    const pane = this.root.querySelector("#progress")!;
    let snapshot: AgreementSnapshot;
    try {
      snapshot = await this.api.agreement();
    } catch {
      return;
    }
    pane.replaceChildren(el("h2", {}, "Progress"));
    for (const [annotator, p] of Object.entries(snapshot.progress)) {
      pane.append(el("p", {}, `${annotator}: ${formatProgress(p.done, p.total)}`));
    }
    pane.append(
      el("p", {}, `polarity agreement: ${formatAgreement(snapshot.polarity)}`),
      el("p", {}, `subjectivity agreement: ${formatAgreement(snapshot.subjectivity)}`),
      el("p", {}, `gesture agreement: ${formatAgreement(snapshot.gestures)}`),
    );
  }
}

export function boot(): void {
  const annotator =
    new URLSearchParams(window.location.search).get("annotator") ??
    window.prompt("annotator id?") ??
    "a1";
  const app = new AnnotationApp(new ApiClient(""), annotator, document.body);
  void app.start();
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  boot();
}
