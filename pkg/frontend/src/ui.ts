// Dashboard for one solver session: payoff table, goal editor, candidate
// view with membership bars, history timeline, report page. All numbers
// shown come verbatim from API payload strings; the only client-side
// arithmetic is display geometry and the advisory weight suggestion.

import {
  ApiRequestError,
  GoalChange,
  GoalView,
  IterationView,
  ReportView,
  SessionApi,
  SessionListItem,
  SessionSummary,
} from "./api.js";

export function suggestedWeight(ideal: string, tolerance: string): string {
  const span = Math.abs(parseFloat(tolerance) - parseFloat(ideal));
  if (!isFinite(span) || span <= 0) {
    return "";
  }
  return fmtShort(1 / span);
}

function fmtShort(v: number): string {
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderSessionList(
  root: HTMLElement,
  items: SessionListItem[],
  onSelect: (id: string) => void,
): void {
  root.textContent = "";
  const box = el("section", { "data-testid": "session-list" });
  box.appendChild(el("h2", {}, "sessions"));
  if (items.length === 0) {
    box.appendChild(
      el("p", { "data-testid": "session-list-empty" }, "no sessions yet; create one with the CLI or POST /sessions"),
    );
  } else {
    const list = el("ul");
    for (const item of items) {
      const li = el("li", { "data-session": item.id });
      const link = el("a", { href: `#/sessions/${item.id}` });
      link.textContent = `${item.name || item.id} (${item.status}, ${item.iterations} iterations)`;
      link.addEventListener("click", (ev) => {
        ev.preventDefault();
        onSelect(item.id);
      });
      li.appendChild(link);
      list.appendChild(li);
    }
    box.appendChild(list);
  }
  root.appendChild(box);
}

export class Dashboard {
  sessionId = "";
  session: SessionSummary | null = null;
  /** resolves when the last user-triggered action has settled */
  pending: Promise<void> = Promise.resolve();

  private readonly summaryBox: HTMLElement;
  private readonly messageBox: HTMLElement;
  private readonly payoffBox: HTMLElement;
  private readonly goalsBox: HTMLElement;
  private readonly candidateBox: HTMLElement;
  private readonly timelineBox: HTMLElement;
  private readonly reportBox: HTMLElement;
  private solveButton: HTMLButtonElement;
  private solveInFlight = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: SessionApi,
  ) {
    root.textContent = "";
    this.summaryBox = el("section", { "data-testid": "summary" });
    this.messageBox = el("p", { "data-testid": "status-message", class: "message" });
    this.payoffBox = el("section", { "data-testid": "payoff" });
    this.goalsBox = el("section", { "data-testid": "goal-editor" });
    this.candidateBox = el("section", { "data-testid": "candidate" });
    this.timelineBox = el("section", { "data-testid": "timeline" });
    this.reportBox = el("section", { "data-testid": "report" });
    this.solveButton = el("button", { "data-testid": "btn-solve" }, "solve candidate");
    this.solveButton.addEventListener("click", () => {
      this.pending = this.handleSolve();
    });
    for (const node of [
      this.summaryBox,
      this.messageBox,
      this.solveButton,
      this.candidateBox,
      this.goalsBox,
      this.payoffBox,
      this.timelineBox,
      this.reportBox,
    ]) {
      root.appendChild(node);
    }
  }

  async load(id: string): Promise<void> {
    this.sessionId = id;
    let session: SessionSummary;
    try {
      session = await this.api.getSession(id);
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 404) {
        this.root.textContent = "";
        this.root.appendChild(
          el("p", { "data-testid": "not-found" }, `session not found: ${id}`),
        );
        return;
      }
      throw err;
    }
    this.session = session;
    const payoff = await this.api.getPayoff(id);
    const iterations = await this.api.getIterations(id);
    this.renderSummary();
    this.renderPayoff(payoff.rows);
    this.renderGoals();
    this.renderTimeline(iterations.iterations);
    const last = iterations.iterations[iterations.iterations.length - 1];
    if (last && session.status !== "AwaitingSolve") {
      this.renderCandidate(last);
    }
    this.updateControls();
    if (session.status === "Accepted") {
      await this.renderReport();
    }
  }

  private setMessage(text: string): void {
    this.messageBox.textContent = text;
  }

  private renderSummary(): void {
    const s = this.session!;
    this.summaryBox.textContent = "";
    this.summaryBox.appendChild(el("h2", {}, s.name || s.id));
    this.summaryBox.appendChild(
      el(
        "p",
        {},
        `status ${s.status}; ${s.iterations} iterations; variables ${s.varNames.join(", ")}`,
      ),
    );
    const badge = el("span", { "data-testid": "session-status", class: "badge" }, s.status);
    this.summaryBox.appendChild(badge);
  }

  private renderPayoff(rows: { label: string; min: string; max: string }[]): void {
    this.payoffBox.textContent = "";
    this.payoffBox.appendChild(el("h3", {}, "payoff table"));
    const table = el("table");
    const head = el("tr");
    for (const h of ["objective", "min", "max"]) {
      head.appendChild(el("th", {}, h));
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = el("tr", { "data-payoff": row.label });
      tr.appendChild(el("td", {}, row.label));
      tr.appendChild(el("td", { class: "min" }, row.min));
      tr.appendChild(el("td", { class: "max" }, row.max));
      table.appendChild(tr);
    }
    this.payoffBox.appendChild(table);
  }

  private renderGoals(): void {
    const s = this.session!;
    this.goalsBox.textContent = "";
    this.goalsBox.appendChild(el("h3", {}, "goals"));
    const table = el("table");
    const head = el("tr");
    for (const h of ["goal", "direction", "ideal", "tolerance", "weight", "suggested weight", ""]) {
      head.appendChild(el("th", {}, h));
    }
    table.appendChild(head);
    for (const goal of s.goals) {
      table.appendChild(this.goalRow(goal));
    }
    this.goalsBox.appendChild(table);
    const revise = el("button", { "data-testid": "btn-revise" }, "submit revision");
    revise.addEventListener("click", () => {
      this.pending = this.handleRevise();
    });
    this.goalsBox.appendChild(revise);
  }

  private goalRow(goal: GoalView): HTMLTableRowElement {
    const tr = el("tr", { "data-goal": `${goal.dm},${goal.index}` });
    tr.appendChild(el("td", { class: "label" }, goal.label));
    tr.appendChild(el("td", {}, goal.direction === "less" ? "at most" : "at least"));
    tr.appendChild(el("td", { class: "ideal" }, goal.ideal));
    const tolCell = el("td");
    const tol = el("input", { class: "tolerance", value: goal.tolerance });
    tolCell.appendChild(tol);
    tr.appendChild(tolCell);
    const weightCell = el("td");
    const weight = el("input", { class: "weight", value: goal.weight });
    weightCell.appendChild(weight);
    tr.appendChild(weightCell);
    const suggested = el("td", { class: "suggested" }, suggestedWeight(goal.ideal, goal.tolerance));
    tr.appendChild(suggested);
    const errCell = el("td");
    errCell.appendChild(el("span", { class: "goal-error", role: "alert" }, ""));
    tr.appendChild(errCell);
    tol.addEventListener("input", () => {
      suggested.textContent = suggestedWeight(goal.ideal, tol.value);
    });
    return tr;
  }

  private renderCandidate(view: IterationView): void {
    this.candidateBox.textContent = "";
    this.candidateBox.appendChild(el("h3", {}, `candidate ${view.index}`));
    if (view.failed) {
      this.candidateBox.appendChild(
        el("p", { "data-testid": "candidate-failed" }, `candidate failed: ${view.error}`),
      );
      return;
    }
    const vars = this.session!.varNames;
    const vecRow = (testid: string, title: string, values: string[]) => {
      const p = el("p", { "data-testid": testid });
      p.appendChild(el("strong", {}, title + " "));
      values.forEach((v, i) => {
        p.appendChild(el("span", { class: "vec", "data-var": vars[i] ?? String(i) }, v));
        p.appendChild(document.createTextNode(" "));
      });
      return p;
    };
    this.candidateBox.appendChild(vecRow("vec-xf", "leader xF:", view.xF!));
    this.candidateBox.appendChild(vecRow("vec-xs", "hierarchy xS:", view.xS!));
    const lam = el("p", { "data-testid": "lambdas" });
    lam.appendChild(el("span", { class: "lambda-upper" }, view.lambdaUpper!));
    lam.appendChild(document.createTextNode(" / "));
    lam.appendChild(el("span", { class: "lambda-full" }, view.lambdaFull!));
    this.candidateBox.appendChild(lam);
    const bars = el("div", { "data-testid": "membership-bars" });
    for (const m of view.memberships!) {
      const row = el("div", { class: "bar-row", "data-goal-label": m.label });
      row.appendChild(el("span", { class: "bar-label" }, m.label));
      const track = el("div", { class: "bar-track" });
      const clamped = Math.min(1, Math.max(0, parseFloat(m.value)));
      const fill = el("div", { class: "bar-fill" });
      fill.style.width = `${(clamped * 100).toFixed(1)}%`;
      track.appendChild(fill);
      row.appendChild(track);
      row.appendChild(el("span", { class: "bar-value" }, m.value));
      bars.appendChild(row);
    }
    this.candidateBox.appendChild(bars);
    const objectives = el("p", { "data-testid": "objective-values" });
    for (const o of view.objectives!) {
      objectives.appendChild(el("span", { class: "obj", "data-obj-label": o.label }, o.value));
      objectives.appendChild(document.createTextNode(" "));
    }
    this.candidateBox.appendChild(objectives);
    if (view.multipleOptima) {
      this.candidateBox.appendChild(
        el("p", { class: "note" }, "an optimal face is not unique; this is the deterministic vertex"),
      );
    }
    const accept = el("button", { "data-testid": "btn-accept" }, "accept");
    accept.addEventListener("click", () => {
      this.pending = this.handleAccept();
    });
    this.candidateBox.appendChild(accept);
  }

  private renderTimeline(iterations: IterationView[]): void {
    this.timelineBox.textContent = "";
    this.timelineBox.appendChild(el("h3", {}, "history"));
    const list = el("ol", { "data-testid": "timeline-list" });
    for (const it of iterations) {
      const text = it.failed
        ? `iteration ${it.index}: failed (${it.error})`
        : `iteration ${it.index}: ${it.verdict}`;
      list.appendChild(el("li", { "data-iteration": it.index }, text));
    }
    this.timelineBox.appendChild(list);
  }

  private async renderReport(): Promise<void> {
    const report: ReportView = await this.api.reportJson(this.sessionId);
    this.reportBox.textContent = "";
    this.reportBox.appendChild(el("h3", {}, "final report"));
    const table = el("table", { "data-testid": "report-table" });
    const head = el("tr");
    for (const h of ["row", ...report.goalLabels]) {
      head.appendChild(el("th", {}, h));
    }
    table.appendChild(head);
    for (const row of report.rows) {
      if (!row.memberships) {
        continue;
      }
      const title =
        row.kind === "candidate" ? `iteration ${row.iteration} (${row.verdict})` : row.label!;
      const tr = el("tr", { "data-report-row": row.kind, "data-report-title": title });
      tr.appendChild(el("td", {}, title));
      for (const m of row.memberships) {
        tr.appendChild(el("td", { class: "report-mu" }, m));
      }
      table.appendChild(tr);
    }
    this.reportBox.appendChild(table);
  }

  private updateControls(): void {
    const status = this.session?.status;
    this.solveButton.disabled = this.solveInFlight || status !== "AwaitingSolve";
  }

  private async handleSolve(): Promise<void> {
    if (this.solveInFlight) {
      return; // double-click guard; one request per candidate
    }
    this.solveInFlight = true;
    this.solveButton.disabled = true;
    this.setMessage("solving...");
    try {
      const view = await this.api.solve(this.sessionId);
      this.session = await this.api.getSession(this.sessionId);
      if (view.failed) {
        this.setMessage(`candidate failed: ${view.error}; revise and try again`);
      } else {
        this.setMessage("");
      }
      this.renderCandidate(view);
      const iterations = await this.api.getIterations(this.sessionId);
      this.renderTimeline(iterations.iterations);
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 409) {
        this.setMessage("already awaiting your verdict");
      } else {
        this.setMessage(err instanceof Error ? err.message : String(err));
      }
    } finally {
      this.solveInFlight = false;
      this.updateControls();
    }
  }

  private async handleAccept(): Promise<void> {
    try {
      this.session = await this.api.accept(this.sessionId);
      this.renderSummary();
      this.updateControls();
      const iterations = await this.api.getIterations(this.sessionId);
      this.renderTimeline(iterations.iterations);
      this.setMessage("accepted");
      await this.renderReport();
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 409) {
        this.setMessage("nothing to accept right now");
      } else {
        this.setMessage(err instanceof Error ? err.message : String(err));
      }
    }
  }

  /** collect edited rows; invalid edits are blocked before any request */
  private async handleRevise(): Promise<void> {
    const s = this.session!;
    const changes: GoalChange[] = [];
    let blocked = false;
    for (const goal of s.goals) {
      const tr = this.goalsBox.querySelector<HTMLTableRowElement>(
        `tr[data-goal="${goal.dm},${goal.index}"]`,
      )!;
      const tolInput = tr.querySelector<HTMLInputElement>("input.tolerance")!;
      const weightInput = tr.querySelector<HTMLInputElement>("input.weight")!;
      const errBox = tr.querySelector<HTMLElement>("span.goal-error")!;
      errBox.textContent = "";
      const tolChanged = tolInput.value !== goal.tolerance;
      const weightChanged = weightInput.value !== goal.weight;
      if (!tolChanged && !weightChanged) {
        continue;
      }
      const tol = parseFloat(tolInput.value);
      const weight = parseFloat(weightInput.value);
      if (tolChanged && (!isFinite(tol) || Math.abs(tol - parseFloat(goal.ideal)) <= 0)) {
        errBox.textContent = "tolerance must differ from the ideal";
        blocked = true;
        continue;
      }
      if (weightChanged && (!isFinite(weight) || weight <= 0)) {
        errBox.textContent = "weight must be positive";
        blocked = true;
        continue;
      }
      const change: GoalChange = { dm: goal.dm, index: goal.index };
      if (tolChanged) {
        change.tolerance = tolInput.value;
      }
      if (weightChanged) {
        change.weight = weightInput.value;
      }
      changes.push(change);
    }
    if (blocked) {
      this.setMessage("fix the highlighted goals first");
      return;
    }
    if (changes.length === 0) {
      this.setMessage("no goal edits to submit");
      return;
    }
    try {
      this.session = await this.api.revise(this.sessionId, changes);
      this.renderSummary();
      this.renderGoals();
      this.candidateBox.textContent = "";
      this.updateControls();
      const iterations = await this.api.getIterations(this.sessionId);
      this.renderTimeline(iterations.iterations);
      this.setMessage("goals updated; solve for a new candidate");
    } catch (err) {
      if (err instanceof ApiRequestError && (err.status === 422 || err.status === 409)) {
        this.placeInlineError(err.message);
        this.setMessage(err.status === 409 ? "no candidate awaiting a verdict" : "revision rejected");
      } else {
        this.setMessage(err instanceof Error ? err.message : String(err));
      }
    }
  }

  /** route a server-side rejection onto the row it names, if any */
  private placeInlineError(message: string): void {
    const s = this.session!;
    for (const goal of s.goals) {
      if (message.includes(goal.label)) {
        const tr = this.goalsBox.querySelector<HTMLTableRowElement>(
          `tr[data-goal="${goal.dm},${goal.index}"]`,
        );
        const errBox = tr?.querySelector<HTMLElement>("span.goal-error");
        if (errBox) {
          errBox.textContent = message;
          return;
        }
      }
    }
    this.setMessage(message);
  }
}
