// Client for the solver's session API. Every numeric field arrives as a
// decimal string and is passed through untouched; parsing happens only for
// display geometry (bar widths), never before showing a value.

export interface GoalView {
  dm: string;
  index: string;
  label: string;
  objectiveLabel: string;
  direction: string;
  ideal: string;
  tolerance: string;
  weight: string;
}

export interface SessionSummary {
  id: string;
  status: string;
  iterations: string;
  name: string;
  varNames: string[];
  goals: GoalView[];
}

export interface SessionListItem {
  id: string;
  status: string;
  iterations: string;
  name: string;
}

export interface PayoffRowView {
  label: string;
  dm: string;
  index: string;
  sense: string;
  min: string;
  max: string;
  argmin: string[];
  argmax: string[];
}

export interface LabelledValue {
  label: string;
  value: string;
}

export interface IterationView {
  index: string;
  failed: boolean;
  error?: string;
  verdict?: string;
  xF?: string[];
  xS?: string[];
  lambdaUpper?: string;
  lambdaFull?: string;
  memberships?: LabelledValue[];
  objectives?: LabelledValue[];
  multipleOptima?: boolean;
}

export interface ReportRow {
  kind: string;
  iteration?: number;
  label?: string;
  verdict?: string;
  error?: string;
  x?: string[];
  memberships?: string[];
  objectives?: string[];
  lambdaUpper?: string;
  lambdaFull?: string;
  upperMembershipSum?: string;
}

export interface ReportView {
  name: string;
  status: string;
  varNames: string[];
  goalLabels: string[];
  rows: ReportRow[];
}

export interface GoalChange {
  dm: string;
  index: string;
  tolerance?: string;
  weight?: string;
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** the full surface the console is allowed to touch */
export interface SessionApi {
  listSessions(): Promise<{ sessions: SessionListItem[] }>;
  getSession(id: string): Promise<SessionSummary>;
  getPayoff(id: string): Promise<{ rows: PayoffRowView[] }>;
  getIterations(id: string): Promise<{ iterations: IterationView[] }>;
  solve(id: string): Promise<IterationView>;
  accept(id: string): Promise<SessionSummary>;
  revise(id: string, changes: GoalChange[]): Promise<SessionSummary>;
  reportJson(id: string): Promise<ReportView>;
}

export class ConsoleApi implements SessionApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const code = typeof body.code === "string" ? body.code : "error";
      const message =
        typeof body.message === "string" ? body.message : `request failed (${response.status})`;
      throw new ApiRequestError(response.status, code, message);
    }
    return body as T;
  }

  listSessions(): Promise<{ sessions: SessionListItem[] }> {
    return this.request("/sessions");
  }

  getSession(id: string): Promise<SessionSummary> {
    return this.request(`/sessions/${id}`);
  }

  getPayoff(id: string): Promise<{ rows: PayoffRowView[] }> {
    return this.request(`/sessions/${id}/payoff`);
  }

  getIterations(id: string): Promise<{ iterations: IterationView[] }> {
    return this.request(`/sessions/${id}/iterations`);
  }

  solve(id: string): Promise<IterationView> {
    return this.request(`/sessions/${id}/solve`, { method: "POST" });
  }

  accept(id: string): Promise<SessionSummary> {
    return this.request(`/sessions/${id}/verdict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ action: "accept" }),
    });
  }

  revise(id: string, changes: GoalChange[]): Promise<SessionSummary> {
    return this.request(`/sessions/${id}/verdict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ action: "revise", changes }),
    });
  }

  reportJson(id: string): Promise<ReportView> {
    return this.request(`/sessions/${id}/report?format=json`);
  }
}
