/**
 * Typed client for the workbench gateway. Every method is a thin wrapper
 * around one endpoint; responses arrive in a `{schema_version, result}`
 * envelope which the client unwraps.
 */

export interface Envelope<T> {
  schema_version: string;
  result: T;
}

export interface GatewayErrorBody {
  schema_version: string;
  error: string;
  message?: string;
  diagnostics?: string[];
}

export class GatewayError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string,
    public readonly diagnostics: string[] = [],
  ) {
    super(message);
  }
}

export interface Violation {
  rule_id: string;
  severity: "error" | "warning";
  message: string;
  culprits: string[];
}

export interface Structure {
  components: Record<string, string>; // id -> component type
  connectors: Record<string, string>;
  attachments: { component: string; port: string; connector: string; role: string }[];
  dataflow: [string, string][];
}

export interface ArchitectureInfo {
  id: string;
  name: string;
  style: string;
  version: number;
  source: string;
  structure: Structure;
}

export interface PlanStep {
  id: string;
  component: string;
  component_type: string;
  input_slots: string[];
  output_slots: string[];
  params: Record<string, unknown>;
}

export interface Plan {
  plan_id: string;
  steps: Record<string, PlanStep>;
  artifacts: Record<string, string>;
  deps: [string, string][];
}

export type StepState = "Pending" | "Running" | "Done" | "Failed" | "Skipped";

export interface SessionInfo {
  session_id: string;
  plan_id: string;
  status: string;
  step_states: Record<string, StepState>;
  breakpoints: string[];
  slot_digests: Record<string, string>;
  record_ids: string[];
  error: string | null;
}

export interface SessionEvent {
  seq: number;
  ts: number;
  kind: "session" | "status" | "step";
  state: string;
  step?: string;
}

export interface RepoEntry {
  entry_id: string;
  name: string;
  version: number;
  metadata: {
    description: string;
    ontology_path: string[];
    param_count: number;
    provider: string;
    auth: string;
    consumes: string[];
    produces: string[];
  };
}

export interface OntologyNode {
  name: string;
  children: OntologyNode[];
}

export interface HistoryRecord {
  record_id: string;
  seq: number;
  user: string;
  operation: string;
  outcome: string;
  input_digests: string[];
  output_digests: string[];
}

export interface ArtifactMeta {
  digest: string;
  format: string;
  size_bytes: number;
}

export class GatewayClient {
  constructor(
    public readonly baseUrl: string,
    private readonly token?: string,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["content-type"] = "application/json";
    if (this.token && method !== "GET")
      headers["authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as Envelope<T> & GatewayErrorBody;
    if (!response.ok) {
      throw new GatewayError(
        response.status,
        payload.error ?? "HTTPError",
        payload.message ?? `request failed with ${response.status}`,
        payload.diagnostics ?? [],
      );
    }
    return payload.result;
  }

  styles(): Promise<string[]> {
    return this.request("GET", "/styles");
  }

  addStyle(source: string): Promise<{ name: string }> {
    return this.request("POST", "/styles", { source });
  }

  addArchitecture(source: string): Promise<{ id: string; name: string }> {
    return this.request("POST", "/architectures", { source });
  }

  architecture(id: string): Promise<ArchitectureInfo> {
    return this.request("GET", `/architectures/${id}`);
  }

  check(id: string): Promise<Violation[]> {
    return this.request("POST", `/architectures/${id}/check`);
  }

  analyze<T = Violation[]>(
    id: string,
    analysis: string,
    body: Record<string, unknown> = {},
  ): Promise<T> {
    return this.request("POST", `/architectures/${id}/analyze/${analysis}`, body);
  }

  compile(
    id: string,
    bindings: Record<string, { kind: string; ref: string }>,
  ): Promise<Plan> {
    return this.request("POST", `/architectures/${id}/compile`, { bindings });
  }

  runPlan(
    planId: string,
    options: {
      inputs?: Record<string, string>;
      breakpoints?: string[];
      mode?: "run" | "start";
      max_workers?: number;
    } = {},
  ): Promise<SessionInfo> {
    return this.request("POST", `/plans/${planId}/run`, options);
  }

  session(id: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${id}`);
  }

  step(id: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${id}/step`);
  }

  breakpoints(
    id: string,
    body: { set?: string[]; clear?: string[]; resume?: boolean },
  ): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${id}/breakpoints`, body);
  }

  artifacts(id: string): Promise<Record<string, ArtifactMeta>> {
    return this.request("GET", `/sessions/${id}/artifacts`);
  }

  artifact(
    id: string,
    slot: string,
  ): Promise<{ slot: string; digest: string; content: string }> {
    return this.request("GET", `/sessions/${id}/artifacts/${slot}`);
  }

  events(id: string, after = -1): Promise<SessionEvent[]> {
    return this.request("GET", `/sessions/${id}/events?after=${after}`);
  }

  /** Fetch the SSE stream for a session and parse it into events. */
  async streamEvents(id: string): Promise<SessionEvent[]> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${id}/stream`,
    );
    return parseSse(await response.text());
  }

  repoEntries(): Promise<RepoEntry[]> {
    return this.request("GET", "/repo/entries");
  }

  repoSearch(filters: {
    prefix?: string;
    text?: string;
    consumes?: string;
    produces?: string;
    max_params?: number;
  }): Promise<RepoEntry[]> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(filters))
      if (value !== undefined) query.set(key, String(value));
    return this.request("GET", `/repo/search?${query}`);
  }

  repoOntology(): Promise<OntologyNode> {
    return this.request("GET", "/repo/ontology");
  }

  history(userName?: string): Promise<HistoryRecord[]> {
    const suffix = userName ? `?user_name=${encodeURIComponent(userName)}` : "";
    return this.request("GET", `/history${suffix}`);
  }

  synthesize(style: string, recordIds?: string[]): Promise<{ source: string }> {
    return this.request("POST", "/history/synthesize", {
      style,
      record_ids: recordIds ?? null,
    });
  }

  replay(recordIds: string[]): Promise<SessionInfo> {
    return this.request("POST", "/history/replay", { record_ids: recordIds });
  }
}

/** Parse a server-sent-event payload into session events. */
export function parseSse(text: string): SessionEvent[] {
  return text
    .split(/\n\n/)
    .map((block) => block.trim())
    .filter((block) => block.startsWith("data: "))
    .map((block) => JSON.parse(block.slice(6)) as SessionEvent);
}
