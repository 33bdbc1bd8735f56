/** Typed client for the paraphrase service. */

export interface Occurrence {
  strategy: string;
  start_token: number;
  end_token: number;
  start_char: number;
  end_char: number;
  text: string;
}

export interface ExtractResponse {
  message: string;
  strategies: string[];
  occurrences: Occurrence[];
}

export interface PerceiveResponse {
  strategies: string[];
  level: number;
}

export interface PlanResponse {
  message: string;
  method: string;
  s_in: string[];
  target: number;
  s_out: string[];
  achieved: number;
  gap: number;
  added: string[];
  removed: string[];
  nodes: number;
}

export interface TraceStep {
  strategy: string;
  template: string;
  anchor: string;
  offset: number;
}

export interface Alternative {
  text: string;
  strategies: string[];
  predicted: number;
  gap: number;
  shortfall: boolean;
  trace: TraceStep[];
}

export interface ParaphraseResponse {
  message: string;
  original: { strategies: string[]; intended: number };
  no_intervention_gap: number;
  plan: { method: string; s_out: string[]; gap: number };
  alternatives: Alternative[];
}

export interface ProfilesResponse {
  lexicon_version: string;
  models: string[];
  channels: string[];
}

export interface Analysis {
  message: string;
  strategies: string[];
  occurrences: Occurrence[];
  intended: number;
  receiverLevel: number;
  noInterventionGap: number;
}

export interface CircumstanceChoice {
  sender: string;
  receiver: string;
  channel: string;
  method: string;
}

export class ServiceError extends Error {
  readonly code: string;
  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, body?: unknown, signal?: AbortSignal): Promise<T> {
    const init: RequestInit = body === undefined
      ? { method: "GET", signal }
      : {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify(body),
          signal,
        };
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ServiceError("unreachable", `service unreachable: ${String(err)}`);
    }
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      const code = payload?.code ?? `http_${resp.status}`;
      const message = payload?.message ?? `request failed with status ${resp.status}`;
      throw new ServiceError(code, message);
    }
    return payload as T;
  }

  profiles(): Promise<ProfilesResponse> {
    return this.request<ProfilesResponse>("/v1/profiles");
  }

  extract(message: string, signal?: AbortSignal): Promise<ExtractResponse> {
    return this.request<ExtractResponse>("/v1/extract", { message }, signal);
  }

  perceive(message: string, model: string, signal?: AbortSignal): Promise<PerceiveResponse> {
    return this.request<PerceiveResponse>("/v1/perceive", { message, model }, signal);
  }

  plan(
    message: string,
    choice: CircumstanceChoice,
    method: string,
    signal?: AbortSignal,
  ): Promise<PlanResponse> {
    return this.request<PlanResponse>(
      "/v1/plan",
      { message, sender: choice.sender, receiver: choice.receiver, channel: choice.channel, method },
      signal,
    );
  }

  paraphrase(
    message: string,
    choice: CircumstanceChoice,
    alternatives = 3,
    signal?: AbortSignal,
  ): Promise<ParaphraseResponse> {
    return this.request<ParaphraseResponse>(
      "/v1/paraphrase",
      {
        message,
        sender: choice.sender,
        receiver: choice.receiver,
        channel: choice.channel,
        method: choice.method,
        alternatives,
      },
      signal,
    );
  }

  /** Draft analysis: marker spans, intended level and the level/gap the
   * receiver would see with no intervention (a method="none" plan). */
  async analyze(message: string, choice: CircumstanceChoice, signal?: AbortSignal): Promise<Analysis> {
    const [extract, intended, nonePlan] = await Promise.all([
      this.extract(message, signal),
      this.perceive(message, choice.sender, signal),
      this.plan(message, choice, "none", signal),
    ]);
    return {
      message,
      strategies: extract.strategies,
      occurrences: extract.occurrences,
      intended: intended.level,
      receiverLevel: nonePlan.achieved,
      noInterventionGap: nonePlan.gap,
    };
  }
}
