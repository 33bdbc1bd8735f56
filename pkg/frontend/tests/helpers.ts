import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

interface Fixture {
  path: string;
  match: Record<string, unknown>;
  response: unknown;
}

export const fixtures: Fixture[] = JSON.parse(
  readFileSync(join(here, "fixtures", "service_fixtures.json"), "utf-8"),
);

function jsonResponse(payload: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => payload,
  } as unknown as Response;
}

/** A fetch stub that replays recorded service responses. */
export function fixtureFetch(log?: Array<{ path: string; body: Record<string, unknown> }>) {
  return async (input: string, init?: RequestInit): Promise<Response> => {
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    const body: Record<string, unknown> = init?.body
      ? JSON.parse(init.body as string)
      : {};
    log?.push({ path, body });
    const hit = fixtures.find(
      (f) => f.path === path && Object.entries(f.match).every(([k, v]) => body[k] === v),
    );
    if (!hit) {
      return jsonResponse(
        { code: "no_fixture", message: `no fixture for ${path} ${JSON.stringify(body)}`, detail: "" },
        404,
      );
    }
    return jsonResponse(hit.response);
  };
}

export function failingFetch() {
  return async (): Promise<Response> => {
    throw new TypeError("network down");
  };
}

/** Load the composer page markup into the jsdom document. */
export function loadPage(): void {
  const html = readFileSync(join(here, "..", "public", "index.html"), "utf-8");
  const bodyMatch = html.match(/<body>([\s\S]*)<\/body>/);
  document.body.innerHTML = bodyMatch ? bodyMatch[1] : html;
}

export function flush(ms = 0): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
