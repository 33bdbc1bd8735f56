import { describe, expect, it } from "vitest";

import { ApiClient, ServiceError } from "../src/api.js";
import { failingFetch, fixtureFetch } from "./helpers.js";

const WORKED = "could you please proofread this article? thanks!";
const CHOICE = { sender: "average", receiver: "average", channel: "mt-lossy", method: "ilp" };

describe("ApiClient", () => {
  it("lists profiles", async () => {
    const client = new ApiClient("", fixtureFetch());
    const profiles = await client.profiles();
    expect(profiles.models).toContain("average");
    expect(profiles.channels).toEqual(["all-safe", "mt-lossy"]);
  });

  it("extracts the worked example's three markers", async () => {
    const client = new ApiClient("", fixtureFetch());
    const extract = await client.extract(WORKED);
    expect(extract.strategies).toEqual(["Gratitude", "Please", "Subjunctive"]);
    expect(extract.occurrences).toHaveLength(3);
  });

  it("assembles an analysis from extract + perceive + none-plan", async () => {
    const log: Array<{ path: string; body: Record<string, unknown> }> = [];
    const client = new ApiClient("", fixtureFetch(log));
    const analysis = await client.analyze(WORKED, CHOICE);
    expect(analysis.intended).toBe(1.673);
    expect(analysis.noInterventionGap).toBe(0.684);
    expect(analysis.receiverLevel).toBe(0.989);
    expect(log.map((l) => l.path).sort()).toEqual(["/v1/extract", "/v1/perceive", "/v1/plan"]);
  });

  it("paraphrases with gaps sorted ascending", async () => {
    const client = new ApiClient("", fixtureFetch());
    const resp = await client.paraphrase(WORKED, CHOICE);
    expect(resp.plan.gap).toBe(0.001);
    const gaps = resp.alternatives.map((a) => a.gap);
    expect(gaps).toEqual([...gaps].sort((x, y) => x - y));
  });

  it("surfaces service error codes", async () => {
    const client = new ApiClient("", fixtureFetch());
    await expect(client.extract("unrecorded message")).rejects.toMatchObject({
      code: "no_fixture",
    });
  });

  it("maps network failures to an unreachable error", async () => {
    const client = new ApiClient("", failingFetch());
    const err = await client.profiles().catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.code).toBe("unreachable");
  });
});
