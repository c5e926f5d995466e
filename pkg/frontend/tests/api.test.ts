import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";

function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

type Call = { url: string; init: RequestInit };

function captureFetch(...results: Array<Response | Error>) {
  const calls: Call[] = [];
  const mock = vi.fn(async (url: string | URL | Request, init?: RequestInit) => {
    calls.push({ url: String(url), init: init ?? {} });
    const next = results.shift();
    if (next === undefined) throw new Error("unexpected extra fetch");
    if (next instanceof Error) throw next;
    return next;
  });
  vi.stubGlobal("fetch", mock);
  return calls;
}

function headerOf(call: Call, name: string): string | undefined {
  return (call.init.headers as Record<string, string>)[name];
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("Client", () => {
  it("sends the bearer token once set", async () => {
    const calls = captureFetch(jsonResponse({ rated_count: 3 }));
    const client = new Client("http://svc");
    client.setToken("tok123");
    await client.progress();
    expect(calls[0]!.url).toBe("http://svc/rating/progress");
    expect(headerOf(calls[0]!, "Authorization")).toBe("Bearer tok123");
  });

  it("attaches an idempotency token to mutations but not reads", async () => {
    const calls = captureFetch(
      jsonResponse({ image_id: "i", value: 5, rated_count: 1 }, 201),
      jsonResponse({ items: [], revision_enabled: true }),
    );
    const client = new Client("http://svc");
    await client.recordRating("i", 5);
    await client.gallery();
    expect(headerOf(calls[0]!, "X-Idempotency-Key")).toBeTruthy();
    expect(headerOf(calls[1]!, "X-Idempotency-Key")).toBeUndefined();
  });

  it("uses a fresh idempotency token for each logical mutation", async () => {
    const calls = captureFetch(
      jsonResponse({ image_id: "a", value: 5, rated_count: 1 }, 201),
      jsonResponse({ image_id: "b", value: 6, rated_count: 2 }, 201),
    );
    const client = new Client("http://svc");
    await client.recordRating("a", 5);
    await client.recordRating("b", 6);
    const first = headerOf(calls[0]!, "X-Idempotency-Key");
    const second = headerOf(calls[1]!, "X-Idempotency-Key");
    expect(first).toBeTruthy();
    expect(second).toBeTruthy();
    expect(first).not.toBe(second);
  });

  it("retries a mutation once after a network failure, reusing the token", async () => {
    const calls = captureFetch(
      new TypeError("fetch failed"),
      jsonResponse({ image_id: "i", value: 7, rated_count: 4 }, 201),
    );
    const client = new Client("http://svc");
    const ack = await client.recordRating("i", 7);
    expect(ack.rated_count).toBe(4);
    expect(calls).toHaveLength(2);
    expect(headerOf(calls[0]!, "X-Idempotency-Key")).toBe(
      headerOf(calls[1]!, "X-Idempotency-Key"),
    );
    expect(calls[0]!.init.body).toBe(calls[1]!.init.body);
  });

  it("does not retry reads on network failure", async () => {
    const calls = captureFetch(new TypeError("fetch failed"));
    const client = new Client("http://svc");
    await expect(client.progress()).rejects.toThrow(/fetch failed/);
    expect(calls).toHaveLength(1);
  });

  it("surfaces the server's error text and status", async () => {
    captureFetch(jsonResponse({ error: "already rated; revise instead" }, 409));
    const client = new Client("http://svc");
    const err = await client.recordRating("i", 5).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).message).toMatch(/already rated/);
  });

  it("parses Retry-After on a daily-limit response", async () => {
    captureFetch(
      jsonResponse({ error: "daily game already played", retry_after: 3600 }, 429, {
        "Retry-After": "3600",
      }),
    );
    const client = new Client("http://svc");
    const err = await client.startSession("game").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(429);
    expect((err as ApiError).retryAfter).toBe(3600);
  });
});
