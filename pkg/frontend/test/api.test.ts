import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { DEFAULTS_FIXTURE, PYTHON_CHAT_FIXTURE, jsonResponse, stubFetch } from "./fixtures.js";

describe("ApiClient", () => {
  it("fetches defaults with the requested k", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/defaults": () => jsonResponse(DEFAULTS_FIXTURE),
    });
    const client = new ApiClient("", fetchFn);
    const body = await client.fetchDefaults(3);
    expect(body.recommendations).toHaveLength(5);
    expect(calls[0].url).toBe("/api/defaults?k=3");
  });

  it("posts chat messages with the session id", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/chat": () => jsonResponse(PYTHON_CHAT_FIXTURE),
    });
    const client = new ApiClient("", fetchFn);
    await client.sendChat("I want to learn python", "session-9");
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent).toEqual({ message: "I want to learn python", session_id: "session-9" });
    expect(calls[0].init?.method).toBe("POST");
  });

  it("omits session_id on the first message", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/chat": () => jsonResponse(PYTHON_CHAT_FIXTURE),
    });
    await new ApiClient("", fetchFn).sendChat("hello", null);
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ message: "hello" });
  });

  it("prefixes a base URL", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/defaults": () => jsonResponse(DEFAULTS_FIXTURE),
    });
    await new ApiClient("http://localhost:8080", fetchFn).fetchDefaults();
    expect(calls[0].url).toBe("http://localhost:8080/api/defaults?k=5");
  });

  it("raises ApiError with status and stage on service failure", async () => {
    const { fetchFn } = stubFetch({
      "/api/chat": () => jsonResponse({ error: "key rejected", stage: "generate" }, 502),
    });
    const client = new ApiClient("", fetchFn);
    const error = await client.sendChat("x", null).catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(502);
    expect(error.stage).toBe("generate");
    expect(error.message).toBe("key rejected");
  });

  it("sends the provider key header only while set, never persisting it", async () => {
    const { fetchFn, calls } = stubFetch({
      "/api/chat": () => jsonResponse(PYTHON_CHAT_FIXTURE),
    });
    const client = new ApiClient("", fetchFn);
    client.setProviderKey("sk-memory-only");
    await client.sendChat("first", null);
    client.setProviderKey(null);
    await client.sendChat("second", null);

    const first = calls[0].init?.headers as Record<string, string>;
    const second = calls[1].init?.headers as Record<string, string>;
    expect(first["X-Provider-Key"]).toBe("sk-memory-only");
    expect(second["X-Provider-Key"]).toBeUndefined();
    expect(window.localStorage.length).toBe(0);
    expect(window.sessionStorage.length).toBe(0);
  });
});
