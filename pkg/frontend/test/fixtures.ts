import type { ChatResponse, DefaultsResponse } from "../src/types.js";

/** Canned service responses mirroring the live API's shapes. */

export const DEFAULTS_FIXTURE: DefaultsResponse = {
  source: "defaults",
  recommendations: [
    { title: "Crash Course on Python", course_id: 1, url: "https://example.test/crash", rating: 4.9 },
    { title: "Machine Learning Foundations", course_id: 5, url: "https://example.test/ml", rating: 4.9 },
    { title: "Python Basics", course_id: 0, url: "https://example.test/basics", rating: 4.8 },
    { title: "Introduction to Python", course_id: 2, url: "https://example.test/intro", rating: 4.7 },
    { title: "SQL for Data Analysis", course_id: 4, url: "https://example.test/sql", rating: 4.6 },
  ],
};

export const PYTHON_CHAT_FIXTURE: ChatResponse = {
  session_id: "session-fixture-1",
  reply:
    "Sure! Here are some recommended Python courses for you:\n" +
    "1. Introduction to Python\n2. Crash Course on Python\n" +
    "3. First Python Program\n4. Python Basics",
  recommendations: [
    { title: "Introduction to Python", course_id: 2, url: "https://example.test/intro", rating: 4.7 },
    { title: "Crash Course on Python", course_id: 1, url: "https://example.test/crash", rating: 4.9 },
    { title: "First Python Program", course_id: 3, url: "https://example.test/first", rating: 4.5 },
    { title: "Python Basics", course_id: 0, url: "https://example.test/basics", rating: 4.8 },
  ],
  source: "rag",
  latency_ms: 12.5,
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface StubCall {
  url: string;
  init?: RequestInit;
}

/** A scripted fetch: route handlers keyed by URL substring, call log kept. */
export function stubFetch(
  routes: Record<string, (call: StubCall) => Response | Promise<Response>>,
): { fetchFn: typeof fetch; calls: StubCall[] } {
  const calls: StubCall[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const call = { url, init };
    calls.push(call);
    for (const [needle, handler] of Object.entries(routes)) {
      if (url.includes(needle)) return handler(call);
    }
    throw new Error(`no stub route for ${url}`);
  }) as typeof fetch;
  return { fetchFn, calls };
}
