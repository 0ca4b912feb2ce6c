import type { ChatResponse, DefaultsResponse } from "./types.js";

/** Error carrying the HTTP status and, when the service provides one,
 * the pipeline stage that failed. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly stage?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `service error (HTTP ${response.status})`;
  let stage: string | undefined;
  try {
    const body = await response.json();
    if (typeof body?.error === "string") message = body.error;
    if (typeof body?.stage === "string") stage = body.stage;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, message, stage);
}

/** Thin fetch client for the service API.
 *
 * A provider key override, when set, lives only in this object - it is
 * sent as the X-Provider-Key header and never written to any storage.
 */
export class ApiClient {
  private providerKey: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  setProviderKey(key: string | null): void {
    this.providerKey = key && key.trim() ? key.trim() : null;
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.providerKey) headers["X-Provider-Key"] = this.providerKey;
    return headers;
  }

  async fetchDefaults(k = 5): Promise<DefaultsResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/defaults?k=${k}`);
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }

  async sendChat(message: string, sessionId: string | null): Promise<ChatResponse> {
    const body: Record<string, unknown> = { message };
    if (sessionId) body.session_id = sessionId;
    const response = await this.fetchFn(`${this.baseUrl}/api/chat`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }
}
