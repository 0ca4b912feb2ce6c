import { ApiClient, ApiError } from "./api.js";
import { renderDefaults, renderTranscript } from "./render.js";
import { ChatStore } from "./state.js";

export interface AppElements {
  defaultsPanel: HTMLElement;
  transcript: HTMLElement;
  form: HTMLFormElement;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  providerKeyInput?: HTMLInputElement;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    const stage = error.stage ? ` (stage: ${error.stage})` : "";
    return `The service answered ${error.status}: ${error.message}${stage}`;
  }
  return "Could not reach the service.";
}

/** Wire the store, the API client, and the DOM together. */
export class App {
  readonly store = new ChatStore();

  constructor(
    private readonly api: ApiClient,
    private readonly elements: AppElements,
    private readonly defaultsCount = 5,
  ) {
    this.store.subscribe((state) => {
      renderDefaults(elements.defaultsPanel, state.defaults, state.defaultsError, () => {
        void this.loadDefaults();
      });
      renderTranscript(elements.transcript, state.messages);
      const empty = !elements.input.value.trim();
      elements.input.disabled = state.pending;
      elements.sendButton.disabled = state.pending || empty;
    });
    elements.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send();
    });
    elements.input.addEventListener("input", () => {
      this.elements.sendButton.disabled =
        this.store.snapshot().pending || !elements.input.value.trim();
    });
    elements.providerKeyInput?.addEventListener("input", () => {
      // memory-only override; intentionally never persisted anywhere
      this.api.setProviderKey(elements.providerKeyInput!.value);
    });
  }

  async loadDefaults(): Promise<void> {
    try {
      const body = await this.api.fetchDefaults(this.defaultsCount);
      this.store.setDefaults(body.recommendations);
    } catch (error) {
      this.store.setDefaultsError(describe(error));
    }
  }

  async send(): Promise<void> {
    const text = this.elements.input.value;
    if (!this.store.beginSend(text)) return;
    this.elements.input.value = "";
    const sessionId = this.store.snapshot().sessionId;
    try {
      const response = await this.api.sendChat(text, sessionId);
      this.store.completeSend(response);
    } catch (error) {
      this.store.failSend(describe(error));
    }
  }
}

export function defaultsCountFromUrl(search: string, fallback = 5): number {
  const raw = new URLSearchParams(search).get("k");
  if (!raw) return fallback;
  const k = Number.parseInt(raw, 10);
  return Number.isFinite(k) && k >= 1 && k <= 50 ? k : fallback;
}

export function mountApp(root: Document, baseUrl = ""): App {
  const get = <T extends HTMLElement>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  };
  const app = new App(
    new ApiClient(baseUrl),
    {
      defaultsPanel: get("defaults-panel"),
      transcript: get("transcript"),
      form: get<HTMLFormElement>("chat-form"),
      input: get<HTMLInputElement>("chat-input"),
      sendButton: get<HTMLButtonElement>("send-button"),
      providerKeyInput: root.getElementById("provider-key") as HTMLInputElement | undefined,
    },
    defaultsCountFromUrl(root.location?.search ?? ""),
  );
  void app.loadDefaults();
  return app;
}
