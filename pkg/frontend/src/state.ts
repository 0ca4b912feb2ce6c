import type { ChatResponse, Message, RecommendationItem } from "./types.js";

export interface ChatViewState {
  sessionId: string | null;
  messages: Message[];
  defaults: RecommendationItem[];
  defaultsError: string | null;
  pending: boolean;
}

/** Transcript + defaults state with the single-in-flight invariant.
 *
 * At most one chat request is pending at a time; beginSend refuses while
 * one is outstanding, so a reply always lands right after its own
 * question and transcript order matches request order.
 */
export class ChatStore {
  private state: ChatViewState = {
    sessionId: null,
    messages: [],
    defaults: [],
    defaultsError: null,
    pending: false,
  };
  private listeners: Array<(state: ChatViewState) => void> = [];

  snapshot(): ChatViewState {
    return {
      ...this.state,
      messages: [...this.state.messages],
      defaults: [...this.state.defaults],
    };
  }

  subscribe(listener: (state: ChatViewState) => void): void {
    this.listeners.push(listener);
    listener(this.snapshot());
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const listener of this.listeners) listener(snap);
  }

  /** Append the user message and mark the request in flight.
   * Returns false (and changes nothing) when empty or already pending. */
  beginSend(text: string): boolean {
    if (this.state.pending || !text.trim()) return false;
    this.state.messages.push({ role: "user", text });
    this.state.pending = true;
    this.emit();
    return true;
  }

  completeSend(response: ChatResponse): void {
    this.state.sessionId = response.session_id;
    this.state.messages.push({
      role: "assistant",
      text: response.reply,
      recommendations: response.recommendations,
    });
    this.state.pending = false;
    this.emit();
  }

  failSend(errorText: string): void {
    this.state.messages.push({ role: "system", text: errorText });
    this.state.pending = false;
    this.emit();
  }

  setDefaults(items: RecommendationItem[]): void {
    this.state.defaults = items;
    this.state.defaultsError = null;
    this.emit();
  }

  setDefaultsError(message: string): void {
    this.state.defaults = [];
    this.state.defaultsError = message;
    this.emit();
  }
}
