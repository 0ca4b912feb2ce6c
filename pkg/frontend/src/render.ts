import type { Message, RecommendationItem } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function courseCard(item: RecommendationItem): HTMLElement {
  const card = el("div", "course-card");
  card.dataset.testid = "course-card";
  if (item.url) {
    const link = el("a", "course-title", item.title) as HTMLAnchorElement;
    link.href = item.url;
    link.target = "_blank";
    link.rel = "noopener";
    card.appendChild(link);
  } else {
    card.appendChild(el("div", "course-title", item.title));
  }
  if (item.rating !== undefined) {
    card.appendChild(el("div", "course-rating", `rating ${item.rating.toFixed(1)}`));
  }
  if (item.reason) {
    card.appendChild(el("div", "course-reason", item.reason));
  }
  return card;
}

export function renderDefaults(
  container: HTMLElement,
  items: RecommendationItem[],
  error: string | null,
  onRetry: () => void,
): void {
  container.replaceChildren();
  if (error) {
    const banner = el("div", "error-banner");
    banner.dataset.testid = "error-banner";
    banner.appendChild(el("span", undefined, error));
    const retry = el("button", "retry-button", "Retry") as HTMLButtonElement;
    retry.dataset.testid = "retry-defaults";
    retry.addEventListener("click", onRetry);
    banner.appendChild(retry);
    container.appendChild(banner);
    return;
  }
  for (const item of items) container.appendChild(courseCard(item));
}

function bubble(message: Message): HTMLElement {
  const wrap = el("div", `message message-${message.role}`);
  wrap.dataset.testid = `message-${message.role}`;
  wrap.appendChild(el("div", "bubble", message.text));
  if (message.recommendations?.length) {
    const cards = el("div", "cards");
    for (const item of message.recommendations) cards.appendChild(courseCard(item));
    wrap.appendChild(cards);
  }
  return wrap;
}

export function renderTranscript(container: HTMLElement, messages: Message[]): void {
  container.replaceChildren(...messages.map(bubble));
  container.scrollTop = container.scrollHeight;
}
