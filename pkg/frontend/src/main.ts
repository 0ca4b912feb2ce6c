import { mountApp } from "./app.js";

// Same-origin by default; override for a separately hosted service via
// <meta name="ramo-api-base" content="http://localhost:8080">.
const base =
  document.querySelector<HTMLMetaElement>('meta[name="ramo-api-base"]')?.content ?? "";

mountApp(document, base);
