import { ApiClient } from "./api.js";
import { ChatApp } from "./app.js";
import { locale } from "./locale.js";

// API base URL: same origin by default, overridable at runtime via
// <meta name="hakkachat-api" content="http://host:port">.
const meta = document.querySelector('meta[name="hakkachat-api"]');
const baseUrl = meta?.getAttribute("content") ?? "";

const host = document.getElementById("root");
if (!host) throw new Error("missing #root element");
const app = new ChatApp(host, new ApiClient(baseUrl), locale);
void app.newSession();
