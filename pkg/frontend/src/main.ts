/** Page bootstrap: read the runtime base URL and mount the chat app. */

import { ApiClient } from "./api.js";
import { ChatApp } from "./app.js";

declare global {
  interface Window {
    /** Set in config.js; points at a running `convsearch serve` instance. */
    CONVSEARCH_BASE_URL?: string;
  }
}

const baseUrl = window.CONVSEARCH_BASE_URL ?? "http://127.0.0.1:8000";
const root = document.getElementById("app");
if (root !== null) {
  const app = new ChatApp(root, new ApiClient(baseUrl));
  void app.start();
}
