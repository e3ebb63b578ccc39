// Runtime configuration: where the session service lives.
// Edit this value to point at another host; no rebuild needed.
window.CONVSEARCH_BASE_URL = "http://127.0.0.1:8000";
