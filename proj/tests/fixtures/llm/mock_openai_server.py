"""OpenAI-compatible chat completions stub used to record the replay fixtures.

Replies are a deterministic function of the final user message. Two aspects
are scripted to misbehave: "burger" gets prose without a score on its first
request (the retry succeeds), and "room" never gets a score (the instance
falls back to the midpoint).

    python3 mock_openai_server.py PORT
"""

import hashlib
import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

seen = {}


def reply_for(query: str) -> str:
    count = seen.get(query, 0)
    seen[query] = count + 1
    if 'Aspect: "room"' in query:
        return "I cannot determine this."
    if 'Aspect: "burger"' in query and count == 0:
        return "The sentiment here is hard to pin down."
    digest = hashlib.sha256(query.encode("utf-8")).digest()
    v = 1.0 + digest[0] / 255.0 * 8.0
    a = 1.0 + digest[1] / 255.0 * 8.0
    return f"{v:.2f}#{a:.2f}"


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        if self.path != "/v1/chat/completions":
            self.send_error(404)
            return
        if self.headers.get("Authorization", "") != "Bearer mock-key":
            self.send_error(401)
            return
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        content = reply_for(body["messages"][-1]["content"])
        payload = json.dumps(
            {"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}
        ).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


if __name__ == "__main__":
    ThreadingHTTPServer(("127.0.0.1", int(sys.argv[1])), Handler).serve_forever()
