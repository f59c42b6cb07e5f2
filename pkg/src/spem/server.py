"""Read-only static file server for viewer assets and artifact JSON.

Only GET and HEAD are answered; everything else gets 405.  CORS is left
permissive because the server binds to localhost for desk use.
"""

from __future__ import annotations

import errno
import functools
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

from .errors import PortInUse


class _ReadOnlyHandler(SimpleHTTPRequestHandler):
    extensions_map = {
        **SimpleHTTPRequestHandler.extensions_map,
        ".json": "application/json",
        ".js": "text/javascript",
    }

    def end_headers(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, HEAD")
        super().end_headers()

    def _refuse(self):
        self.send_error(405, "read-only server")

    do_POST = do_PUT = do_DELETE = do_PATCH = _refuse


def create_server(directory: str, port: int,
                  host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = functools.partial(_ReadOnlyHandler, directory=str(directory))
    try:
        return ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUse(f"port {port} on {host} is already bound") from exc
        raise


def serve_forever(directory: str, port: int, host: str = "127.0.0.1") -> None:
    with create_server(directory, port, host) as httpd:
        bound = httpd.socket.getsockname()
        print(f"serving {directory} at http://{bound[0]}:{bound[1]}/")
        httpd.serve_forever()
