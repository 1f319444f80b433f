"""Running deeply recursive work on a thread with a large stack."""

from __future__ import annotations

import sys
import threading
from typing import Any, Callable

DEEP_STACK_BYTES = 1 << 30
DEEP_RECURSION_LIMIT = 400_000
_lock = threading.Lock()


def deep_call(fn: Callable[..., Any], *args, **kwargs) -> Any:
    """Call ``fn`` on a worker thread with a 1 GiB stack and a raised recursion limit."""
    result: dict[str, Any] = {}

    def runner():
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            result["error"] = exc

    with _lock:
        old_size = threading.stack_size()
        old_limit = sys.getrecursionlimit()
        threading.stack_size(DEEP_STACK_BYTES)
        try:
            th = threading.Thread(target=runner, name="glterm-deep")
            th.start()
        finally:
            threading.stack_size(old_size)
        sys.setrecursionlimit(max(old_limit, DEEP_RECURSION_LIMIT))
        try:
            th.join()
        finally:
            sys.setrecursionlimit(old_limit)
    if "error" in result:
        raise result["error"]
    return result.get("value")
