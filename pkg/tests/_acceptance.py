"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

import functools

LINES: list[str] = []


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                LINES.append(f"[FAIL] {number:>2}. {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
                raise
            LINES.append(f"[PASS] {number:>2}. {title}" + (f" ({detail})" if detail else ""))

        return run

    return wrap
