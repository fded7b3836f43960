"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES = {}


def record(key, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}"
    LINES[key] = line
    print(line)
    return ok
