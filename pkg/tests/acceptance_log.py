"""Shared record of acceptance results, printed by the conftest summary hook."""

RESULTS = {}


def record(number, title, checks):
    ok = all(c[1] for c in checks)
    parts = "; ".join(f"{name} {'ok' if good else 'FAIL'} ({detail})" for name, good, detail in checks)
    line = f"CRITERION {number} [{title}]: {'PASS' if ok else 'FAIL'} | {parts}"
    RESULTS[number] = {"ok": ok, "line": line}
    return line
