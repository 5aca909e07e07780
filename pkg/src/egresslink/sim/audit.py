"""Trace auditor: cross-cutting invariants every run must satisfy.

Checks are pure functions over trace records so they can run against
live runs and archived NDJSON alike. Violations raise AuditFailure with
the offending records named.
"""

from __future__ import annotations

from collections import defaultdict

from ..channel import REFRESH_EPSILON


class AuditFailure(AssertionError):
    pass


def audit_trace(records: list[dict], min_periods: dict[str, float]) -> None:
    """Run every invariant; min_periods maps display id -> 1/refresh rate."""
    check_ordering(records)
    check_refresh_spacing(records, min_periods)
    check_serial_service(records)
    check_exit_uniqueness(records)


def check_ordering(records: list[dict]) -> None:
    last = None
    for rec in records:
        key = (rec["t"], rec["seq"])
        if last is not None and key <= last:
            raise AuditFailure(f"trace not ordered by (t, seq) at {rec}")
        last = key


def check_refresh_spacing(records: list[dict],
                          min_periods: dict[str, float]) -> None:
    """Accepted presentations on one display sit >= its refresh period apart."""
    last_present: dict[str, float] = {}
    for rec in records:
        if rec["kind"] != "present":
            continue
        display = rec["display"]
        period = min_periods.get(display)
        if period is None:
            raise AuditFailure(f"present on unknown display {display!r}")
        prev = last_present.get(display)
        if prev is not None and rec["t"] - prev < period - REFRESH_EPSILON:
            raise AuditFailure(
                f"display {display} refreshed after {rec['t'] - prev:.6f}s "
                f"< {period:.6f}s at t={rec['t']}"
            )
        last_present[display] = rec["t"]


def check_serial_service(records: list[dict]) -> None:
    """Scan intervals on one display never overlap (strictly serial users)."""
    open_scan: dict[str, tuple[str, float]] = {}
    for rec in records:
        if rec["kind"] == "scan_begin":
            display = rec["display"]
            if display in open_scan:
                raise AuditFailure(
                    f"scan_begin for {rec['user']} while {open_scan[display][0]} "
                    f"still scanning on {display}"
                )
            open_scan[display] = (rec["user"], rec["t"])
        elif rec["kind"] == "scan_end":
            display = rec["display"]
            current = open_scan.pop(display, None)
            if current is None or current[0] != rec["user"]:
                raise AuditFailure(f"scan_end without matching begin: {rec}")


def check_exit_uniqueness(records: list[dict]) -> None:
    seen: set[str] = set()
    for rec in records:
        if rec["kind"] == "exit":
            if rec["user"] in seen:
                raise AuditFailure(f"user {rec['user']} exited twice")
            seen.add(rec["user"])


def conservation_report(records: list[dict], total_users: int) -> dict:
    """Summarize where users ended up; exited must never exceed the roster."""
    exited = sum(1 for rec in records if rec["kind"] == "exit")
    if exited > total_users:
        raise AuditFailure(f"{exited} exits recorded for {total_users} users")
    return {"exited": exited, "not_exited": total_users - exited}
