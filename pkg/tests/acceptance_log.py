"""Shared record of acceptance outcomes, printed in the pytest terminal summary."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(key: int, passed: bool, detail: str) -> bool:
    RESULTS[key] = (bool(passed), detail)
    print(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed
