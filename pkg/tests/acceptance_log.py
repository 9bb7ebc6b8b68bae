"""Collects one pass/fail line per acceptance criterion."""

RESULTS: dict[int, tuple[str, bool, str]] = {}


def record(number: int, name: str, ok: bool, detail: str = "") -> None:
    RESULTS[number] = (name, bool(ok), detail)
    print(f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def lines() -> list[str]:
    return [
        f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        for n, (name, ok, detail) in sorted(RESULTS.items())
    ]
