import pytest

# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def record(number: int, title: str, passed: bool, detail: str) -> str:
    ACCEPTANCE[number] = (title, bool(passed), detail)
    line = f"[{number:>2}] {title:<24} {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    return line


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{number:>2}] {title:<24} {'PASS' if ok else 'FAIL'}  {detail}")
