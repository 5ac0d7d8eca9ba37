def pytest_configure(config):
    config.ter_verdicts = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = getattr(config, "ter_verdicts", [])
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(verdicts):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
