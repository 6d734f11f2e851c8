import pytest

from estool.synthetic import synth_corpus


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance gate at the end of the run."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(terminalreporter.stats.get(key, []))
    gates = [r for r in reports
             if getattr(r, "when", "call") == "call" and "test_acceptance" in r.nodeid]
    if not gates:
        return
    terminalreporter.write_sep("-", "acceptance gates")
    for report in sorted(gates, key=lambda r: r.nodeid):
        verdict = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"{verdict}  {report.nodeid.split('::')[-1]}")


@pytest.fixture(scope="session")
def photo_corpus_small():
    """100 deterministic photograph-like scenes."""
    return synth_corpus(100, seed=0)


@pytest.fixture(scope="session")
def photo_corpus_large(photo_corpus_small):
    """520 scenes; the first 100 are shared with the small corpus."""
    return list(photo_corpus_small) + synth_corpus(420, seed=100)
