import pytest

CRITERIA = {
    1: "extremal spectra match brute-force optimizer (d=3,4)",
    2: "entropy sandwich on random states",
    3: "coherent-information and coherence bounds hold on random states",
    4: "bounds collapse on tight pure cases",
    5: "shadow purity statistics on GHZ pi/4",
    6: "Bell-measurement purity formulas are exact",
    7: "exact sweeps and noise orderings",
    8: "byte-identical CSV on re-run",
    9: "tomography baseline",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test gates")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(crit, []).append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, desc in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n}: NOT RUN  {desc}")
            continue
        ok = all(o == "passed" for _, o in results)
        failed = [nid.split("::")[-1] for nid, o in results if o != "passed"]
        extra = f"  (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {desc}{extra}")
