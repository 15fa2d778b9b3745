import json
from pathlib import Path

import pytest

from builders import make_qa, make_squad_doc
from trqg.corpus import parse_squad_json

DATA_DIR = Path(__file__).parent / "data"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if report.when != "call" or "acceptance" not in report.keywords:
                continue
            slug = report.nodeid.split("::")[-1]
            slug = slug.removeprefix("test_").replace("_", "-")
            lines.append((slug, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for slug, status in lines:
            terminalreporter.write_line(f"ACCEPTANCE {slug}: {status}")


@pytest.fixture(scope="session")
def appendix_samples():
    """Two real paragraphs used as ground truth across the suite."""
    return json.loads((DATA_DIR / "appendix_samples.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def pardus(appendix_samples):
    return appendix_samples["pardus"]["paragraph"]


@pytest.fixture(scope="session")
def ferhat(appendix_samples):
    return appendix_samples["ferhat_pasa"]["paragraph"]


@pytest.fixture
def mini_corpus():
    """A small hand-built corpus with known counts.

    One article, two paragraphs, three records, four answers.
    """
    doc = make_squad_doc(
        [
            (
                "Ali sabah geldi. Ayşe oraya gitti.",
                [
                    make_qa("q1", "Kim geldi?", ("Ali", 0)),
                    make_qa("q2", "Kim gitti?", ("Ayşe", 17), ("Ayşe", 17)),
                ],
            ),
            (
                "Pardus bir işletim sistemidir.",
                [make_qa("q3", "Pardus nedir?", ("işletim sistemidir", 11))],
            ),
        ]
    )
    return parse_squad_json(json.dumps(doc, ensure_ascii=False))
