from pathlib import Path

import pytest

import acceptance_report

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def pytest_terminal_summary(terminalreporter):
    if not acceptance_report.RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed in acceptance_report.RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def shared_inputs(fixtures_dir):
    """Parsed copies of the shipped workload, reused across tests."""
    from retdecide import parse_collection, parse_config, parse_costs, parse_qrels, parse_queries, parse_run

    config = parse_config(fixtures_dir / "scenario1.json")
    return {
        "config1": config,
        "config2": parse_config(fixtures_dir / "scenario2.json"),
        "config_planted": parse_config(fixtures_dir / "planted.json"),
        "qrels": parse_qrels(fixtures_dir / "qrels.txt"),
        "costs": parse_costs(fixtures_dir / "costs.json"),
        "queries": parse_queries(fixtures_dir / "queries.tsv", config.tokenizer),
        "collection": parse_collection(fixtures_dir / "collection.tsv", config.tokenizer),
        "runs": {
            name: parse_run(fixtures_dir / f"{name}.run", system_id=name)
            for name in ("bm25", "tas", "tasflaw")
        },
    }
