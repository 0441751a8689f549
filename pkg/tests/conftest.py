import textwrap
from pathlib import Path

import pytest

from nexusgrid import fixture_config_path


@pytest.fixture
def fixture_config() -> Path:
    return fixture_config_path()


def write(path: Path, text: str) -> Path:
    path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
    return path


@pytest.fixture
def toy_dir(tmp_path):
    """Single firm, single location, frozen world."""
    write(tmp_path / "inventory.csv", """
        firm,location,site_count
        Acme,acme-hq,3
        """)
    write(tmp_path / "regions.csv", """
        location,region
        acme-hq,Alpha
        """)
    write(tmp_path / "supply.csv", """
        region,year,generation_twh
        Alpha,2019,100
        Alpha,2024,100
        """)
    write(tmp_path / "config.toml", """
        horizon = 2030
        out_dir = "out"

        [inputs]
        inventory = "inventory.csv"
        region_map = "regions.csv"
        supply = "supply.csv"

        [scenarios]
        g_stock = 0.0
        conservative = 0.0
        neutral = 0.0
        optimistic = 0.0

        [schedules]
        Acme = [0.5, 0.5, 0.5]

        [anchors.Acme]
        e_stock_2024 = 10.0
        e_ai_new_2024 = 2.0

        [paths]
        count = 3
        """)
    return tmp_path


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
