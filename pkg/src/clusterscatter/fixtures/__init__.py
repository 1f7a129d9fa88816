"""Shipped reference data: the two standard rank-2 seeds, the finite-type
chart, completed and mutated wall lists, and the infinite-type closed-form
series coefficients.

Every file is produced by ``python3 -m clusterscatter.fixtures`` from the
library itself or from a closed formula; nothing is hand-entered.
"""

import json
from importlib import resources

FILES = (
    "b2.json",
    "kronecker.json",
    "b2_chart.json",
    "b2_walls_order6.json",
    "b2_mutated_walls_order6.json",
    "kron_rw_order10.json",
)


def fixture_text(name: str) -> str:
    if name not in FILES:
        raise KeyError(f"unknown fixture {name!r}; shipped: {', '.join(FILES)}")
    return (resources.files(__package__) / name).read_text()


def load_fixture(name: str):
    return json.loads(fixture_text(name))
