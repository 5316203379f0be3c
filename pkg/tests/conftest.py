import pytest

from rgnnt.domains import DOMAIN_TEXT, navig_problem
from rgnnt.pddl import Instance


def navig(n, m, blocked=(), robot=(1, 1), goal=None, name="navig"):
    goal = goal or (n, m)
    return Instance.from_text(DOMAIN_TEXT["navig-xy"], navig_problem(n, m, blocked, robot, goal, name), name)


def from_zero_based(cells):
    return {(x + 1, y + 1) for x, y in cells}


# Two hand-made 8x4 layouts, 0-based (x, y): short hop and a 14-step corridor.
LAYOUT_OPEN = dict(
    blocked={(1, 0), (4, 0), (2, 1), (3, 1), (5, 1), (0, 2), (2, 2), (3, 2), (5, 2), (6, 2), (7, 2),
             (0, 3), (1, 3), (4, 3), (5, 3), (7, 3)},
    goal=(0, 0), robot=(1, 2))
LAYOUT_CORRIDOR = dict(
    blocked={(1, 0), (2, 0), (3, 0), (7, 0), (0, 1), (1, 1), (2, 1), (5, 1), (7, 1), (3, 2), (4, 2),
             (5, 2), (7, 2), (0, 3), (1, 3), (7, 3)},
    goal=(3, 1), robot=(0, 2))


def layout_instance(layout, name):
    return navig(8, 4, from_zero_based(layout["blocked"]),
                 (layout["robot"][0] + 1, layout["robot"][1] + 1),
                 (layout["goal"][0] + 1, layout["goal"][1] + 1), name)


@pytest.fixture
def navig3():
    return navig(3, 3, robot=(1, 1), goal=(3, 3))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
