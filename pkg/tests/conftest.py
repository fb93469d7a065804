import math

import numpy as np
import pytest

from hybridrir.core import MicPair, Room, Scene, Source, SynthConfig


@pytest.fixture
def cfg():
    return SynthConfig()


@pytest.fixture
def room():
    return Room(6.0, 6.0, 2.4, 0.6)


@pytest.fixture
def scene(room):
    # cardioid source at (2, 3, 1.5) facing +x toward a pair 2 m away
    source = Source((2.0, 3.0, 1.5), 0.0, 0.0)
    mics = MicPair.from_center((4.0, 3.0, 1.5), math.pi / 2)
    return Scene(room, source, mics)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def mirror_images(dims, source, order):
    """Brute force: reflect across the six walls breadth-first.

    Returns {rounded position: minimal number of reflections}.
    """
    dims = np.asarray(dims, dtype=float)
    start = tuple(np.round(source, 9))
    seen = {start: 0}
    frontier = [np.asarray(source, dtype=float)]
    for depth in range(1, order + 1):
        nxt = []
        for p in frontier:
            for axis in range(3):
                for wall in (0.0, dims[axis]):
                    q = p.copy()
                    q[axis] = 2 * wall - q[axis]
                    key = tuple(np.round(q, 9))
                    if key not in seen:
                        seen[key] = depth
                        nxt.append(q)
        frontier = nxt
    return seen


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, "C1 name", "detail")``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(ok, name, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1][1:].rstrip(":"))):
            terminalreporter.write_line(line)
