import itertools

import pytest
from hypothesis import settings

from dbtile.graphs import Kind, build_host

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def host_grid(max_V: int = 216):
    """Every host kind for K in {2, 3} with V <= max_V, as (host, M) pairs with M in {1, 2}."""
    out = []
    for K in (2, 3):
        N = 1
        while K**N <= max_V:
            out.append(build_host(Kind.DEBRUIJN, K, N))
            N += 1
        d = 1
        while (K + 1) * K ** (d - 1) <= max_V:
            out.append(build_host(Kind.KAUTZ, K, d))
            d += 1
        for V in range(K, max_V + 1):
            for kind in (Kind.GEN_DEBRUIJN, Kind.GEN_KAUTZ):
                try:
                    out.append(build_host(kind, K, V))
                except ValueError:
                    pass
    pairs = []
    for host, M in itertools.product(out, (1, 2)):
        if host.N >= M:
            pairs.append((host, M))
    return pairs


@pytest.fixture(scope="session")
def grid():
    return host_grid()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, (ok, detail) in mod.RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  [{detail}]")
