import pytest
from hypothesis import HealthCheck, settings

from scltlsup import demo, dfa, formula as fm, product, ranking, supervisor
from scltlsup.des import Des, Event

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def plant():
    return demo.demo_plant()


@pytest.fixture(scope="session")
def spec(plant):
    return fm.parse(demo.DEMO_FORMULA, plant.ap)


@pytest.fixture(scope="session")
def acceptor(plant, spec):
    return dfa.compile(spec, plant.ap)


@pytest.fixture(scope="session")
def prod(plant, acceptor):
    return product.build(plant, acceptor)


@pytest.fixture(scope="session")
def rank(prod):
    return ranking.compute_ranking(prod)


@pytest.fixture(scope="session")
def eta():
    return supervisor.parse_permissiveness(demo.DEMO_ETA)


def state(p, name):
    return p.names.index(name)


def hand_product(n, events, edges, accepting, initial=0):
    """Small arena from ``(src, event, dst)`` triples; ``events`` maps name -> (controllable, observable)."""
    evs = [Event(name, c, o) for name, (c, o) in events.items()]
    delta = [dict() for _ in range(n)]
    for x, e, y in edges:
        delta[x][e] = y
    return product.ProductAutomaton(evs, delta, accepting, initial)


# the worked example names acceptor states differently; this is the relabelling
# between its names and the breadth-first numbering used here
EXAMPLE_NAMES = {
    "(x0,y0)": "(x0,q0)",
    "(x2,y3)": "(x2,q2)",
    "(x3,y2)": "(x3,q4)",
    "(x4,y0)": "(x4,q0)",
    "(x1,y5)": "(x1,q1)",
}


def example_state(p, example_name):
    return p.names.index(EXAMPLE_NAMES[example_name])


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
