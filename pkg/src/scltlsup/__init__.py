"""Supervisory control of partially observed discrete event systems for scLTL specifications.

Typical pipeline::

    from scltlsup import formula, dfa, product, ranking, supervisor, sim

    f = formula.parse("F a & !a U b", ap=plant.ap)
    p = product.build(plant, dfa.compile(f, plant.ap))
    rank = ranking.compute_ranking(p)
    trace = sim.run_episode(p, rank, supervisor.parse_permissiveness("linear:5,1"),
                            sim.RandomPolicy(seed=0))
"""

from . import des, dfa, formula, product, ranking, sim, supervisor
from .des import Des, Event
from .dfa import Dfa
from .formula import parse
from .product import ProductAutomaton
from .ranking import RankingFunction, compute_ranking, is_controllable, is_observable
from .supervisor import Permissiveness, parse_permissiveness

__version__ = "0.1.0"

__all__ = [
    "des", "dfa", "formula", "product", "ranking", "sim", "supervisor",
    "Des", "Event", "Dfa", "parse", "ProductAutomaton", "RankingFunction",
    "compute_ranking", "is_controllable", "is_observable", "Permissiveness", "parse_permissiveness",
]
