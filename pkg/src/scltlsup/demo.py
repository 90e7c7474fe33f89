"""The five-state demonstration plant and its specification.

Three atoms ``a``, ``b``, ``c`` label states ``x1``, ``x2``, ``x3``; the
specification asks to reach ``a`` only after both ``b`` and ``c`` were seen.
All seven events are controllable, ``o1..o3`` are observable and ``u1..u4``
are not. The transition structure is chosen so that, with the schedule
``linear:5,1`` and observations ``o1 o1 o2``, the on-line supervisor issues
``{u2,o2,u3,o1,o3}`` twice, then ``{u2,o2}``, then only the final legal move.
"""

import json
from importlib import resources

from .des import Des, from_json

DEMO_FORMULA = "F a & !a U b & !a U c"
DEMO_ETA = "linear:5,1"


def demo_plant_document() -> dict:
    return json.loads(resources.files(__package__).joinpath("data/demo_plant.json").read_text())


def demo_plant() -> Des:
    return from_json(demo_plant_document())
