"""Greenhouse environments built on the unmodified greenhouse model.

Importing this module wires the model up from the outside:

* ``Greenhouse.choose_water_amount`` becomes a decision point,
* ``Greenhouse.update_air_exchange`` is exposed to plugins, and
* ``Greenhouse-v0`` and ``GreenhouseHotVent-v0`` are registered.

Observations are ``[temperature, humidity, pot count, alive fraction]``
scaled into [0, 1]; the single action in [0, 1] is scaled to 0..1000 litres.
"""
from __future__ import annotations

import functools
import weakref

import numpy as np

from simenv.bridge import SimulationInterface, generate_env, make_step
from simenv.bridge import default_envs
from simenv.greenhouse import Greenhouse
from simenv.plugins import attach_handler, default_registry, expose_to_plugins
from simenv.spaces import Box, clamp

DECISION_POINT = "simenv.greenhouse.Greenhouse.choose_water_amount"
AIR_EXCHANGE = "simenv.greenhouse.Greenhouse.update_air_exchange"
ENV_ID = "Greenhouse-v0"
HOT_VENT_ENV_ID = "GreenhouseHotVent-v0"

OBSERVATION_SPACE = Box(low=np.zeros(4), high=np.ones(4))
ACTION_SPACE = Box(low=0.0, high=1.0, shape=(1,))

# Greenhouses whose air exchange follows new_air_exchange.
_hot_vent_greenhouses = weakref.WeakSet()


def day_line(day, alive, total):
    return f"day {day} alive: {alive}, dead: {total - alive}"


class GreenhouseSim(SimulationInterface):
    """Runs greenhouse days until every plant is dead or a stop is requested.

    ``log`` receives one ``day N alive: A, dead: D`` line per day; pass
    ``None`` to silence it.
    """

    def __init__(self, seed=None, hot_vent=False, log=print):
        self.seed = seed
        self.hot_vent = hot_vent
        self.log = log
        self.greenhouse = None
        self.should_stop = False
        self.day = 0

    def reset(self):
        self.greenhouse = Greenhouse(self.seed)
        if self.hot_vent:
            _hot_vent_greenhouses.add(self.greenhouse)
        self.should_stop = False
        self.day = 0

    def run(self):
        while not self.should_stop:
            alive = self.greenhouse.alive()
            if self.log is not None:
                self.log(day_line(self.day, alive, len(self.greenhouse.pots)))
            self.greenhouse.update_day()
            self.day += 1
            if alive == 0:
                self.should_stop = True

    def stop(self):
        self.should_stop = True

    def info(self):
        return {"day": self.day}


def alive_fraction(g):
    return g.alive() / len(g.pots)


def obs_from_greenhouse(g):
    t = (g.temp - 15) / 20
    h = g.humidity
    n = min(len(g.pots), 1000) / 1000
    # humidity is uncapped in the model and may exceed 1
    return clamp(OBSERVATION_SPACE, [t, h, n, alive_fraction(g)])


def action_to_water(action):
    w = float(np.asarray(action, dtype=float).reshape(-1)[0])
    return min(max(0, w * 1000), 1000)


class EpisodeRewardState:
    def __init__(self):
        self.last_water_use = 0


def reward_from_greenhouse(state, g):
    """Alive fraction minus water poured since the previous call, in m3."""
    water_cost = (g.water_use - state.last_water_use) / 1000
    state.last_water_use = g.water_use
    return alive_fraction(g) - water_cost


def greenhouse_reward():
    """Fresh per-episode reward function."""
    return functools.partial(reward_from_greenhouse, EpisodeRewardState())


def new_air_exchange(g):
    """Faster air replacement with higher temperatures."""
    factor = (g.temp - 15) / 20
    g.humidity += factor * (g.outside_humidity - g.humidity)


def _hot_vent_air_exchange(g):
    if g in _hot_vent_greenhouses:
        return new_air_exchange(g)
    return default_registry.original(AIR_EXCHANGE)(g)


Greenhouse.choose_water_amount = make_step(
    observation_space=OBSERVATION_SPACE,
    observation_space_mapping=obs_from_greenhouse,
    action_space=ACTION_SPACE,
    action_space_mapping=action_to_water,
    reward_mapping_factory=greenhouse_reward,
    name=DECISION_POINT,
)(Greenhouse.choose_water_amount)

Greenhouse.update_air_exchange = expose_to_plugins(
    Greenhouse.update_air_exchange, name=AIR_EXCHANGE
)
attach_handler(_hot_vent_air_exchange, AIR_EXCHANGE, "instead")


def register_greenhouse_envs(registry=None):
    registry = registry if registry is not None else default_envs
    registry.register(ENV_ID, generate_env(GreenhouseSim, DECISION_POINT))
    registry.register(
        HOT_VENT_ENV_ID,
        generate_env(functools.partial(GreenhouseSim, hot_vent=True), DECISION_POINT),
    )


register_greenhouse_envs()
