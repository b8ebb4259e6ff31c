"""
Bringing your own model
=======================

A minimal model with a yes/no decision. The simulation runner implements
``SimulationInterface`` and the decision is turned into an environment with
``make_step``, all from outside the model class.
"""

import random

import numpy as np

from simenv import Box, Discrete, SimulationInterface, generate_env, make_step, register, make


class Walker:
    """Domain model: wanders on a line."""

    def __init__(self, rng):
        self.rng = rng
        self.position = 0

    def should_go_left(self):
        # Hard-wired behaviour used whenever no environment is driving
        return self.rng.choice([True, False])


class WalkSimulation(SimulationInterface):
    def __init__(self):
        self.seed = None
        self.walker = None
        self.should_stop = False

    def reset(self):
        self.walker = Walker(random.Random(self.seed))
        self.should_stop = False

    def run(self):
        while not self.should_stop:
            self.walker.position += -1 if self.walker.should_go_left() else 1
            if abs(self.walker.position) >= 4:
                self.should_stop = True

    def stop(self):
        self.should_stop = True


Walker.should_go_left = make_step(
    observation_space=Box(low=[-4], high=[4]),
    observation_space_mapping=lambda w: np.array([float(w.position)]),
    action_space=Discrete(2),
    action_space_mapping={0: True, 1: False},
    reward_mapping=lambda w: 1.0 if w.position > 0 else 0.0,
    name="demo.Walker.should_go_left",
)(Walker.should_go_left)

register("Walk-v0", generate_env(WalkSimulation, "demo.Walker.should_go_left"))

# Without an environment the model still runs its own rule
sim = WalkSimulation()
sim.reset()
sim.run()
print("standalone walk ended at", sim.walker.position)

# With one, the agent chooses; action 1 maps to "go right"
env = make("Walk-v0")
obs, done = env.reset(), False
while not done:
    obs, reward, done, info = env.step(1)
    print("position", obs[0], "reward", reward, "done", done)
env.close()
