"""
Using the generated greenhouse environment
==========================================

Importing ``simenv.greenhouse_env`` turns ``Greenhouse.choose_water_amount``
into a decision point and registers two environments. From here on the
greenhouse looks like any other Gym-style environment.
"""

import numpy as np

import simenv.greenhouse_env  # noqa: F401  registers the env ids
from simenv import make

env = make("Greenhouse-v0")
env.seed(0)

rng = np.random.default_rng(1)


def rand_policy(obs):
    return env.action_space.sample(rng)


# The simulation prints its day lines from inside reset() and step()
obs0 = env.reset()
obs1, rew1, done, info = env.step(rand_policy(obs0))
obs2, rew2, done, info = env.step(rand_policy(obs1))
print("observation [temp, humidity, pots, alive]:", np.round(obs2, 3))
print("reward:", round(rew2, 3), "info:", info)

# A careful gardener: pour a little less than the plants need
obs, done, total = env.reset(), False, 0.0
env.simulation.log = None
while not done and env.steps < 60:
    obs, reward, done, info = env.step(np.array([0.045]))
    total += reward
print(f"careful policy: {env.steps} days, {obs[3]:.0%} alive, return {total:.2f}")
env.close()

# Same seed and policy, with the temperature-driven ventilation plugin
for env_id in ("Greenhouse-v0", "GreenhouseHotVent-v0"):
    e = make(env_id)
    e.simulation.log = None
    e.seed(3)
    e.reset()
    hums = []
    for _ in range(4):
        obs, *_ = e.step(np.array([0.2]))
        hums.append(round(float(obs[1]), 3))
    e.close()
    print(f"{env_id:22s} humidity over four days: {hums}")
