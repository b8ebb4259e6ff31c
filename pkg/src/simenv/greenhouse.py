"""Greenhouse watering model.

A deliberately small domain model: 200 potted plants, a temperature that
random-walks between 15 and 35 degrees C, evaporation into the greenhouse air,
a fixed 20% daily air exchange and a watering decision that overwaters by
default. Nothing in here knows about environments or plugins.

Randomness comes from a per-instance ``random.Random`` (Mersenne Twister),
whose stream is identical across platforms for a given integer seed. Draw
order is fixed: each plant draws its health then its water requirement, in
pot order, and every day draws one temperature step before anything else.
"""
from __future__ import annotations

import random

POTS = 200
MAX_SATURATION = 0.20  # kg/m3


class Greenhouse:
    def __init__(self, seed_val=None, rng=None):
        self.rng = rng if rng is not None else random.Random(seed_val)
        self.pots = [Plant(self) for _ in range(POTS)]
        self.water_use = 0
        self.temp = 20  # degrees C
        self.humidity = 0.6  # relative, not capped at 1
        self.outside_humidity = 0.6
        self.size = 2400  # m3

    def alive(self):
        return sum(p.health > 0 for p in self.pots)

    def update_humidity(self):
        evaporation_factor = self.temp / 100 * (1 - self.humidity)
        evaporated = 0
        for plant in self.pots:
            evaporated += evaporation_factor * plant.water
            plant.water = max(0, plant.water - evaporation_factor * plant.water)
        saturation = self.humidity * MAX_SATURATION + evaporated / self.size
        self.humidity = saturation / MAX_SATURATION

    def update_air_exchange(self):
        self.humidity = 0.8 * self.humidity + 0.2 * self.outside_humidity

    def choose_water_amount(self):
        return 200

    def water_plants(self):
        if not self.pots:
            raise ValueError("cannot water a greenhouse without pots")
        water_amount = self.choose_water_amount()
        for plant in self.pots:
            plant.water += water_amount / len(self.pots)
        self.water_use += water_amount

    def update_day(self):
        self.temp = min(35, max(15, self.temp + int(self.rng.random() * 5) - 2))
        self.update_humidity()
        self.update_air_exchange()
        for plant in self.pots:
            plant.update_day()
        self.water_plants()


class Plant:
    def __init__(self, greenhouse):
        self.greenhouse = greenhouse
        self.water = 2  # litres in pot
        self.health = greenhouse.rng.random() * 0.8 + 0.1
        self.req_water = 0.3 * greenhouse.rng.random() + 0.1

    def update_health(self):
        if self.health == 0:
            return
        if self.water <= 0 or self.water > 3:
            self.health = max(0, self.health - 0.25)
        else:
            self.health = min(1, self.health + 0.1)

    def update_day(self):
        self.water = max(0, self.water - self.req_water)
        self.update_health()
