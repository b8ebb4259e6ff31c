"""Independent straight-line re-simulations used to freeze expected values.

Nothing in here imports ``simenv``. Each function re-derives the greenhouse
arithmetic from scratch so that the package code is checked against a
separate route.
"""
from __future__ import annotations

import random


def uniform_collapse_day(max_days=1000):
    """Day index on which the run loop first counts zero live plants.

    Every plant starts identical (water 2, health 0.5, need 0.25 L/day), the
    temperature never moves from 20 and 200 L are poured every day, so one
    representative plant stands in for all 200.
    """
    temp, humidity = 20, 0.6
    water, health = 2.0, 0.5
    pots = 200
    for day in range(max_days):
        if health <= 0:
            return day
        # evaporation
        f = temp / 100 * (1 - humidity)
        evaporated = 0.0
        for _ in range(pots):
            evaporated += f * water
        water = max(0, water - f * water)
        humidity = (humidity * 0.20 + evaporated / 2400) / 0.20
        # ventilation
        humidity = 0.8 * humidity + 0.2 * 0.6
        # plant day
        water = max(0, water - 0.25)
        if health != 0:
            if water <= 0 or water > 3:
                health = max(0, health - 0.25)
            else:
                health = min(1, health + 0.1)
        # watering
        water += 200 / pots
    raise AssertionError("no collapse within max_days")


def single_humidity_step(temp=20, humidity=0.6, pots=200, water=2.0):
    f = temp / 100 * (1 - humidity)
    evaporated = 0.0
    for _ in range(pots):
        evaporated += f * water
    new_water = max(0, water - f * water)
    new_humidity = (humidity * 0.20 + evaporated / 2400) / 0.20
    return new_humidity, new_water


def humidity_divergence_day(seed, litres=200.0, max_days=50):
    """First day whose humidity differs between fixed and temperature-driven venting.

    Rebuilds the seeded greenhouse twice from a Mersenne Twister stream in
    the same draw order (per plant: health then need; per day: one
    temperature draw first) and returns the first day index ``d`` at which
    the humidity seen at the watering decision differs.
    """
    def build(rng):
        plants = []
        for _ in range(200):
            health = rng.random() * 0.8 + 0.1
            need = 0.3 * rng.random() + 0.1
            plants.append([2.0, health, need])
        return plants

    rngs = [random.Random(seed), random.Random(seed)]
    worlds = []
    for rng in rngs:
        worlds.append({"temp": 20, "hum": 0.6, "plants": build(rng)})

    for day in range(max_days):
        seen = []
        for k, (rng, w) in enumerate(zip(rngs, worlds)):
            w["temp"] = min(35, max(15, w["temp"] + int(rng.random() * 5) - 2))
            f = w["temp"] / 100 * (1 - w["hum"])
            ev = 0.0
            for p in w["plants"]:
                ev += f * p[0]
                p[0] = max(0, p[0] - f * p[0])
            w["hum"] = (w["hum"] * 0.20 + ev / 2400) / 0.20
            if k == 0:
                w["hum"] = 0.8 * w["hum"] + 0.2 * 0.6
            else:
                factor = (w["temp"] - 15) / 20
                w["hum"] += factor * (0.6 - w["hum"])
            for p in w["plants"]:
                p[0] = max(0, p[0] - p[2])
                if p[1] != 0:
                    if p[0] <= 0 or p[0] > 3:
                        p[1] = max(0, p[1] - 0.25)
                    else:
                        p[1] = min(1, p[1] + 0.1)
            seen.append(w["hum"])
            for p in w["plants"]:
                p[0] += litres / 200
        if seen[0] != seen[1]:
            return day
    return None


def scripted_days(draws, days, litres=200):
    """Re-simulate ``days`` days consuming uniform ``draws`` in model order.

    Returns one ``(temp, humidity, waters, healths, water_use)`` tuple per
    day, taken after that day's watering.
    """
    it = iter(draws)
    plants = []
    for _ in range(200):
        health = next(it) * 0.8 + 0.1
        need = 0.3 * next(it) + 0.1
        plants.append({"water": 2, "health": health, "need": need})
    temp, hum, used = 20, 0.6, 0
    out = []
    for _ in range(days):
        step = int(next(it) * 5) - 2
        temp = temp + step
        if temp > 35:
            temp = 35
        if temp < 15:
            temp = 15
        f = temp / 100 * (1 - hum)
        ev = 0
        for p in plants:
            ev += f * p["water"]
            p["water"] = max(0, p["water"] - f * p["water"])
        hum = (hum * 0.20 + ev / 2400) / 0.20
        hum = 0.8 * hum + 0.2 * 0.6
        for p in plants:
            p["water"] = max(0, p["water"] - p["need"])
            if p["health"] != 0:
                if p["water"] <= 0 or p["water"] > 3:
                    p["health"] = max(0, p["health"] - 0.25)
                else:
                    p["health"] = min(1, p["health"] + 0.1)
        for p in plants:
            p["water"] += litres / 200
        used += litres
        out.append((temp, hum, [p["water"] for p in plants],
                    [p["health"] for p in plants], used))
    return out


if __name__ == "__main__":
    print("collapse day:", uniform_collapse_day())
    print("humidity step:", single_humidity_step())
    print("divergence days:", [humidity_divergence_day(s) for s in range(1, 21)])
