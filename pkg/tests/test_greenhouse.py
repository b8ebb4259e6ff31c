import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from simenv.greenhouse import Greenhouse, Plant


class ScriptedRandom:
    """Stand-in for random.Random that replays a fixed list of draws."""

    def __init__(self, draws):
        self._draws = iter(draws)

    def random(self):
        return next(self._draws)


class ConstantRandom:
    def __init__(self, value):
        self.value = value

    def random(self):
        return self.value


def plant(water, health, req=0.25):
    p = Plant(Greenhouse(rng=ConstantRandom(0.5)))
    p.water, p.health, p.req_water = water, health, req
    return p


def test_initial_state():
    g = Greenhouse(seed_val=3)
    assert len(g.pots) == 200
    assert (g.temp, g.humidity, g.outside_humidity, g.size, g.water_use) == (20, 0.6, 0.6, 2400, 0)
    for p in g.pots:
        assert p.water == 2.0
        assert 0.1 <= p.health <= 0.9
        assert 0.1 <= p.req_water <= 0.4


def test_same_seed_same_plants():
    a, b = Greenhouse(seed_val=42), Greenhouse(seed_val=42)
    assert [(p.health, p.req_water) for p in a.pots] == [(p.health, p.req_water) for p in b.pots]


def test_plant_draw_order_is_health_then_requirement():
    rng = random.Random(8)
    g = Greenhouse(seed_val=8)
    expected = []
    for _ in range(200):
        expected.append((rng.random() * 0.8 + 0.1, 0.3 * rng.random() + 0.1))
    assert [(p.health, p.req_water) for p in g.pots] == expected


def test_update_humidity_single_step():
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.update_humidity()
    assert g.humidity == pytest.approx(0.6666667, abs=1e-7)
    hum, water = oracles.single_humidity_step()
    assert g.humidity == pytest.approx(hum, abs=1e-9)
    for p in g.pots:
        assert p.water == pytest.approx(1.84, abs=1e-9)


def test_update_humidity_saturated_air():
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.humidity = 1
    g.update_humidity()
    assert g.humidity == 1
    assert all(p.water == 2 for p in g.pots)


def test_update_humidity_dry_pots():
    g = Greenhouse(rng=ConstantRandom(0.5))
    for p in g.pots:
        p.water = 0
    g.update_humidity()
    assert g.humidity == pytest.approx(0.6, abs=1e-15)


@pytest.mark.parametrize("before, after", [(0.5, 0.52), (0.6, 0.6), (1.0, 0.92)])
def test_update_air_exchange(before, after):
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.humidity = before
    g.update_air_exchange()
    assert g.humidity == pytest.approx(after, abs=1e-12)


def test_choose_water_amount_fallback():
    assert Greenhouse(seed_val=1).choose_water_amount() == 200


@pytest.mark.parametrize("litres, per_pot", [(200, 1.0), (0, 0.0), (1000, 5.0)])
def test_water_plants(litres, per_pot):
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.choose_water_amount = lambda: litres
    g.water_plants()
    assert all(p.water == 2 + per_pot for p in g.pots)
    assert g.water_use == litres


def test_water_plants_without_pots():
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.pots = []
    with pytest.raises(ValueError):
        g.water_plants()


@pytest.mark.parametrize("start, draw, expected", [(35, 0.99, 35), (15, 0.0, 15), (20, 0.99, 22), (20, 0.0, 18)])
def test_temperature_walk_is_clamped(start, draw, expected):
    g = Greenhouse(rng=ConstantRandom(0.5))
    g.rng = ConstantRandom(draw)
    g.temp = start
    g.update_day()
    assert g.temp == expected


@pytest.mark.parametrize(
    "water, req, expected", [(0.2, 0.3, 0), (2.0, 0.25, 1.75)],
)
def test_plant_update_day_water(water, req, expected):
    p = plant(water, 0.5, req)
    p.update_day()
    assert p.water == expected


def test_dead_plant_still_dries_out():
    p = plant(2.0, 0)
    p.update_day()
    assert p.water == 1.75 and p.health == 0


@pytest.mark.parametrize(
    "water, health, expected",
    [
        (3.5, 0.3, 0.05),
        (2.0, 0.95, 1.0),
        (0.0, 0.1, 0.0),
        (0.0, 0.6, 0.35),
        (3.0, 0.5, 0.6),  # 3 exactly is still fine
        (3.0 + 1e-12, 0.5, 0.25),
    ],
)
def test_plant_health_thresholds(water, health, expected):
    p = plant(water, health)
    p.update_health()
    assert p.health == pytest.approx(expected, abs=1e-12)


def test_death_is_absorbing():
    p = plant(0.0, 0.1)
    p.update_health()
    assert p.health == 0
    p.water = 2.0
    for _ in range(5):
        p.update_health()
    assert p.health == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_update_day_matches_scripted_oracle(seed):
    days = 12
    draws = [random.Random(seed).random() for _ in range(400 + days)]
    g = Greenhouse(rng=ScriptedRandom(draws))
    expected = oracles.scripted_days(draws, days)
    for temp, hum, waters, healths, used in expected:
        g.update_day()
        assert g.temp == temp
        assert g.humidity == hum
        assert [p.water for p in g.pots] == waters
        assert [p.health for p in g.pots] == healths
        assert g.water_use == used


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 40))
def test_model_invariants(seed, days):
    g = Greenhouse(seed_val=seed)
    dead = set()
    used = []
    for _ in range(days):
        g.update_day()
        assert 15 <= g.temp <= 35
        assert g.humidity >= 0
        for i, p in enumerate(g.pots):
            assert p.water >= 0
            assert 0 <= p.health <= 1
            if i in dead:
                assert p.health == 0
            if p.health == 0:
                dead.add(i)
        used.append(g.water_use)
    assert used == [200 * (k + 1) for k in range(days)]
