"""
The greenhouse domain model on its own
======================================

The model knows nothing about reinforcement learning. Its watering rule
pours 200 litres a day over 200 pots, which slowly drowns them.
"""

from simenv.greenhouse import Greenhouse

g = Greenhouse(seed_val=1)
for day in range(12):
    alive = g.alive()
    print(f"day {day} alive: {alive}, dead: {len(g.pots) - alive}"
          f"   temp {g.temp} C, humidity {g.humidity:.3f}")
    g.update_day()

# Plant water creeps above the 3 litre damage threshold
waters = sorted(p.water for p in g.pots)
print(f"pot water after 12 days: min {waters[0]:.2f} L, max {waters[-1]:.2f} L")

# The same seed always gives the same greenhouse
a, b = Greenhouse(seed_val=5), Greenhouse(seed_val=5)
print("same plants for same seed:",
      [p.health for p in a.pots] == [p.health for p in b.pots])
