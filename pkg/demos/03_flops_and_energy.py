"""
Counting work and integrating power
===================================

FLOPs come from a static per-step operation count.  Energy comes from a
polled power trace.  Their ratio is the efficiency metric used to compare
platforms.
"""

import numpy as np

from mcfpga import load_tasks, metrics

catalogue = load_tasks()
for name in ("he-eu", "he-ba", "he-do", "he-di", "bl-as"):
    t = catalogue[name]
    print(f"{name}: {metrics.flops_per_sim(t):>8,d} FLOP/simulation at {t.steps} steps")

# the barrier checks cost one compare per step each; the digital payout one select
heavier = metrics.OpCostTable(exp=20, icdf=40)
print("with slower transcendentals:", metrics.flops_per_sim(catalogue["he-eu"], heavier))

# a synthetic 20 s run: idle, a ramp up, busy with noise, then back down
t = np.linspace(0, 20, 201)
watts = 69 + 20 * np.clip(t / 2, 0, 1) * (t < 18) + np.random.default_rng(0).normal(0, 0.5, t.size)
trace = [metrics.PowerSample(float(a), float(w)) for a, w in zip(t, watts)]
energy = metrics.integrate_power(trace)
print(f"{energy.joules:.1f} J over {energy.duration:.0f} s, mean {energy.mean_watts:.1f} W")

work = metrics.flops_per_sim(catalogue["he-eu"]) * 1e7
print(f"efficiency: {metrics.efficiency(work, energy.joules):.3e} FLOP/J")
