"""
Pricing a European call and watching it converge
================================================

A GBM call has a closed-form price, so it is the natural first check of
the simulator.  The standard error should shrink like 1/sqrt(N).
"""

from mcfpga import OptionTask, PayoffSpec, GbmParams, bs_closed_form, run

model = GbmParams(s0=100.0, sigma=0.2, r=0.05)
call = PayoffSpec("european-call", strike=100.0)
exact = bs_closed_form(model, 100.0, 1.0)
print(f"closed form: {exact:.6f}")

# GBM steps are exact, so a handful of time steps is enough here
for n in (1_000, 10_000, 100_000, 1_000_000):
    task = OptionTask("call", model, call, maturity=1.0, paths=n, steps=8)
    res = run(task, seed=2024)
    z = (res.price - exact) / res.stderr
    print(f"N={n:>9,d}  price {res.price:.5f}  stderr {res.stderr:.5f}  z={z:+.2f}")
