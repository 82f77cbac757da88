"""
Comparing platforms and placing a workload
==========================================

The bundled tables hold measured latency and energy for seven platforms.
``report`` summarises them; ``plan_partition`` walks the placement flow
for a concrete workload and records each decision.
"""

from mcfpga import devicelab, load_tasks

table = devicelab.load_measurements()
print(devicelab.report(table).to_text())

catalogue = load_tasks()

# latency first: a GPU wins, so no FPGA is brought in
fast = devicelab.WorkloadSpec(((catalogue["he-eu"], 1),), objective="min-latency")
print(devicelab.plan_partition(fast, table).to_text())

# energy first, with two tasks and the work split across every candidate
frugal = devicelab.WorkloadSpec(
    ((catalogue["he-ba"], 2), (catalogue["bl-as"], 1)),
    objective="min-energy",
    devices=("P385-D5", "Max3", "K4000"),
    split=True,
)
plan = devicelab.plan_partition(frugal, table)
print(plan.to_text())
