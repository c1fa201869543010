#!/usr/bin/env python3
"""One full protocol exchange over a hexagonal cell.

Builds a 6-tower cell, broadcasts a ranging request from a mobile inside
it, and prints the resulting calibration-style measurement table plus the
trilaterated fix next to the true position.
"""

from gsmloc import (
    Point3,
    ScenarioConfig,
    TimingModel,
    first_k_acks,
    hex_cell_layout,
    percent_error,
    run_scenario,
)
from gsmloc.geometry import distance

CELL_RADIUS = 3000.0  # meters
MOBILE = Point3(420.0, -260.0, 0.0)

towers = tuple(hex_cell_layout(Point3(0, 0, 0), CELL_RADIUS, n_rings=1))
config = ScenarioConfig(
    towers=towers,
    mobile_true_position=MOBILE,
    timing=TimingModel(),  # round-trip mode, ideal clock
    rng_seed=1,
)

trace, first_three, fix = run_scenario(config)
all_measurements = first_k_acks(trace, len(towers))

print(f"hex cell: {len(towers)} towers, ring radius {CELL_RADIUS:.0f} m")
print(f"true mobile position: ({MOBILE.x:.2f}, {MOBILE.y:.2f}, {MOBILE.z:.2f})")
print()
print(f"{'tower':>5} {'turnaround (s)':>16} {'calculated (m)':>15} {'actual (m)':>12} {'%error':>8}")
for m in all_measurements:
    actual = distance(MOBILE, m.tower.position)
    err = percent_error(actual, m.range_m)
    print(f"{m.tower.id:>5} {m.turnaround:>16.9e} {m.range_m:>15.3f} {actual:>12.3f} {err:>8.2f}")

print()
print("fix from the first three acks:")
p = fix.position
print(f"  position  ({p.x:.6f}, {p.y:.6f}, {p.z:.6f})")
print(f"  method    {fix.method}, z branch {fix.z_branch}")
print(f"  residuals {[f'{r:.2e}' for r in fix.residuals]}")
print(f"  error vs truth: {distance(p, MOBILE):.3e} m")
