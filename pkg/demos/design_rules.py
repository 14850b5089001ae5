"""
Design numbers for the built-in waveguide platforms
====================================================

For each platform: the collective loss rate, the shortest device that pushes
the pump to 10% of the pair level, the pump rejection there, and the pair
rate at a chosen input power.
"""

from pairgen.design import builtin_platforms, design

powers = {"fused_silica": 180.0, "IG2": 2e-4, "silicon": 5e-6, "InP": 1e-3}
for plat in builtin_platforms():
    rep = design(plat, powers[plat.name], 0.1)
    print(f"\n{plat.name}: Gamma = {rep.Gamma:.0f} /m, L_min = {rep.L_min * 100:.2f} cm, "
          f"feasible: {rep.feasible}")
    print(f"  rejection at L_min {rep.rejection_db_at_L_min:.0f} dB")
    print(f"  pair rate at {powers[plat.name]:g} W: {rep.pair_rate:.3g} /s "
          f"(lossless {rep.pair_rate_lossless:.3g} /s); 1 kHz needs {rep.power_for_1khz:.3g} W")
    for note in rep.notes:
        print("  note:", note)
