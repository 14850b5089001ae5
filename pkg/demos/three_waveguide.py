"""
Collective loss from a lossy central waveguide
===============================================

Two guides couple at rate g to a third guide that loses photons at gamma3.
For gamma3 >> g the central mode can be eliminated and the symmetric mode
decays at 8 g^2 / gamma3.  Here 8 g^2 / gamma3 is held at 20 while the ratio
gamma3 / g grows, and the fitted pump decay approaches the eliminated value.
"""

import numpy as np

from pairgen.analytic import PairGenParams
from pairgen.design import pump_decay_rate_exact
from pairgen.lindblad import evolve
from pairgen.scenarios import build_three_waveguide, fit_decay_rate

G = 20.0
params = PairGenParams(U=0.0, gamma=0.0, Gamma=G, alpha0_sq=1.0)
t = np.linspace(0, 6 / G, 61)
for ratio in (4, 8, 16, 32):
    g = G * ratio / 8
    built = build_three_waveguide(g, ratio * g, params, (6, 6, 3))
    s = evolve(built.model, built.initial, t, built.observables, rtol=1e-9, atol=1e-12)
    rate = fit_decay_rate(t, s["n_plus"], (2 / (ratio * g), 6 / G))
    print(f"gamma3/g = {ratio:2d}: fitted {rate:6.2f}, slowest linear mode "
          f"{pump_decay_rate_exact(g, ratio * g):6.2f}, eliminated {G:.0f}, "
          f"peak n3 {s['n3'].max():.2e}")
