"""Asian-call lower bounds under jump models via damped Fourier inversion."""
import numpy as np

from asianbounds import montecarlo
from asianbounds.levy_asian import DampingParams, density_avg, lb_levy, optimal_z
from asianbounds.models import NIG, VG, DiscreteMeasure, LevySpec, Merton

mu = DiscreteMeasure.equally_spaced(1.0, 10)
models = {
    "VG": LevySpec(VG(0.2, 0.05, -0.1), r=0.05),
    "NIG": LevySpec(NIG(15.0, -5.0, 0.5), r=0.05),
    "Merton": LevySpec(Merton(0.15, 0.5, -0.1, 0.15), r=0.05),
}

# density of the log-average, straight from the joint characteristic function
z = np.linspace(-0.5, 0.5, 5)
print("VG density of <Z, mu>:", np.round(density_avg(models["VG"], mu, z), 4))

# the threshold solves a first-order condition between two inverted densities
print("VG optimal threshold:", optimal_z(models["VG"], mu, 100.0))

for name, model in models.items():
    res = lb_levy(model, mu, 100.0, cross_check=True)
    mc = montecarlo.mc_asian(model, mu, 100.0, 200_000, seed=3)
    print(f"{name}: LB {res.value:.5f} (real-space route {res.diag['psi_route']:.5f})"
          f"  MC {mc.mean:.4f} +- {mc.se:.4f}")

# moving the damping inside the strip should leave the value alone
alt = lb_levy(models["VG"], mu, 100.0, damping=DampingParams(1.5, -1.75, -0.5)).value
print("VG with other damping:", alt)
