"""Lower and upper bounds for Asian, VWAP and basket-spread options.

The lower bounds condition on a tractable proxy of the average; the upper
bounds shift the payoff by a multiple of the proxy's deviation.  A seeded Monte
Carlo engine serves as the reference price.
"""

from .basket import lau_lo_price, lb_basket, mc_basket
from .bounds_core import gaussian_exp_indicator, maximize_lb, minimize_ub
from .errors import PricingError, ValidationError
from .gaussian_asian import GaussianAsianScenario, delta_fd, lb_cmo, lb_dmo, ub_dmo
from .levy_asian import DampingParams, FourierGrid, delta_levy, lb_levy, optimal_z, ub_levy
from .models import (BM, NIG, VG, BasketSpec, BoundResult, ContinuousUniform, DiscreteMeasure,
                     GammaVolumeSpec, GbmSpec, LevySpec, Merton)
from .montecarlo import MCEstimate, mc_asian
from .vwap import VwapScenario, lb_vwap, mc_vwap

__version__ = "0.1.0"
