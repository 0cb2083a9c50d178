# %% [markdown]
# # Geometric basket calls: MC against QMC
#
# A geometric-average basket on independent lognormal assets has a closed
# form, which makes it a clean test bed for measuring pricing error.

# %%
import tempfile
from pathlib import Path

from qmcpricing.bench import BasketExperimentConfig, run_basket_experiment, write_report
from qmcpricing.lds import ScrambleSpec, faure_points, sobol_points
from qmcpricing.pricing import OptionSpec, estimate_price, geo_basket_closed_form, mc_points
from qmcpricing.stochastic import MarketModel

# %% [markdown]
# One option, five assets with volatility 0.41, one year, strike 100.

# %%
model = MarketModel(100.0, 0.05, (0.41,) * 5)
spec = OptionSpec("geometric-basket-call", 100.0, 1.0)
truth = geo_basket_closed_form(model, spec)
print(f"closed form {truth:.6f}")

for n in (2 ** 10, 2 ** 14):
    mc = estimate_price(mc_points(n, 5, seed=3), model, spec)
    qmc = estimate_price(sobol_points(n, 5), model, spec)
    rqmc = estimate_price(sobol_points(n, 5, scramble=ScrambleSpec("owen", 3)), model, spec)
    print(f"n={n:>6}  mc {mc.value - truth:+.5f} (se {mc.stderr:.5f})  "
          f"sobol {qmc.value - truth:+.5f}  owen-sobol {rqmc.value - truth:+.5f} (se {rqmc.stderr:.5f})")

print("faure 5^5:", estimate_price(faure_points(5 ** 5, 5), model, spec).value - truth)

# %% [markdown]
# A reduced version of the full 500-option study: fewer options and smaller
# sample sizes, so it finishes in seconds. The full run is
# `qmcbench experiment basket --config cfg.json --out DIR` with an empty `{}`
# config.

# %%
config = BasketExperimentConfig(maturities=(0.5, 1.0), strikes=(95.0, 100.0, 103.0),
                                sobol_grid=(256, 1024, 4096), rqmc_grid=(256, 1024, 4096),
                                mc_grid=(256, 1024, 4096), faure_grid=(125, 625, 3125),
                                mc_ref_n=4096, mc_replications=30, rqmc_replications=5)
report = run_basket_experiment(config)
for method, fit in sorted(report.fits.items()):
    print(f"{method:<11} slope {fit.slope:+.2f}")

out = Path(tempfile.mkdtemp())
write_report(report, out / "rmse.csv", out / "rmse.svg", title="basket RMSE")
print((out / "rmse.csv").read_text())
