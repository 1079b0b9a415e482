"""Correct the bundled ecosystem's lifecycles and compare the three death scenarios.

Steps: probe every entity against the offline fixture store, fit a normal
distribution to the trusted deathpool longevities, compare it with the
independent reference sample, sample death times, and count active APIs
per year under each scenario.

    python3 demos/lifecycle_correction.py [seed]
"""
import sys

from ecolife.analysis import SCENARIOS, rq1_counts
from ecolife.correction import apply_corrections, fit_normal_mle, z_test
from ecolife.dataset import deathpool_window, parse_dataset, validate
from ecolife.dates import iso
from ecolife.fixtures import load_bundled
from ecolife.liveness import (
    FixtureProber, FixtureStore, classify_all, load_successor_table, verdict_counts,
)

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
dataset, store, reference = load_bundled()
ds = parse_dataset(dataset)
print(f"{ds.counts[0]} APIs, {ds.counts[1]} mashups; flags {validate(ds).counts}")

verdicts = classify_all(ds, FixtureProber(FixtureStore(store)), load_successor_table())
for (kind, verdict), n in sorted(verdict_counts(verdicts).items()):
    print(f"  {kind:<7} {verdict:<12} {n}")

fit = fit_normal_mle(deathpool_window(ds, kind="all"))
ref = fit_normal_mle(reference)
zt = z_test(fit, ref)
print(f"\ndeathpool fit   mu={fit.mu_hat:7.1f}  sigma={fit.sigma_hat:6.1f}  n={fit.n}")
print(f"reference fit   mu={ref.mu_hat:7.1f}  sigma={ref.sigma_hat:6.1f}  n={ref.n}")
print(f"z = {zt.z:.3f} ({zt.band})")

cd = apply_corrections(ds, verdicts, fit, seed=seed)
series = {s: rq1_counts(cd, "yearly", s)["api"] for s in SCENARIOS}
print("\nactive APIs on January 1st")
print("  year  " + "  ".join(f"{s:>9}" for s in SCENARIOS))
for i, (t, _) in enumerate(series["corrected"].points):
    row = "  ".join(f"{int(series[s].values[i]):>9}" for s in SCENARIOS)
    print(f"  {iso(t)[:4]}  {row}")
