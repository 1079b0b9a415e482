"""Yearly A-A and C-C snapshots of the corrected bundled ecosystem.

Prints degree-distribution fits, category diversity, connected components
and the most used API pairs with their survival rates.

    python3 demos/network_evolution.py [n_boot]
"""
import sys

from ecolife.analysis import (
    rq2_power_law, rq3_diversity, rq4_components, rq5_pair_survival, survival_curve,
)
from ecolife.correction import apply_corrections, fit_normal_mle
from ecolife.dataset import deathpool_window, parse_dataset
from ecolife.dates import iso
from ecolife.fixtures import load_bundled
from ecolife.liveness import FixtureProber, FixtureStore, classify_all, load_successor_table
from ecolife.networks import build_ma, snapshot_series

n_boot = int(sys.argv[1]) if len(sys.argv) > 1 else 200
dataset, store, _ = load_bundled()
ds = parse_dataset(dataset)
verdicts = classify_all(ds, FixtureProber(FixtureStore(store)), load_successor_table())
cd = apply_corrections(ds, verdicts, fit_normal_mle(deathpool_window(ds, kind="all")), seed=0)

series = snapshot_series(build_ma(cd), "yearly", ("2006-01-01", "2020-09-10"))
fits = rq2_power_law(series, n_boot=n_boot, seed=0)
diversity, _ = rq3_diversity(series)

print("year  nodes  edges  alpha  xmin      p  categories  components  >4  largest")
for (t, aa, _), f, (_, div) in zip(series, fits, diversity.points):
    comp = rq4_components(aa)
    alpha = f"{f.alpha:5.2f}" if f.alpha is not None else "    -"
    p = f"{f.p_value:6.3f}" if f.p_value is not None else "     -"
    print(f"{iso(t)[:4]}  {len(aa.non_isolated()):>5}  {len(aa.edges):>5}  {alpha}  "
          f"{f.xmin or '-':>4}  {p}  {div:>10}  {comp.component_count:>10}  "
          f"{comp.count_size_gt_4:>2}  {comp.largest_component_size:>7}")

pairs = rq5_pair_survival(cd)
print("\nmost used pairs")
for s in pairs[:5]:
    print(f"  {s.api_a} + {s.api_b}: {s.active_use}/{s.total_use} alive "
          f"({s.survival_rate:.2f}), mean life {s.avg_days:.0f} days")
print("\nsurvival rate by use count")
for lo, hi, n, rate in survival_curve(pairs):
    print(f"  [{lo:>3}, {hi:>3})  {n:>4} pairs  {rate:.2f}")
