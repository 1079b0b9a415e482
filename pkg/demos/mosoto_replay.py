"""Walk through composition repair on the Box + Facebook mashup.

Facebook's API is split into Ads, Atlas, Graph and Marketing. Facebook
itself is considered gone once the last of them appears; later Ads and
Atlas are retired on the same day. The mashup's composition should follow
along.

    python3 demos/mosoto_replay.py
"""
from ecolife.correction import apply_corrections
from ecolife.dates import iso
from ecolife.fixtures import mosoto_fixture
from ecolife.networks import build_ma

ds, verdicts, fit = mosoto_fixture()
cd = apply_corrections(ds, verdicts, fit, seed=0)

print("API lifecycles")
for aid in sorted(ds.apis):
    lc = cd.lifecycles[aid]
    print(f"  {aid:<26} {iso(lc.start)} .. {iso(lc.end) or 'alive':<10}  {lc.provenance}")

print("\nMosoto composition over time")
for seg in cd.timelines["/mashup/mosoto"].segments:
    names = ", ".join(sorted(a.rsplit("/", 1)[-1] for a in seg.api_ids))
    print(f"  from {iso(seg.start)} to {iso(seg.end) or 'now':<10}  {{{names}}}")

print("\nM-A edges")
for e in build_ma(cd).edges:
    print(f"  {e.api_id:<26} [{iso(e.start)}, {iso(e.end) or 'open'})")
