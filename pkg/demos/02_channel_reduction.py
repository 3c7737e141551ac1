"""Channel reduction: how many relay antennas actually matter.

Every multihop channel is tradeoff-equivalent to a unique minimal form,
and extra antennas beyond a computable per-layer count contribute
nothing but amplified noise.
"""

from relaydmt import analyze, dmt_rp, equivalent, practical_vertical_reduction

for counts in [(1, 4, 1), (3, 1, 4, 2), (2, 2, 2), (4, 6, 6, 4)]:
    rep = analyze(counts)
    practical = practical_vertical_reduction(counts)
    print(f"channel {counts}")
    print(f"  order {rep.order}, minimal form {rep.minimal_form.counts}")
    print(f"  per-layer antennas needed: {rep.n_bar}")
    print(f"  minimal vertical form     {rep.minimal_vertical_form.counts}")
    print(f"  practical reduction       {practical.counts}")
    assert dmt_rp(practical) == dmt_rp(counts)
    print()

print("(1,4,1) keeps diversity 1 with a single relay antenna; the other")
print("three only forward noise, which is why trimming them buys power gain.")
print()

print("Equivalence is decided by minimal forms:")
pairs = [((3, 1, 4, 2), (3, 1, 2, 2)), ((2, 2, 2), (2, 2)), ((1, 7, 2), (2, 9, 1))]
for a, b in pairs:
    verdict = "equivalent" if equivalent(a, b) else "different"
    print(f"  {a} vs {b}: {verdict}")
