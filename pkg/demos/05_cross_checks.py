"""Every remainder route on one instance, side by side.

The report machinery evaluates, per test function, all routes that apply:
the spectral remainder trace, the coupling-constant simplex integral
(polynomials), the time-domain transform route (Gaussian packets) and the
pairing of the third derivative against the constructed shift density.
Pairwise residuals quantify agreement; this is the shape of evidence the
`specshift check` command emits as JSON.
"""

import json

from specshift.functions import GaussianPacket, monomial
from specshift.oracles import cross_check_report, random_instance
from specshift.shift_density import support_bounds

A, V = random_instance(seed=2024, n=6, v_norm=0.8)
sup = support_bounds(A, V)
corpus = [
    monomial(3),
    monomial(6),
    monomial(8),
    GaussianPacket(center=0.5 * (sup.a + sup.b), width=sup.width / 6.0),
]

report = cross_check_report(A, V, corpus, tol=1e-6)
print(f"instance n = {A.n}; overall pass: {report['pass']}\n")
for entry in report["functions"]:
    print(f"phi = {entry['function']}")
    for route, value in sorted(entry["values"].items()):
        print(f"  {route:8s} {value:+.15e}")
    print(f"  worst pairwise residual: {entry['max_residual']:.2e}\n")

print("full JSON report:")
print(json.dumps(report, indent=1, sort_keys=True)[:1200] + " ...")
