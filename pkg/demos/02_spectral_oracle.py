"""The 1D ground-truth machinery: spectral gap, Cheeger, Muckenhoupt.

Three independent routes estimate the same object for a handful of
measures with known constants:

  * the Poincare constant as 1/lambda_1 of the discretized generator,
  * the median Cheeger constant from the half-line characterization,
  * the Muckenhoupt quantity B with the guaranteed sandwich B <= C_P <= 4B.

Run:  python3 demos/02_spectral_oracle.py
"""

import math

from funcineq import measures, oracle

cases = [
    ("Gaussian(1)", measures.gaussian(1.0), 1.0),
    ("Gaussian(4)", measures.gaussian(4.0), 0.25),
    ("two-sided exponential", measures.exponential(1.0), 4.0),
    ("uniform on [0,1]", measures.uniform(0.0, 1.0), 1.0 / math.pi**2),
    ("exponential power p=1.5", measures.subbotin(1.5), None),
    ("double well a=0.3", measures.double_well(0.3), None),
]

hdr = f"{'measure':28s} {'C_P':>10s} {'known':>10s} {'C_prime_C':>10s} {'B':>8s} {'4B':>8s}"
print(hdr)
print("-" * len(hdr))
for name, model, known in cases:
    g = oracle.GridMeasure1D.from_model(model)
    cp = oracle.poincare_1d(g)
    cc = oracle.cheeger_1d(g)
    b = oracle.muckenhoupt_1d(g)
    kn = f"{known:.5f}" if known is not None else "-"
    print(f"{name:28s} {cp.constant:10.5f} {kn:>10s} {cc.constant:10.5f} "
          f"{b.constant:8.4f} {4*b.constant:8.4f}")
    assert b.constant * 0.98 <= cp.constant <= 4 * b.constant * 1.02

print("\nDilation scaling: C_P(sigma X) = sigma^2 C_P(X)")
for sigma in (0.5, 2.0):
    d = measures.dilate(measures.exponential(1.0), sigma)
    cp = oracle.poincare_1d(oracle.GridMeasure1D.from_model(d))
    print(f"  sigma = {sigma}: {cp.constant:.4f}  (expect {4*sigma**2:.4f})")

print("\nProduct rule: the constant of a product is the worst factor")
parts = [oracle.poincare_1d(oracle.GridMeasure1D.from_model(m))
         for m in (measures.gaussian(1.0), measures.exponential(1.0))]
print(f"  max(1.0, 4.0) -> {oracle.poincare_product(parts).constant:.4f}")
