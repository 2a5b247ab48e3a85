"""Exact sigma-function expansion and identity verification for the cyclic
trigonal curve y^3 = x^5 + lambda4 x^4 + lambda3 x^3 + lambda2 x^2 + lambda1 x
+ lambda0 (genus 4).

The package constructs the weighted sigma expansion by exact linear algebra,
expands the associated Kleinian p- and Q-functions as rational-coefficient
series, and machine-verifies the catalogue of differential identities and the
two-term addition formula, producing auditable verification reports.
"""

__version__ = "0.1.0"

CODE_VERSION = f"sigma35-{__version__}"
