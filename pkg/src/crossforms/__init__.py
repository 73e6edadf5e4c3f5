"""crossforms: percolation crossing probabilities with two independent engines.

Subpackages:

* qseries  - exact rational Puiseux/q-series arithmetic and the eta-quotient
             expansions, for proof-grade identity checks.
* analytic - complex-numeric evaluation on the upper half-plane (Dedekind eta,
             modular lambda, Gauss 2F1, the integrated second-order form).
* crossing - the crossing probabilities and densities, their integral and
             derivative identities.
* modular  - group actions, characters, cocycles, cusp expansions and the
             transformation-law verification suite.
* percsim  - Monte Carlo bond/site percolation cross-checks.
* cli      - command-line interface over all of the above.
"""

__version__ = "0.1.0"
