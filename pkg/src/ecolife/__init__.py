"""Lifecycle correction and temporal network analysis for service ecosystems.

Modules:

* :mod:`ecolife.dataset`     records, parsing, validation
* :mod:`ecolife.liveness`    endpoint probing and availability verdicts
* :mod:`ecolife.correction`  death-time estimation and composition repair
* :mod:`ecolife.networks`    M-A, A-A and C-C networks and snapshots
* :mod:`ecolife.analysis`    rq1..rq6 metrics
* :mod:`ecolife.cli`         the ``ecolife`` command
"""

__version__ = "0.1.0"
