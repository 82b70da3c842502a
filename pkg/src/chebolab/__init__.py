"""Frobenius statistics, ramification data and local-global checks for two
Chebotarev link families: periodic orbits of the cat map and closed
modular geodesics.

Modules:

* ``fingroup``, ``grouplib``: finite groups as Cayley tables, and a library
  of all groups of order <= 16 plus some of order 24.
* ``orbitgen``: the two knot families, their lengths, ordering, and
  Frobenius classes in finite quotients.
* ``density``: counting functions, zeta partial products, natural and
  Dirichlet densities.
* ``covers``: decomposition/inertia data and split-set sweeps.
* ``localglobal``: restriction maps over F_p built from linking matrices.
* ``oracles``: slow independent routes used for cross-checks.
* ``acceptance``, ``cli``: the verification suite and command-line driver.
"""

from .errors import LabError

__version__ = "0.1.0"
__all__ = ["LabError"]
