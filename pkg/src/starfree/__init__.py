"""starfree: query-counted freeness testing and exact dual-certificate checks.

Submodules:

* ``digraph``   -- bounded out-degree digraphs, oracle views, BFS, source
  components, anchored pattern embedding.
* ``instances`` -- planted far / free instance generators and reductions.
* ``grover``    -- the idealized search cost model and stage schedules.
* ``testers``   -- freeness testers (search-based and classical baseline).
* ``dualpoly``  -- exact-rational dual witnesses, block composition,
  correlation bounds.
* ``lin2``      -- sparse GF(2) systems, hard matrices, distinguishing game.
* ``cli``       -- the `starfree` command-line driver.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
