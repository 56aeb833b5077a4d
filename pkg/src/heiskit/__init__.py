"""Numerical geometry toolkit for the first Heisenberg group.

Submodules:

* :mod:`heiskit.core` -- exact group, metric and projection primitives
* :mod:`heiskit.quadrature` -- seeded Monte-Carlo and grid integration
* :mod:`heiskit.domains` -- indicator oracles, intrinsic graphs, surface sampling
* :mod:`heiskit.oscillation` -- vertical perimeter and vertical oscillation
* :mod:`heiskit.beta` -- vertical beta numbers and packing scans
* :mod:`heiskit.riesz` -- explicit kernels, bumps and truncated transforms
* :mod:`heiskit.cli` -- reproducible experiment runner
"""

__version__ = "0.1.0"
