"""conelift: numerical tension/bitension calculus on spheres and metric cones.

Subpackages by layer:

* :mod:`conelift.jets`, :mod:`conelift.engine` — truncated-Taylor forward
  arithmetic and the central-difference cross-check backend.
* :mod:`conelift.manifolds` — chart-level tensor calculus.
* :mod:`conelift.immersion` — everything attached to an immersion: second
  fundamental form, tension, Jacobi operator, bitension, shape operator.
* :mod:`conelift.sasaki` — contact metric structures on odd spheres,
  Legendrian tests, space-form curvature, biharmonicity residual systems.
* :mod:`conelift.cone` — metric cones, closed-form cone calculus, the cone
  complex structure and its 2-form, Lagrangian tests, lifts of immersions.
* :mod:`conelift.catalog`, :mod:`conelift.verify` — named example immersions
  and the end-to-end identity verification harness.
* :mod:`conelift.flow` — discrete energy/bienergy gradient flow on closed
  curves in odd spheres.
"""

from conelift._kernel import KERNEL_NAME
from conelift.engine import CENTRAL, JET, DifferentiationConfig

__version__ = "0.1.0"

__all__ = ["DifferentiationConfig", "JET", "CENTRAL", "KERNEL_NAME", "__version__"]
