"""Computable normed spaces over R^n and C^n.

Submodules:

- ``core``: norm specifications, axiom fuzzing, ball geometry
- ``operators``: operator norms, bound certificates, isometry tests
- ``equivalence``: equivalence constants against the basis-zero norm
- ``lp``: truncated l^p sequences, Hölder/Minkowski, dual norms, Cauchy limits
- ``hahn_banach``: constructive functional extension, norming and annihilating functionals
- ``bilinear``: bilinear-form norms, curry/uncurry, finite-support tensor products
- ``oracles``: independent SVD and grid brute-force checks
- ``report``, ``suite``, ``cli``: JSON reports, the property suite, the command line
"""

__version__ = "0.1.0"
