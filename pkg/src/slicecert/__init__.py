"""Exact rational certificates for unit-ball slice geometry.

The package verifies, with `fractions.Fraction` arithmetic throughout,
finite computations about:

* finite metric spaces and two built-in families of grid example spaces
  (:mod:`slicecert.metric`);
* Lipschitz-free space elements, their transportation norm with dual
  certificates, McShane extensions, slices, and denting-molecule
  certificates (:mod:`slicecert.freespace`);
* weighted-tree (R-tree) geodesic projections, projection splittings of
  free-space elements, norming functionals for convex combinations of
  molecules, molecule recombination, and Daugavet-type witness
  functionals (:mod:`slicecert.rtree`);
* absolute normalized norms on the plane — polyhedral and l_p — their
  duals, extreme points, V-points, and supporting slices
  (:mod:`slicecert.absnorm`);
* a dyadic L1 step-function model with an exact norm engine, a tree of
  normalized indicator elements, and slice/witness experiments
  (:mod:`slicecert.dyadic`).

Everything is deterministic: random suites thread a single seeded
`random.Random` and reports serialize with sorted keys.
"""

from __future__ import annotations

__version__ = "0.1.0"
