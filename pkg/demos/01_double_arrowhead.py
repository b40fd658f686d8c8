"""The double arrowhead: a four-bar linkage that becomes a one-dof
strictly auxetic periodic mechanism.

A concave quadrilateral with its two diagonals marked as period generators
turns, after the finite-to-periodic conversion, into a framework whose
single motion lengthens both periods at once.  We trace that motion and
locate where the auxetic behavior ends: exactly where the quadrilateral
stops being concave.
"""

import numpy as np

import periodica as pa

linkage = pa.double_arrowhead()
print("vertices:")
print(np.round(linkage.positions, 3))
print("bars:", linkage.edges)
print("marked pairs (the diagonals):", linkage.marked_pairs)
print("finite freedom:", pa.finite_dof(linkage))

framework = pa.to_periodic(linkage)
print(f"\nconverted: {framework.orbit_count} vertex orbits, "
      f"{framework.edge_orbit_count} edge orbits")
print("periodic freedom:", pa.periodic_dof(framework))

space = pa.deformation_basis(framework)
tangent = pa.deformation_gram_velocity(framework, space.basis[0])
print("\nGram tangent of the single flex (note: diagonal):")
print(np.round(tangent.matrix, 6))
print("verdict:", pa.verdict(tangent).kind.value)

print("\ntracing the motion (opening direction)...")
path = pa.trace(framework, pa.TraceConfig(step=1e-3, steps=450))
print(f"{len(path.samples)} samples, max edge-length drift "
      f"{path.max_length_drift():.2e}")
for sample in path.samples[::90]:
    omega = sample.gram.matrix
    print(f"  tau = {sample.tau:+.3f}   omega diag = ({omega[0, 0]:.4f}, "
          f"{omega[1, 1]:.4f})   off-diag = {omega[0, 1]:+.1e}   "
          f"{sample.verdict.kind.value}")

interval = pa.auxetic_interval(path)
print(f"\nauxetic interval: ({interval.tau_lo:.6f}, {interval.tau_hi:.6f})")
print(f"boundary kinds: {interval.lo_kind.value} / {interval.hi_kind.value}")
print("the upper boundary is the configuration where the reflex vertex "
      "reaches the long diagonal, i.e. concavity is lost")
