# How close is the polygon to the circle?
#
# Boundary vertices sit exactly on the circle, so the gap between the
# polygonal boundary and the true one is the chord sagitta: O(h^2) in
# distance and O(h) in the normal direction.  The skin diagnostics
# measure both at the boundary quadrature points of each mesh in the
# refinement ladder.

import numpy as np

from robinfem import refinement_sequence, skin_diagnostics, unit_disk


def main():
    disk = unit_disk()
    print(f"{'level':>5} {'h_max':>10} {'max |d|':>12} {'h^2/4':>12} {'max dev':>12} {'h':>10}")
    for level, mesh in enumerate(refinement_sequence(disk, 5)):
        diag = skin_diagnostics(disk, mesh)
        print(
            f"{level:>5} {mesh.h_max:>10.4e} {diag.max_abs_distance:>12.4e} "
            f"{mesh.h_max**2 / 4:>12.4e} {diag.max_normal_deviation:>12.4e} {mesh.h_max:>10.4e}"
        )

    # the projection machinery behind the diagnostics
    print("\nprojection onto the circle:")
    for p in ((0.8, 0.0), (0.6, 0.6), (0.0, 1.1)):
        q = disk.project(np.array(p))
        d = disk.signed_distance(np.array(p))
        print(f"  {p} -> ({q[0]:+.6f}, {q[1]:+.6f}),  signed distance {d:+.4f}")


if __name__ == "__main__":
    main()
