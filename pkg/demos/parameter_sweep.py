# Where coercivity lives and dies.
#
# The boundary and penalty weights keep the assembled matrix positive
# definite for any Robin parameter epsilon as long as gamma stays small.
# Crank gamma up and the gradient-gradient boundary term overwhelms the
# stabilization: the smallest eigenvalue goes negative and the conjugate
# gradient iteration would detect an indefinite system.  This sweep makes
# the threshold visible, then shows the epsilon-robustness of the error
# at the default gamma.

from robinfem import (
    Method,
    Scheme,
    SolverConfig,
    assemble,
    error_report,
    generate_disk_mesh,
    get_problem,
    min_eigenvalue_dense,
    robin_weights,
    solve,
)


def gamma_sweep():
    mesh = generate_disk_mesh(4)
    data = get_problem("sinsin").make_data(1.0)
    print("smallest eigenvalue of the assembled matrix (disk, 96 triangles, P1)")
    print(f"{'gamma':>8} {'nitsche':>12} {'sipdg':>12}")
    for gamma in (0.01, 0.1, 0.5, 2.0, 10.0, 100.0):
        row = []
        for method in (Method.NITSCHE, Method.SIPDG):
            system = assemble(mesh, Scheme(method, gamma=gamma), data)
            row.append(min_eigenvalue_dense(system.matrix))
        print(f"{gamma:>8g} {row[0]:>12.3e} {row[1]:>12.3e}")
    print()


def epsilon_sweep():
    mesh = generate_disk_mesh(16)
    problem = get_problem("sinsin")
    print("energy error at gamma = 0.1 across the Robin parameter")
    print(f"{'epsilon':>8} {'err_E':>12} {'err_L2':>12}")
    for eps in (1e-3, 1e-1, 1.0, 1e1, 1e3):
        scheme = Scheme(Method.NITSCHE, epsilon=eps)
        data = problem.make_data(eps)
        system = assemble(mesh, scheme, data)
        solution, _ = solve(system, SolverConfig())
        rep = error_report(mesh, scheme, data, solution, system.dofmap)
        print(f"{eps:>8g} {rep.err_energy:>12.4e} {rep.err_l2:>12.4e}")
    print()
    print("edge weights stay bounded at the extremes (h_E = 0.1):")
    for eps in (1e-8, 1e8):
        c1, c2, c3 = robin_weights(Scheme(Method.NITSCHE, epsilon=eps), 0.1)
        print(f"  eps={eps:g}: c1={c1:.3e} c2={c2:.3e} c3={c3:.3e}")


if __name__ == "__main__":
    gamma_sweep()
    epsilon_sweep()
