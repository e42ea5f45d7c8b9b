"""Smoke test for the peierls Python module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/py`.
"""

import math

import peierls


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    theta_c, w_star, x = peierls.theta_critical_thermo(2.0)
    close(theta_c, 0.21044, 1e-5)
    close(w_star, x * theta_c, 1e-12)

    w, delta, _ = peierls.minimize_dimer(2.0, theta_c + 0.01)
    assert delta == 0.0
    w, delta, _ = peierls.minimize_dimer(2.0, theta_c - 0.01)
    assert delta > 0.0

    close(peierls.mu_critical(6), 1.0 / 3.0, 1e-12)
    assert peierls.theta_critical_finite(1.0, 6) is None

    c = peierls.asymptotic_constants()
    close(c["c1"], 0.8188, 5e-4)
    close(c["C"], math.exp(c["c2"] - 1.0), 1e-12)

    w1, f0_per = peierls.periodic_optimum_zero(2.0)
    close(w1, 1.0 + 2.0 / math.pi, 1e-14)
    gap = peierls.dimer_optimum_zero(3.0)
    assert gap["resolved"] and gap["gap"] > 0.0

    b = peierls.bifurcation_data(2.0)
    assert b["det_j"] > 0.0 and b["delta_prime"] < 0.0
    close(b["coeff"], math.sqrt(-b["delta_prime"]), 1e-14)

    close(peierls.h_theta(4.0, 1e-3), 2.0, 1e-9)
    close(peierls.g_finite(1.0, 0.2, 2.0, 0.1, 512), peierls.g_thermo(1.0, 0.2, 2.0, 0.1), 1e-12)

    try:
        peierls.mu_critical(8)
    except ValueError:
        pass
    else:
        raise AssertionError("mu_critical(8) should raise ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
