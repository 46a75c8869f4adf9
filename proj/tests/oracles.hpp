#pragma once

// Test-only reference implementations: adaptive quadrature and a classical
// RK4 integrator. These stay independent of the library code they check.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double m, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(f, a, m, b, fa, fm, fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

// RK4 for y' = rhs(t, y), fixed step.
template <std::size_t N>
std::vector<std::array<double, N>> rk4(
    const std::function<std::array<double, N>(double, const std::array<double, N>&)>& rhs,
    std::array<double, N> y0, double t0, double t1, double dt) {
    std::vector<std::array<double, N>> out;
    const auto nsteps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    out.reserve(nsteps + 1);
    out.push_back(y0);
    auto y = y0;
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    for (std::size_t s = 0; s < nsteps; ++s) {
        const double t = t0 + dt * static_cast<double>(s);
        const auto k1 = rhs(t, y);
        const auto k2 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
        const auto k3 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
        const auto k4 = rhs(t + dt, axpy(y, dt, k3));
        for (std::size_t i = 0; i < N; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        out.push_back(y);
    }
    return out;
}

} // namespace oracle
