#include "fng/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fng/tolerances.hpp"

namespace fng {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

// Carlson symmetric integrals. Duplication until the arguments cluster, then
// a fifth-order Taylor tail. Arguments nonnegative, at most one zero.

double carlson_rf(double x, double y, double z) {
    double a = (x + y + z) / 3.0;
    double q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z)});
    while (q > 1e-4 * std::fabs(a)) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = (x + y + z) / 3.0;
        q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z)});
        if (q < 1e-300) break;
    }
    const double dx = 1.0 - x / a, dy = 1.0 - y / a, dz = 1.0 - z / a;
    const double e2 = dx * dy + dy * dz + dz * dx;
    const double e3 = dx * dy * dz;
    return (1.0 - e2 / 10.0 + e2 * e2 / 24.0 + e3 / 14.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(a);
}

double carlson_rc(double x, double y) {
    // y > 0 in all uses here
    double a = (x + 2.0 * y) / 3.0;
    double q = std::fabs(a - x);
    while (q > 1e-4 * std::fabs(a)) {
        const double lam = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        a = (x + 2.0 * y) / 3.0;
        q = std::fabs(a - x);
        if (q < 1e-300) break;
    }
    const double s = (y - a) / a;
    // 1/sqrt(a) * (1 + 3/10 s^2 + 1/7 s^3 + 3/8 s^4 + 9/22 s^5 + ...)
    return (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * (9.0 / 22.0))))) / std::sqrt(a);
}

double carlson_rd(double x, double y, double z) {
    double sum = 0.0;
    double fac = 1.0;
    double a = (x + y + 3.0 * z) / 5.0;
    double q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z)});
    while (q > 1e-4 * std::fabs(a)) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sy * sz + sz * sx;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = (x + y + 3.0 * z) / 5.0;
        q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z)});
        if (q < 1e-300) break;
    }
    const double dx = (a - x) / a, dy = (a - y) / a, dz = (a - z) / a;
    const double ea = dx * dy, eb = dz * dz;
    const double ec = ea - eb, ed = ea - 6.0 * eb, ee = ed + 2.0 * ec;
    const double tail = 1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                        + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea));
    return 3.0 * sum + fac * tail / (a * std::sqrt(a));
}

double carlson_rj(double x, double y, double z, double p) {
    double sum = 0.0;
    double fac = 1.0;
    double a = (x + y + z + 2.0 * p) / 5.0;
    double q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z), std::fabs(a - p)});
    while (q > 1e-4 * std::fabs(a)) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sy * sz + sz * sx;
        const double alpha = p * (sx + sy + sz) + sx * sy * sz;
        const double beta = std::sqrt(p) * (p + lam);
        sum += fac * carlson_rc(alpha * alpha, beta * beta);
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        p = 0.25 * (p + lam);
        a = (x + y + z + 2.0 * p) / 5.0;
        q = std::max({std::fabs(a - x), std::fabs(a - y), std::fabs(a - z), std::fabs(a - p)});
        if (q < 1e-300) break;
    }
    const double dx = (a - x) / a, dy = (a - y) / a, dz = (a - z) / a;
    const double dp = -0.5 * (dx + dy + dz);
    const double ea = dx * (dy + dz) + dy * dz;
    const double eb = dx * dy * dz;
    const double ec = dp * dp;
    const double ed = ea - 3.0 * ec;
    const double ee = eb + 2.0 * dp * (ea - ec);
    const double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0, c4 = 3.0 / 26.0;
    const double c5 = 0.75 * c3, c6 = 1.5 * c4, c7 = 0.5 * c2, c8 = 2.0 * c3;
    const double tail = 1.0 + ed * (-c1 + c5 * ed - c6 * ee)
                        + eb * (c7 + dp * (-c8 + dp * c4))
                        + dp * ea * (c2 - dp * c3) - c2 * dp * ec;
    return 3.0 * sum + fac * tail / (a * std::sqrt(a));
}

// Principal-range pieces, |phi| <= pi/2, via the Carlson forms.

double f_half(double phi, double nu) {
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, 1.0 - nu * s * s, 1.0);
}

double e_half(double phi, double nu) {
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    const double y = 1.0 - nu * s * s;
    return s * carlson_rf(c * c, y, 1.0) - (nu / 3.0) * s * s * s * carlson_rd(c * c, y, 1.0);
}

double pi_half(double phi, double m, double nu) {
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    const double y = 1.0 - nu * s * s;
    double out = s * carlson_rf(c * c, y, 1.0);
    if (m != 0.0)
        out += (m / 3.0) * s * s * s * carlson_rj(c * c, y, 1.0, 1.0 - m * s * s);
    return out;
}

// Splits phi = n*pi + r with r in [-pi/2, pi/2].
struct PhiSplit {
    double n;
    double r;
};
PhiSplit split_phi(double phi) {
    const double n = std::round(phi / kPi);
    return {n, phi - n * kPi};
}

} // namespace

double ellint_K(double nu) {
    require(nu >= 0.0 && nu < 1.0, "ellint_K: nu must lie in [0,1); K diverges at nu=1");
    double a = 1.0, b = std::sqrt(1.0 - nu);
    while (std::fabs(a - b) > Tol::elliptic_iter * a) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (2.0 * a);
}

double ellint_E_complete(double nu) {
    require(nu >= 0.0 && nu <= 1.0, "ellint_E_complete: nu must lie in [0,1]");
    if (nu == 1.0) return 1.0;
    double a = 1.0, b = std::sqrt(1.0 - nu);
    double c2sum = 0.5 * nu; // 2^{-1} c_0^2
    double pow2 = 1.0;       // 2^{n-1} for n = 1,2,...
    while (std::fabs(a - b) > Tol::elliptic_iter * a) {
        const double c = 0.5 * (a - b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        c2sum += pow2 * c * c;
        pow2 *= 2.0;
    }
    return (kPi / (2.0 * a)) * (1.0 - c2sum);
}

double ellint_F(double phi, double nu) {
    require(nu >= 0.0 && nu <= 1.0, "ellint_F: nu must lie in [0,1]");
    if (nu == 1.0) {
        require(std::fabs(phi) < kPi / 2.0, "ellint_F: diverges for nu=1, |phi| >= pi/2");
        return std::atanh(std::sin(phi));
    }
    const auto [n, r] = split_phi(phi);
    if (n == 0.0) return f_half(r, nu);
    return 2.0 * n * ellint_K(nu) + f_half(r, nu);
}

double ellint_E(double phi, double nu) {
    require(nu >= 0.0 && nu <= 1.0, "ellint_E: nu must lie in [0,1]");
    const auto [n, r] = split_phi(phi);
    if (n == 0.0) return e_half(r, nu);
    return 2.0 * n * ellint_E_complete(nu) + e_half(r, nu);
}

double ellint_Pi(double phi, double m, double nu) {
    require(nu >= 0.0 && nu <= 1.0, "ellint_Pi: nu must lie in [0,1]");
    require(m < 1.0, "ellint_Pi: characteristic m must satisfy m < 1");
    if (nu == 1.0) {
        require(std::fabs(phi) < kPi / 2.0, "ellint_Pi: diverges for nu=1, |phi| >= pi/2");
        return pi_half(phi, m, nu);
    }
    const auto [n, r] = split_phi(phi);
    if (n == 0.0) return pi_half(r, m, nu);
    return 2.0 * n * ellint_Pi_complete(m, nu) + pi_half(r, m, nu);
}

double ellint_Pi_complete(double m, double nu) {
    require(nu >= 0.0 && nu < 1.0, "ellint_Pi_complete: nu must lie in [0,1)");
    require(m < 1.0, "ellint_Pi_complete: characteristic m must satisfy m < 1");
    double out = carlson_rf(0.0, 1.0 - nu, 1.0);
    if (m != 0.0) out += (m / 3.0) * carlson_rj(0.0, 1.0 - nu, 1.0, 1.0 - m);
    return out;
}

double jacobi_am(double u, double nu) {
    require(nu >= 0.0 && nu <= 1.0, "jacobi_am: nu must lie in [0,1]");
    if (nu == 0.0) return u;
    if (nu == 1.0) return std::asin(std::tanh(u)); // gudermannian
    const double K = ellint_K(nu);
    // reduce: am(u + 2K n) = am(u) + n pi, remainder in [-K, K]
    const double n = std::round(u / (2.0 * K));
    const double r = u - 2.0 * K * n;
    // invert F on [-K,K] -> phi in [-pi/2, pi/2]; Newton with bisection guard
    double lo = -kPi / 2.0, hi = kPi / 2.0;
    double phi = (r / K) * (kPi / 2.0);
    for (int it = 0; it < 100; ++it) {
        const double fval = f_half(phi, nu) - r;
        if (fval > 0.0)
            hi = phi;
        else
            lo = phi;
        const double step = fval * std::sqrt(1.0 - nu * std::sin(phi) * std::sin(phi));
        double next = phi - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - phi) < Tol::am_invert) {
            phi = next;
            break;
        }
        phi = next;
    }
    return n * kPi + phi;
}

double jacobi_sn(double u, double nu) { return std::sin(jacobi_am(u, nu)); }

double jacobi_cn(double u, double nu) { return std::cos(jacobi_am(u, nu)); }

std::vector<FGPair> fg_integrals(int n_max, double nu) {
    require(n_max >= 0, "fg_integrals: n_max must be >= 0");
    require(nu > 0.0 && nu < 1.0,
            "fg_integrals: nu must lie strictly in (0,1); the recursion divides by nu");
    std::vector<FGPair> out(static_cast<std::size_t>(n_max) + 1);
    out[0] = {ellint_K(nu), ellint_E_complete(nu)};
    for (int n = 1; n <= n_max; ++n) {
        const double f = (out[n - 1].f - out[n - 1].g) / nu;
        const double g = ((2.0 * n - 1.0) * out[n - 1].g + (1.0 - nu) * f) / (2.0 * n + 1.0);
        out[n] = {f, g};
    }
    return out;
}

double pendulum_theta(double t, double energy_e, double g_over_L, double t0) {
    require(energy_e >= 0.0, "pendulum_theta: energy must be >= 0");
    require(g_over_L > 0.0, "pendulum_theta: g/L must be > 0");
    const double nu = energy_e / (2.0 * g_over_L);
    if (nu <= 1.0)
        return 2.0 * std::asin(std::sqrt(nu) * jacobi_sn(std::sqrt(g_over_L) * (t - t0), nu));
    return 2.0 * jacobi_am(std::sqrt(energy_e / 2.0) * (t - t0), 1.0 / nu);
}

double pendulum_period(double energy_e, double g_over_L) {
    require(energy_e >= 0.0, "pendulum_period: energy must be >= 0");
    require(g_over_L > 0.0, "pendulum_period: g/L must be > 0");
    const double nu = energy_e / (2.0 * g_over_L);
    if (nu < 1.0) return 4.0 / std::sqrt(g_over_L) * ellint_K(nu);
    require(nu > 1.0, "pendulum_period: separatrix (nu=1) has no finite period");
    return std::sqrt(8.0 / energy_e) * ellint_K(1.0 / nu);
}

} // namespace fng
