#include "fng/cnoidal.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fng/elliptic.hpp"
#include "fng/errors.hpp"
#include "fng/tolerances.hpp"

namespace fng {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNuFloor = 1e-12;   // below this the branch is the plane wave
constexpr double kNuCeil = 1.0 - 1e-12;

// Trial densities for a given nu along the (ell, L, nbar) family.
struct TrialRoots {
    double n1, n2, n3, delta;
};

std::optional<TrialRoots> roots_at_nu(const RingSpec& spec, double nu) {
    const double K = ellint_K(nu);
    const double E = ellint_E_complete(nu);
    const double root_delta = 2.0 * K * spec.ell / spec.L;
    const double delta = root_delta * root_delta; // n3 - n1
    const double n1 = spec.nbar - delta * (1.0 - E / K);
    if (!(n1 > 0.0)) return std::nullopt;
    return TrialRoots{n1, n1 + nu * delta, n1 + delta, delta};
}

// Winding-equation residual (v + w_n) - 2 pi q / L at a trial nu.
std::optional<double> winding_residual(const RingSpec& spec, double nu) {
    const auto roots = roots_at_nu(spec, nu);
    if (!roots) return std::nullopt;
    const double J = std::sqrt(roots->n1 * roots->n2 * roots->n3);
    const double m = 1.0 - roots->n2 / roots->n1;
    const double w_n = J * ellint_Pi_complete(m, nu) / (roots->n1 * ellint_K(nu));
    const double v = spec.pbar / spec.nbar - J / spec.nbar;
    return v + w_n - 2.0 * kPi * spec.q / spec.L;
}

CnoidalParams assemble(const RingSpec& spec, double nu) {
    const auto roots = roots_at_nu(spec, nu);
    if (!roots) throw NoSolutionError("cnoidal: infeasible nu during assembly");
    CnoidalParams p;
    p.nu = nu;
    p.n1 = roots->n1;
    p.n2 = roots->n2;
    p.n3 = roots->n3;
    p.m = 1.0 - p.n2 / p.n1;
    p.mu_v = 0.5 * (p.n1 + p.n2 + p.n3);
    p.J = std::sqrt(p.n1 * p.n2 * p.n3);
    p.v = spec.pbar / spec.nbar - p.J / spec.nbar;
    p.mu = p.mu_v - 0.5 * p.v * p.v;
    p.a = 2.0 * ellint_K(nu) / std::sqrt(roots->delta);
    p.w_n = p.J * ellint_Pi_complete(p.m, nu) / (p.n1 * ellint_K(nu));
    p.L = spec.L;
    p.ell = spec.ell;
    p.q = spec.q;
    return p;
}

// Log-refined scan nodes accumulating toward both ends of (0,1).
std::vector<double> scan_nodes() {
    std::vector<double> nodes;
    for (double e = -10.0; e < -0.31; e += 0.12) nodes.push_back(std::pow(10.0, e));
    for (double e = -0.32; e > -12.0; e -= 0.1) nodes.push_back(1.0 - std::pow(10.0, e));
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

double bisect_root(const RingSpec& spec, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo < Tol::ring_bisect * std::max(1.0, mid)) return mid;
        const auto fmid = winding_residual(spec, mid);
        if (!fmid) { // infeasibility encroached; shrink toward the feasible side
            hi = mid;
            continue;
        }
        if ((*fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = *fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<CnoidalParams> solve_ring_all(const RingSpec& spec) {
    if (!(spec.nbar > 0.0) || !(spec.L > 0.0) || spec.ell < 1)
        throw ConfigError("solve_ring: require nbar > 0, L > 0, ell >= 1");
    const auto nodes = scan_nodes();
    std::vector<CnoidalParams> out;
    std::optional<double> prev_nu;
    std::optional<double> prev_f;
    for (const double nu : nodes) {
        const auto f = winding_residual(spec, nu);
        if (f && prev_f && (*f > 0.0) != (*prev_f > 0.0)) {
            const double root = bisect_root(spec, *prev_nu, nu, *prev_f);
            if (root > kNuFloor && root < kNuCeil) out.push_back(assemble(spec, root));
        }
        if (f) {
            prev_nu = nu;
            prev_f = f;
        } else {
            prev_nu.reset();
            prev_f.reset();
        }
    }
    return out;
}

CnoidalParams solve_ring(const RingSpec& spec) {
    auto all = solve_ring_all(spec);
    if (all.empty()) {
        std::ostringstream msg;
        msg << "solve_ring: no root with nu in [" << kNuFloor << ", " << kNuCeil
            << ") for ell=" << spec.ell << ", q=" << spec.q << ", nbar=" << spec.nbar
            << ", pbar=" << spec.pbar << ", L=" << spec.L;
        throw NoSolutionError(msg.str());
    }
    return all.front();
}

CnoidalParams solve_ring_near(const RingSpec& spec, double nu_hint) {
    auto all = solve_ring_all(spec);
    if (all.empty()) throw NoSolutionError("solve_ring_near: no root found");
    auto best = std::min_element(all.begin(), all.end(),
                                 [nu_hint](const CnoidalParams& a, const CnoidalParams& b) {
                                     return std::fabs(a.nu - nu_hint) < std::fabs(b.nu - nu_hint);
                                 });
    if (std::fabs(best->nu - nu_hint) > Tol::branch_jump_nu)
        throw BranchJumpError("solve_ring_near: nearest root at nu=" + std::to_string(best->nu) +
                              " is too far from hint " + std::to_string(nu_hint));
    return *best;
}

CnoidalParams params_from_invariants(double J, double mu_v, double nu, int ell, int q) {
    if (!(nu >= 0.0 && nu < 1.0)) throw ConfigError("params_from_invariants: nu in [0,1)");
    if (ell < 1) throw ConfigError("params_from_invariants: ell >= 1");
    // Solve n3 from the product constraint with n1, n2 eliminated:
    //   n1(n3) = (2 mu_v - (1+nu) n3) / (2 - nu),  n2 = n1 + nu (n3 - n1).
    auto n1_of = [&](double n3) { return (2.0 * mu_v - (1.0 + nu) * n3) / (2.0 - nu); };
    auto fprod = [&](double n3) {
        const double n1 = n1_of(n3);
        const double n2 = n1 + nu * (n3 - n1);
        return n1 * n2 * n3 - J * J;
    };
    // n3 ranges over (2 mu_v / 3, 2 mu_v / (1+nu)): n1 >= 0 and n3 >= n1.
    // n3 ranges over (2 mu_v/3, 2 mu_v/(1+nu)): the product falls monotonically
    // from (2 mu_v/3)^3 at equal roots to 0 at n1 = 0
    double lo = 2.0 * mu_v / 3.0 + 1e-14, hi = 2.0 * mu_v / (1.0 + nu) - 1e-14;
    double flo = fprod(lo);
    if (!(flo >= 0.0) || !(fprod(hi) <= 0.0))
        throw NoSolutionError("params_from_invariants: no density roots for given (J, mu_v, nu)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fprod(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (std::fabs(hi - lo) < 1e-15 * mu_v) break;
    }
    const double n3 = 0.5 * (lo + hi);
    CnoidalParams p;
    p.nu = nu;
    p.n3 = n3;
    p.n1 = n1_of(n3);
    p.n2 = p.n1 + nu * (n3 - p.n1);
    p.m = 1.0 - p.n2 / p.n1;
    p.mu_v = mu_v;
    p.J = J;
    p.a = 2.0 * ellint_K(nu) / std::sqrt(p.n3 - p.n1);
    p.w_n = p.J * ellint_Pi_complete(p.m, nu) / (p.n1 * ellint_K(nu));
    p.ell = ell;
    p.q = q;
    p.L = ell * p.a;
    p.v = 2.0 * kPi * q / p.L - p.w_n;
    p.mu = p.mu_v - 0.5 * p.v * p.v;
    return p;
}

double cnoidal_density(const CnoidalParams& p, double x) {
    if (p.nu < kNuFloor) return p.n1;
    const double s = jacobi_sn(std::sqrt(p.n3 - p.n1) * x, p.nu);
    return p.n1 + (p.n2 - p.n1) * s * s;
}

double cnoidal_phase(const CnoidalParams& p, double x) {
    if (p.J == 0.0) return 0.0;
    if (p.nu < kNuFloor) return (p.J / p.n1) * x;
    // per-cell evaluation: x = cell*a + r with r in [-a/2, a/2), so the
    // amplitude am(sqrt(delta) r) stays within [-pi/2, pi/2) and the
    // incomplete integral never wraps
    const double cell = std::round(x / p.a);
    const double r = x - cell * p.a;
    const double root_delta = std::sqrt(p.n3 - p.n1);
    const double phi = jacobi_am(root_delta * r, p.nu);
    const double theta_cell = p.J / (p.n1 * root_delta) * ellint_Pi(phi, p.m, p.nu);
    return cell * (p.w_n * p.a) + theta_cell;
}

cplx cnoidal_wavefunction(const CnoidalParams& p, double x) {
    const double n = cnoidal_density(p, x);
    const double theta = cnoidal_phase(p, x) + p.v * x;
    return std::sqrt(n) * cplx{std::cos(theta), std::sin(theta)};
}

FieldState cnoidal_sample(const CnoidalParams& p, const Grid1D& g) {
    if (std::fabs(g.length - p.L) > 1e-12 * p.L)
        throw ConfigError("cnoidal_sample: grid length must match the ring length");
    FieldState s;
    s.psi.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) s.psi[i] = cnoidal_wavefunction(p, g.x(i));
    return s;
}

RingCharges cnoidal_charges(const CnoidalParams& p) {
    RingCharges c;
    if (p.nu < kNuFloor) {
        c.n = p.n1 * p.L;
    } else {
        const auto fg = fg_integrals(1, p.nu);
        const double root_delta = std::sqrt(p.n3 - p.n1);
        c.n = p.ell * (2.0 / root_delta) * (p.n1 * fg[0].f + (p.n2 - p.n1) * fg[1].f);
    }
    c.p = c.n * p.v + p.J * p.L;
    const double nbar = c.n / p.L;
    const double pbar = c.p / p.L;
    const double delta = p.n3 - p.n1;
    const double eok = p.nu < kNuFloor ? 1.0 : ellint_E_complete(p.nu) / ellint_K(p.nu);
    const double e = p.mu * nbar + p.v * pbar + 0.5 * p.n1 * p.n1 - p.n1 * nbar -
                     (delta * delta / 6.0) * ((p.nu + 2.0) - 2.0 * (p.nu + 1.0) * eok);
    c.e = e * p.L;
    return c;
}

double cnoidal_pressure_integral(const CnoidalParams& p) {
    if (p.nu < kNuFloor) return 0.5 * p.n1 * p.n1 * p.L;
    const auto fg = fg_integrals(2, p.nu);
    const double d21 = p.n2 - p.n1;
    const double mean_n2 = p.n1 * p.n1 + 2.0 * p.n1 * d21 * fg[1].f / fg[0].f +
                           d21 * d21 * fg[2].f / fg[0].f;
    return 0.5 * mean_n2 * p.L;
}

ThermoDerivatives thermo_derivatives(const RingSpec& spec, double h_n, double h_p) {
    const CnoidalParams base = solve_ring(spec);
    if (h_n <= 0.0) h_n = 1e-4 * spec.nbar;
    if (h_p <= 0.0) h_p = 1e-4 * std::max(std::fabs(spec.pbar), spec.nbar / spec.L);

    auto solve_at = [&](double nbar, double pbar) {
        RingSpec s = spec;
        s.nbar = nbar;
        s.pbar = pbar;
        return solve_ring_near(s, base.nu);
    };

    const auto north = solve_at(spec.nbar + h_n, spec.pbar);
    const auto south = solve_at(spec.nbar - h_n, spec.pbar);
    const auto east = solve_at(spec.nbar, spec.pbar + h_p);
    const auto west = solve_at(spec.nbar, spec.pbar - h_p);

    ThermoDerivatives out;
    const double dN = h_n * spec.L;
    const double dP = h_p * spec.L;
    out.mu_fd = (cnoidal_charges(north).e - cnoidal_charges(south).e) / (2.0 * dN);
    out.v_fd = (cnoidal_charges(east).e - cnoidal_charges(west).e) / (2.0 * dP);
    // susceptibility from the solver multipliers (mu = dE/dN, v = dE/dP)
    out.second[0][0] = (north.mu - south.mu) / (2.0 * dN);
    out.second[0][1] = (east.mu - west.mu) / (2.0 * dP);
    out.second[1][0] = (north.v - south.v) / (2.0 * dN);
    out.second[1][1] = (east.v - west.v) / (2.0 * dP);
    return out;
}

} // namespace fng
