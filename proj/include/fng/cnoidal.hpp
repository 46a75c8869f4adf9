#pragma once

// Analytic cnoidal-wave solutions of the stationary constrained GP equation
// on a ring: root-finding for the matching conditions, wavefunction
// evaluation, closed-form conserved charges, and thermodynamic derivatives.

#include <vector>

#include "fng/grid.hpp"

namespace fng {

// Ring embedding target: mean density, mean momentum density, ring length,
// number of density periods ell >= 1, and phase winding number q.
struct RingSpec {
    double nbar = 1.0;
    double pbar = 0.0;
    double L = 1.0;
    int ell = 1;
    int q = 0;
};

// Full parameter set of one solution branch. The density roots satisfy
// n1 + n2 + n3 = 2 mu_v and n1 n2 n3 = J^2; nu = (n2-n1)/(n3-n1),
// m = 1 - n2/n1; the density period is a = 2K(nu)/sqrt(n3-n1) with
// L = ell*a, and the Bloch slope obeys v + w_n = 2 pi q / L.
struct CnoidalParams {
    double n1 = 0.0, n2 = 0.0, n3 = 0.0;
    double nu = 0.0, m = 0.0;
    double mu_v = 0.0, J = 0.0;
    double v = 0.0, mu = 0.0;
    double a = 0.0, w_n = 0.0;
    double L = 0.0;
    int ell = 1, q = 0;
};

// All matching-system roots with nu in [0,1) for the requested (ell,q).
std::vector<CnoidalParams> solve_ring_all(const RingSpec& spec);

// The lowest-nu root; throws NoSolutionError when none exists.
CnoidalParams solve_ring(const RingSpec& spec);

// The root closest to nu_hint; throws BranchJumpError when the nearest
// root is farther than the branch-jump threshold.
CnoidalParams solve_ring_near(const RingSpec& spec, double nu_hint);

// Direct construction from the invariants (J, mu_v, nu): solves the density
// roots from sum/product/ratio constraints, then embeds on a ring of
// ell periods with winding number q.
CnoidalParams params_from_invariants(double J, double mu_v, double nu, int ell, int q);

// Density n(x) = n1 + (n2-n1) sn^2(sqrt(n3-n1) x, nu); even, period a.
double cnoidal_density(const CnoidalParams& p, double x);

// Continuous phase theta(x) of the cnoidal frame: theta' = J/n, theta(0)=0.
double cnoidal_phase(const CnoidalParams& p, double x);

// Full wavefunction psi0(x) = exp(i v x) sqrt(n(x)) exp(i theta(x)).
cplx cnoidal_wavefunction(const CnoidalParams& p, double x);

// Samples psi0 on a grid; the grid length must equal the ring length.
FieldState cnoidal_sample(const CnoidalParams& p, const Grid1D& g);

// Closed-form conserved charges of the ring solution.
struct RingCharges {
    double n = 0.0;
    double p = 0.0;
    double e = 0.0;
};
RingCharges cnoidal_charges(const CnoidalParams& p);

// Closed-form integral of the local pressure n(x)^2/2 over the ring.
double cnoidal_pressure_integral(const CnoidalParams& p);

// Central finite differences of E(N,P) at fixed L along one (ell,q) branch.
// first[0] ~ dE/dN (chemical potential), first[1] ~ dE/dP (flow velocity);
// second[i][j] is the susceptibility d^2 E/dQ_i dQ_j assembled from the
// multipliers returned by the solver at the stencil points.
struct ThermoDerivatives {
    double mu_fd = 0.0;
    double v_fd = 0.0;
    double second[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};
ThermoDerivatives thermo_derivatives(const RingSpec& spec, double h_n = 0.0, double h_p = 0.0);

} // namespace fng
