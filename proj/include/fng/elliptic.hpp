#pragma once

// Elliptic integrals (Legendre forms, parameter convention nu = k^2), Jacobi
// elliptic functions, the auxiliary sin^{2n} moment integrals used by the
// cnoidal closed forms, and the analytic pendulum solution.

#include <utility>
#include <vector>

namespace fng {

// Complete elliptic integral of the first kind, K(nu), nu in [0,1).
// Computed by arithmetic-geometric mean iteration.
double ellint_K(double nu);

// Complete elliptic integral of the second kind, E(nu), nu in [0,1].
double ellint_E_complete(double nu);

// Incomplete elliptic integral of the first kind,
//   F(phi,nu) = int_0^phi dp / sqrt(1 - nu sin^2 p).
// Any real phi for nu < 1; |phi| < pi/2 when nu = 1.
double ellint_F(double phi, double nu);

// Incomplete elliptic integral of the second kind,
//   E(phi,nu) = int_0^phi sqrt(1 - nu sin^2 p) dp.
double ellint_E(double phi, double nu);

// Incomplete elliptic integral of the third kind,
//   Pi(phi,m,nu) = int_0^phi dp / [(1 - m sin^2 p) sqrt(1 - nu sin^2 p)],
// characteristic m < 1 (no pole on the path).
double ellint_Pi(double phi, double m, double nu);

// Complete third kind, Pi(m,nu) = Pi(pi/2,m,nu); nu in [0,1).
double ellint_Pi_complete(double m, double nu);

// Jacobi amplitude: the inverse of F(.,nu), i.e. F(am(u,nu),nu) = u.
// Monotone and odd in u; am(u,0) = u; am(u,1) = gd(u).
double jacobi_am(double u, double nu);

double jacobi_sn(double u, double nu); // sin(am(u,nu))
double jacobi_cn(double u, double nu); // cos(am(u,nu))

// Moment integrals
//   F_{2n}(nu) = int_0^{pi/2} sin^{2n}p / sqrt(1 - nu sin^2 p) dp,
//   G_{2n}(nu) = int_0^{pi/2} sin^{2n}p * sqrt(1 - nu sin^2 p) dp,
// for n = 0..n_max, via the inter-recursion seeded with F_0 = K, G_0 = E.
// nu must lie strictly inside (0,1): the recursion divides by nu.
struct FGPair {
    double f;
    double g;
};
std::vector<FGPair> fg_integrals(int n_max, double nu);

// Pendulum angle theta(t) for specific energy e = (1/2)theta_dot^2
// + 2(g/L)sin^2(theta/2), with theta(t0) = 0 on the libration branch.
// nu = e L / (2 g) <= 1 selects libration, nu > 1 full rotation.
double pendulum_theta(double t, double energy_e, double g_over_L, double t0);

// Period of the motion for the same energy convention.
double pendulum_period(double energy_e, double g_over_L);

} // namespace fng
