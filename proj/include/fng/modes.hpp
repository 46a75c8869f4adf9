#pragma once

// Linear (Bogoliubov) analysis about condensate backgrounds: the
// pseudo-Hermitian fluctuation operator, symplectic inner products,
// Goldstone and charge-derivative modes of the ring solutions, curvature of
// the charge manifold, dense spectra, and one-period monodromy propagation
// over time-dependent backgrounds.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "fng/cnoidal.hpp"
#include "fng/fft.hpp"
#include "fng/grid.hpp"
#include "fng/spectral.hpp"

namespace fng {

// Paired fluctuation fields (u, v) on one grid. With a carrier offset dk the
// physical pair is (exp(i dk x) u, exp(-i dk x) v), keeping both stored
// components periodic.
struct BdGSpinor {
    std::vector<cplx> u;
    std::vector<cplx> v;
    double t = 0.0;

    static BdGSpinor zero(std::size_t n) { return {std::vector<cplx>(n), std::vector<cplx>(n), 0.0}; }
};

// sigma_x conj(z) = (v*, u*)
BdGSpinor conjugate_spinor(const BdGSpinor& z);

// Indefinite inner product int dx (u* u' - v* v').
cplx symplectic_product(const Grid1D& g, const BdGSpinor& a, const BdGSpinor& b);

// Plain L2 norm sqrt(int dx (|u|^2 + |v|^2)).
double spinor_l2(const Grid1D& g, const BdGSpinor& z);

// Fluctuation operator about a frozen background:
//   [[N0, A0], [-A0*, -N0*]],
//   N0 = -d^2/dx^2 / 2 + V + 2|psi0|^2 - mu - flow_v (-i d/dx),  A0 = psi0^2.
class BdGOperator {
public:
    // check_stationary enforces the stationary-equation residual bound that
    // spectral analysis relies on.
    BdGOperator(const Grid1D& g, FieldState background, Potential V, double mu,
                double flow_v = 0.0, bool check_stationary = false);

    void apply(const BdGSpinor& in, BdGSpinor& out) const;
    BdGSpinor apply(const BdGSpinor& in) const;
    Eigen::MatrixXcd dense() const;

    const Grid1D& grid() const { return grid_; }
    double mu() const { return mu_; }

private:
    Grid1D grid_;
    FieldState bg_;
    Potential pot_;
    double mu_;
    double flow_v_;
    Fft fft_;
};

struct ModePair {
    cplx eps;
    BdGSpinor z;
    double norm_sign = 0.0; // sign of (z|z) after normalization; 0 for null modes
    bool unstable = false;  // nonzero imaginary part: excluded from the orthonormal set
};

struct BdGSpectrum {
    std::vector<ModePair> modes; // sorted by Re(eps)
    std::size_t n_unstable = 0;
};

// Dense diagonalization of the discretized operator.
BdGSpectrum bogoliubov_spectrum(const BdGOperator& op);

// Phase/translation zero modes and charge-derivative partners of a ring
// solution, plus their symplectic Gram matrix in the order
// (z_theta, z_x, z_N, z_P).
struct GoldstoneGibbsModes {
    BdGSpinor z_theta, z_x, z_N, z_P;
    Eigen::Matrix4cd gram;
    CnoidalParams base;
};
GoldstoneGibbsModes goldstone_gibbs_modes(const RingSpec& spec, const Grid1D& g,
                                          double h_n = 0.0, double h_p = 0.0);

// Curvature F_NP = int dx [dN eta dP n - dN n dP eta] of the charge manifold,
// from amplitude/phase derivatives of the solved family. gauge_shift_c adds
// a charge-dependent translation x0(N) = c (N - N_base) before differencing.
double berry_gibbs_curvature(const RingSpec& spec, const Grid1D& g, double h_n = 0.0,
                             double h_p = 0.0, double gauge_shift_c = 0.0);

// Linear propagation i dz/dt = M0(t) z over a background sampled at uniform
// spacing snap_dt; the background is interpolated linearly between snapshots
// and rotated into the frame exp(i mu (t - t_ref)).
class FloquetPropagator {
public:
    FloquetPropagator(const Grid1D& g, const std::vector<FieldState>* snaps, double snap_dt,
                      double t_ref, Potential V, double mu,
                      std::optional<std::vector<double>> sponge_gamma = std::nullopt);

    // Integrates from t0 over 'duration' with step ~dt (adjusted to land
    // exactly); requires the snapshot range to cover [t0, t0+duration].
    BdGSpinor propagate(const BdGSpinor& z0, double t0, double duration, double dt) const;

private:
    void background_at(double t, std::vector<cplx>& out) const;

    Grid1D grid_;
    const std::vector<FieldState>* snaps_;
    double snap_dt_;
    double t_ref_;
    Potential pot_;
    double mu_;
    std::optional<std::vector<double>> gamma_;
    Fft fft_;
};

// L2 norm of the difference restricted to |x| <= window (relative to the
// windowed norm of 'ref'); the figure of merit for monodromy returns.
double windowed_diff(const Grid1D& g, const BdGSpinor& a, const BdGSpinor& ref, double window);

} // namespace fng
