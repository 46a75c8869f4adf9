#pragma once

// Split-step Fourier propagation of the 1D Gross-Pitaevskii equation
//   i dpsi/dt = [ -1/2 d^2/dx^2 + V(x) + |psi|^2 ] psi,
// imaginary-time relaxation to the stationary state at fixed particle
// number, and spectral evaluation of the conserved charges.

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "fng/fft.hpp"
#include "fng/grid.hpp"

namespace fng {

// Edge sponge that relaxes the field toward a reference plane wave
//   ref(x,t) = amp * exp(i (k_ref x - mu_ref t)),
// with rate gamma(x) ramped as sin^2 over a band at each boundary.
// amp = 0 degrades to a plain absorber toward vacuum.
struct RestoringSponge {
    std::vector<double> gamma;
    cplx amp = 0.0;
    double k_ref = 0.0;
    double mu_ref = 0.0;

    static RestoringSponge edges(const Grid1D& g, double width_frac, double gamma0,
                                 cplx amp, double k_ref, double mu_ref);
};

struct Charges {
    double n = 0.0;
    double p = 0.0;
    double e = 0.0;
};

// N = int |psi|^2, P = Re int psi* (-i d/dx) psi, E = int [ |psi'|^2/2
// + Re(V)|psi|^2 + |psi|^4/2 ], all with the k_offset carrier included.
Charges observables(const Grid1D& g, const FieldState& s, const Potential& V);

// Strang-splitting propagator; owns FFT plans and phase tables for one grid.
class SplitStepper {
public:
    SplitStepper(const Grid1D& g, Potential V, double k_offset = 0.0,
                 std::optional<RestoringSponge> sponge = std::nullopt);

    // Advances by nsteps steps of size dt; the time stamp moves by exactly
    // dt*nsteps. Throws NumericalError on non-finite values.
    void advance(FieldState& s, double dt, std::size_t nsteps) const;

    const Grid1D& grid() const { return grid_; }
    const Potential& potential() const { return pot_; }

private:
    Grid1D grid_;
    Potential pot_;
    double k_offset_;
    std::optional<RestoringSponge> sponge_;
    std::unique_ptr<Fft> fft_;
};

struct GroundState {
    FieldState state;
    double mu = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
};

// Imaginary-time relaxation at fixed particle number target_n.
// Returns the converged state and its chemical potential; throws
// MaxIterationsError if the residual fails to reach tol.
GroundState imaginary_time(const Grid1D& g, FieldState s, const Potential& V,
                           double dtau, double tol, double target_n,
                           std::size_t max_iters = 200000);

// L2 residual of the stationary equation H_GP psi = mu psi - i v psi',
// evaluated spectrally: ||H_GP psi - mu psi + i v psi'|| / ||psi||.
double gpg_residual(const Grid1D& g, const FieldState& s, const Potential& V,
                    double mu, double flow_v);

} // namespace fng
