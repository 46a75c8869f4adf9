#pragma once

// Barrier-quench experiment: deterministic mean-field runs, classification
// of the final state (nonlinear ground state vs self-oscillating emission
// regime), spontaneous-frequency extraction, phase-diagram scans with
// boundary bisection, power-law fits of the frequency near the boundary,
// and the conserved charge of the periodic state with its enthalpy.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fng/grid.hpp"
#include "fng/spectral.hpp"

namespace fng {

struct QuenchConfig {
    double Z = 1.0;              // barrier strength (attractive, integrated)
    double v = 0.8;              // initial flow velocity, 0 < v < 1
    double L = 400.0;            // box length
    std::size_t n = 2048;        // grid points
    double dt = 0.01;
    double t_max = 400.0;
    double probe_x = -20.0;      // upstream observation point
    double probe2_x = 20.0;      // downstream cross-check point
    double transient_cut = 150.0;
    double out_dt = 0.1;         // probe sampling interval
    double sponge_width_frac = 0.05;
    double sponge_gamma = 1.0;
    double barrier_sigma = 0.0;  // 0 selects 2*dx
    double record_from = -1.0;   // >= 0: record snapshots from this time
    double record_dt = 0.0;      // 0 selects 4*dt

    void validate() const;
    Grid1D make_grid() const { return Grid1D(L, n); }
};

// Propagation setup shared by the mean-field run and the stochastic
// ensembles: barrier potential, edge sponge restoring the inflow reference,
// and the carrier decomposition v = k_carrier + k_offset with k_carrier
// grid-representable.
struct QuenchEngine {
    Grid1D grid;
    Potential barrier;
    RestoringSponge sponge;
    double k_carrier = 0.0;
    double k_offset = 0.0;
    double mu_ref = 0.0; // plane-wave chemical potential v^2/2 + 1

    static QuenchEngine make(const QuenchConfig& cfg);
    FieldState initial_plane_wave() const;
};

enum class QuenchKind { GS, CES };

struct ProbeSeries {
    std::vector<double> t;
    std::vector<double> n_probe;    // density at probe_x
    std::vector<double> n_probe2;   // density at probe2_x
    std::vector<double> phase_probe; // lab-frame phase at probe_x (wrapped)
};

struct Classification {
    QuenchKind kind = QuenchKind::GS;
    bool inconclusive = false;
    double omega = 0.0;
    double amplitude = 0.0;
    bool has_peak = false;
};

// Classifies a density time series for t >= transient_cut: sustained
// relative oscillation amplitude over the last quarter of the window plus
// an isolated periodogram peak mark the self-oscillating state.
Classification classify_series(const std::vector<double>& t, const std::vector<double>& d,
                               double transient_cut);

// Refines a frequency estimate by the phase slope of the windowed Fourier
// coefficient between the two halves of the window.
double refine_frequency(const std::vector<double>& t, const std::vector<double>& d,
                        double omega0, double t_from);

struct QuenchResult {
    QuenchKind kind = QuenchKind::GS;
    bool inconclusive = false;
    double omega = 0.0;     // dominant frequency (0 for GS)
    double period = 0.0;    // 2 pi / omega for CES
    double amplitude = 0.0; // relative oscillation amplitude at the probe
    double omega2 = 0.0;    // frequency from the second probe
    double mu_probe = 0.0;  // phase-slope chemical potential at the probe
    ProbeSeries probe;
    std::vector<FieldState> snaps; // recorded lab-frame window
    double snap_dt = 0.0;
    FieldState final_state;
};

QuenchResult run_quench(const QuenchConfig& cfg);

// --- phase diagram -------------------------------------------------------------

struct ScanCell {
    double Z = 0.0, v = 0.0;
    QuenchKind kind = QuenchKind::GS;
    bool inconclusive = false;
    double omega = 0.0;
    double amplitude = 0.0;
};

std::vector<ScanCell> scan_phase_diagram(const std::vector<double>& Zs,
                                         const std::vector<double>& vs,
                                         const QuenchConfig& tmpl, std::size_t workers = 0);

// Bisects the classification boundary to the requested resolution along
// axis 'v' (fixed Z) or 'Z' (fixed v). lo must classify GS and hi CES;
// near the boundary t_max doubles adaptively until the classification is
// conclusive.
double bisect_boundary(char axis, double fixed, double lo, double hi,
                       const QuenchConfig& tmpl, double resolution = 1e-3);

// --- critical fit ----------------------------------------------------------------

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_stderr = 0.0;
    double r2 = 0.0;
};

// Least squares of log(omega) vs log(delta); requires >= 6 samples spanning
// at least one decade in delta.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& delta_omega);

// --- periodic-state charges -------------------------------------------------------

// Optimal frame rotation rate: the mu that minimizes
// || exp(i mu T) psi(t1+T) - psi(t1) ||, nearest to mu_hint.
double optimal_gibbs_mu(const Grid1D& g, const FieldState& first, const FieldState& last,
                        double T, double mu_hint);

struct FloquetCharges {
    double F = 0.0;  // phase-translation charge of the periodic state
    double I = 0.0;  // enthalpy E - omega F
    double E = 0.0;  // window-averaged energy
    double e_drift = 0.0; // |E(end) - E(start)| / E
    double n_mean = 0.0;  // window-averaged particle number
};

// Time-average over the snapshot window (which must match T to 1%) of
// F = (1/T) int dt <psi0| i d/dt |psi0> / omega in the frame rotating at mu,
// E from the spectral charges, and I = E - omega F.
FloquetCharges floquet_charge(const Grid1D& g, const std::vector<FieldState>& snaps,
                              double snap_dt, double mu, double omega, const Potential& V);

} // namespace fng
