#pragma once

// Stochastic phase-space ensembles over the quench protocol: half-quantum
// vacuum noise on the Bogoliubov modes of the flowing condensate (or
// classical particle-number noise), concurrent trajectory propagation with
// per-trajectory RNG streams, accumulation of the normalized density-density
// correlation G(x,x',t), and the rank-one growth analysis of its late-time
// structure.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "fng/ces.hpp"
#include "fng/grid.hpp"

namespace fng {

enum class NoiseKind { Quantum, ClassicalNumber };

struct EnsembleConfig {
    QuenchConfig base;
    std::size_t n_traj = 400;
    std::uint64_t seed = 1;
    double k_cut = 0.0; // 0 selects half-Nyquist pi/(2 dx)
    NoiseKind noise = NoiseKind::Quantum;
    double classical_sigma = 0.001;
    // condensate scale (particles per healing length); sets the relative
    // vacuum-noise amplitude 1/sqrt(n0_xi) and the normalization of G
    double n0_xi = 1.0e4;
    double out_dt = 0.5;     // correlation output interval after the cut
    double obs_window = 50.0;
    std::size_t obs_stride = 4;

    void validate() const;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> xs;          // stored subgrid coordinates
    std::vector<std::size_t> idx;    // subgrid indices into the full grid
    std::vector<std::vector<double>> mean_density; // [time][subgrid]
    std::vector<Eigen::MatrixXd> corr;             // normalized G per time
    std::size_t n_traj = 0;
    std::size_t n_dropped = 0;
    double norm_scale = 1.0;
};

// One noisy initial state; exposed for the sampling statistics tests.
FieldState sample_initial(const QuenchEngine& eng, const EnsembleConfig& cfg,
                          std::mt19937_64& rng);

// Predicted equal-time density variance of the sampled vacuum noise, in the
// normalized units of G (sum of the static structure factor over the
// sampled modes divided by L).
double sampled_density_variance(const EnsembleConfig& cfg);

EnsembleStats run_ensemble(const EnsembleConfig& cfg, std::size_t workers = 0);

// Deterministic mean-field run on the same protocol and output cadence;
// density on the stored subgrid plus its centered time derivative.
struct MeanFieldReference {
    std::vector<double> times;                    // interior output times
    std::vector<std::vector<double>> density;     // [time][subgrid]
    std::vector<std::vector<double>> d_density_dt; // [time][subgrid]
    double omega = 0.0;
    double period = 0.0;
};
MeanFieldReference mean_field_reference(const EnsembleConfig& cfg);

// G(x,-x,t) time trace for the stored x nearest to the request.
std::vector<double> correlation_trace(const EnsembleStats& stats, double x);

// Least-squares amplitude A(t) of the rank-one model G ~ A r r' against the
// mean-field derivative profile, followed by a quadratic fit of A(t).
struct FngFit {
    std::vector<double> times;
    std::vector<double> amplitude;
    double a = 0.0, b = 0.0, c = 0.0; // A(t) ~ a t^2 + b t + c
    double r2 = 0.0;
    double rank1_residual_final = 0.0; // ||G - A r r'||_F / ||G||_F
};
FngFit fit_fng(const EnsembleStats& stats, const MeanFieldReference& ref, double period,
               double fit_from);

// Per-period oscillation amplitude of a trace and its quadratic fit.
struct EnvelopeFit {
    std::vector<double> t_centers;
    std::vector<double> amplitude;
    double a = 0.0, b = 0.0, c = 0.0;
    double r2 = 0.0;
};
EnvelopeFit quadratic_envelope_fit(const std::vector<double>& t, const std::vector<double>& y,
                                   double period, double fit_from);

// sigma_1 / sigma_2 of a correlation matrix.
double rank1_dominance(const Eigen::MatrixXd& g);

double cosine_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace fng
