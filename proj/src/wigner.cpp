#include "fng/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fng/errors.hpp"
#include "fng/fft.hpp"
#include "fng/threads.hpp"

namespace fng {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa, identical across standard libraries
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gauss(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

struct BogoliubovAmps {
    double u, v;
};

BogoliubovAmps uv_at(double k) {
    const double ek = 0.5 * k * k;
    const double E = std::sqrt(ek * (ek + 2.0));
    const double r = (ek + 1.0) / (2.0 * E);
    return {std::sqrt(r + 0.5), -std::sqrt(r - 0.5)};
}

std::vector<std::size_t> subgrid_indices(const Grid1D& g, double window, std::size_t stride) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.n; i += stride)
        if (std::fabs(g.x(i)) <= window) idx.push_back(i);
    return idx;
}

} // namespace

void EnsembleConfig::validate() const {
    base.validate();
    if (n_traj < 2) throw ConfigError("ensemble: n_traj must be >= 2");
    const Grid1D g = base.make_grid();
    const double nyq = kPi / g.dx;
    if (k_cut > nyq) throw ConfigError("ensemble: k_cut exceeds the grid Nyquist wavenumber");
    if (!(n0_xi > 0.0)) throw ConfigError("ensemble: n0_xi must be positive");
    if (noise == NoiseKind::ClassicalNumber && !(classical_sigma > 0.0))
        throw ConfigError("ensemble: classical_sigma must be positive");
    if (obs_stride == 0) throw ConfigError("ensemble: obs_stride must be >= 1");
}

FieldState sample_initial(const QuenchEngine& eng, const EnsembleConfig& cfg,
                          std::mt19937_64& rng) {
    const Grid1D& g = eng.grid;
    FieldState s;
    s.t = 0.0;
    s.k_offset = eng.k_offset;
    s.psi.resize(g.n);

    if (cfg.noise == NoiseKind::ClassicalNumber) {
        const double dn = cfg.classical_sigma * gauss(rng);
        const double amp = std::sqrt(std::max(0.0, 1.0 + dn));
        for (std::size_t i = 0; i < g.n; ++i) {
            const double ph = eng.k_carrier * g.x(i);
            s.psi[i] = amp * cplx{std::cos(ph), std::sin(ph)};
        }
        return s;
    }

    const double kcut = cfg.k_cut > 0.0 ? cfg.k_cut : 0.5 * kPi / g.dx;
    const double eps = 1.0 / std::sqrt(cfg.n0_xi);
    const double mode_norm = eps / std::sqrt(g.length);
    // spectral coefficients of the comoving fluctuation field: each sampled
    // mode j contributes alpha u at +k_j and alpha* v at -k_j
    std::vector<cplx> coeff(g.n, 0.0);
    const auto jmax = static_cast<std::ptrdiff_t>(g.n / 2);
    for (std::ptrdiff_t j = -jmax + 1; j < jmax; ++j) {
        if (j == 0) continue;
        const double k = 2.0 * kPi * static_cast<double>(j) / g.length;
        if (std::fabs(k) > kcut) continue;
        const cplx alpha{0.5 * gauss(rng), 0.5 * gauss(rng)}; // <|alpha|^2> = 1/2
        const auto [u, v] = uv_at(k);
        const std::size_t ip = static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(g.n)) %
                                                        static_cast<std::ptrdiff_t>(g.n));
        const std::size_t im = static_cast<std::size_t>((-j + static_cast<std::ptrdiff_t>(g.n)) %
                                                        static_cast<std::ptrdiff_t>(g.n));
        coeff[ip] += alpha * u * mode_norm;
        coeff[im] += std::conj(alpha) * v * mode_norm;
    }
    // phi(x) = sum_k c_k exp(i k x): unnormalized backward transform
    Fft fft(g.n);
    std::vector<cplx> phi = coeff;
    fft.inverse(phi.data());
    for (auto& a : phi) a *= static_cast<double>(g.n);

    for (std::size_t i = 0; i < g.n; ++i) {
        const double ph = eng.k_carrier * g.x(i);
        s.psi[i] = cplx{std::cos(ph), std::sin(ph)} * (1.0 + phi[i]);
    }
    return s;
}

double sampled_density_variance(const EnsembleConfig& cfg) {
    const Grid1D g = cfg.base.make_grid();
    const double kcut = cfg.k_cut > 0.0 ? cfg.k_cut : 0.5 * kPi / g.dx;
    double acc = 0.0;
    const auto jmax = static_cast<std::ptrdiff_t>(g.n / 2);
    for (std::ptrdiff_t j = -jmax + 1; j < jmax; ++j) {
        if (j == 0) continue;
        const double k = 2.0 * kPi * static_cast<double>(j) / g.length;
        if (std::fabs(k) > kcut) continue;
        const double ek = 0.5 * k * k;
        acc += ek / std::sqrt(ek * (ek + 2.0)); // static structure factor
    }
    return acc / g.length;
}

EnsembleStats run_ensemble(const EnsembleConfig& cfg, std::size_t workers) {
    cfg.validate();
    const QuenchEngine eng = QuenchEngine::make(cfg.base);
    const Grid1D& g = eng.grid;

    EnsembleStats stats;
    stats.idx = subgrid_indices(g, cfg.obs_window, cfg.obs_stride);
    for (const auto i : stats.idx) stats.xs.push_back(g.x(i));
    for (double t = cfg.base.transient_cut; t <= cfg.base.t_max + 1e-9; t += cfg.out_dt)
        stats.times.push_back(t);
    const std::size_t n_times = stats.times.size();
    const std::size_t nsub = stats.idx.size();
    stats.n_traj = cfg.n_traj;
    stats.norm_scale = cfg.noise == NoiseKind::Quantum ? cfg.n0_xi : 1.0;

    std::vector<std::vector<double>> mean(n_times, std::vector<double>(nsub, 0.0));
    std::vector<Eigen::MatrixXd> second(n_times, Eigen::MatrixXd::Zero(nsub, nsub));

    // trajectories are computed in parallel blocks and merged in index order
    const std::size_t block = 16;
    std::vector<std::vector<std::vector<double>>> rows(block); // [slot][time][subgrid]
    std::vector<char> ok(block);
    std::size_t done = 0, dropped = 0;

    const auto out_steps = static_cast<std::size_t>(std::llround(cfg.out_dt / cfg.base.dt));
    const auto cut_steps =
        static_cast<std::size_t>(std::llround(cfg.base.transient_cut / cfg.base.dt));

    while (done < cfg.n_traj) {
        const std::size_t batch = std::min(block, cfg.n_traj - done);
        parallel_for(batch, [&](std::size_t slot) {
            const std::size_t traj = done + slot;
            std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ull * (traj + 1))));
            auto& local = rows[slot];
            local.assign(n_times, std::vector<double>(nsub, 0.0));
            ok[slot] = 1;
            try {
                SplitStepper stepper(g, eng.barrier, eng.k_offset, eng.sponge);
                FieldState s = sample_initial(eng, cfg, rng);
                stepper.advance(s, cfg.base.dt, cut_steps);
                for (std::size_t ti = 0; ti < n_times; ++ti) {
                    if (ti > 0) stepper.advance(s, cfg.base.dt, out_steps);
                    for (std::size_t a = 0; a < nsub; ++a)
                        local[ti][a] = std::norm(s.psi[stats.idx[a]]);
                }
            } catch (const NumericalError&) {
                ok[slot] = 0;
            }
        }, workers);
        for (std::size_t slot = 0; slot < batch; ++slot) {
            if (!ok[slot]) {
                ++dropped;
                continue;
            }
            for (std::size_t ti = 0; ti < n_times; ++ti) {
                const auto& r = rows[slot][ti];
                auto& m = mean[ti];
                auto& q = second[ti];
                for (std::size_t a = 0; a < nsub; ++a) {
                    m[a] += r[a];
                    for (std::size_t b = a; b < nsub; ++b)
                        q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                            r[a] * r[b];
                }
            }
        }
        done += batch;
    }

    stats.n_dropped = dropped;
    const std::size_t kept = cfg.n_traj - dropped;
    if (kept * 100 < cfg.n_traj * 99)
        throw NumericalError("run_ensemble: " + std::to_string(dropped) +
                             " trajectories dropped (more than 1%)");
    if (kept == 0) throw NumericalError("run_ensemble: all trajectories dropped");

    const double inv = 1.0 / static_cast<double>(kept);
    stats.mean_density.assign(n_times, std::vector<double>(nsub, 0.0));
    stats.corr.assign(n_times, Eigen::MatrixXd::Zero(nsub, nsub));
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        for (std::size_t a = 0; a < nsub; ++a) stats.mean_density[ti][a] = mean[ti][a] * inv;
        auto& gmat = stats.corr[ti];
        for (std::size_t a = 0; a < nsub; ++a)
            for (std::size_t b = a; b < nsub; ++b) {
                const double cov =
                    second[ti](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * inv -
                    stats.mean_density[ti][a] * stats.mean_density[ti][b];
                gmat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    cov * stats.norm_scale;
                gmat(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
                    gmat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
    }
    return stats;
}

MeanFieldReference mean_field_reference(const EnsembleConfig& cfg) {
    QuenchConfig qc = cfg.base;
    qc.record_from = -1.0;
    const QuenchEngine eng = QuenchEngine::make(qc);
    const Grid1D& g = eng.grid;
    const auto idx = subgrid_indices(g, cfg.obs_window, cfg.obs_stride);

    SplitStepper stepper(g, eng.barrier, eng.k_offset, eng.sponge);
    FieldState s = eng.initial_plane_wave();
    const auto out_steps = static_cast<std::size_t>(std::llround(cfg.out_dt / qc.dt));
    const auto cut_steps = static_cast<std::size_t>(std::llround(qc.transient_cut / qc.dt));
    stepper.advance(s, qc.dt, cut_steps);

    std::vector<double> times;
    std::vector<std::vector<double>> dens;
    for (double t = qc.transient_cut; t <= qc.t_max + 1e-9; t += cfg.out_dt) {
        if (!times.empty()) stepper.advance(s, qc.dt, out_steps);
        times.push_back(s.t);
        std::vector<double> row(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) row[a] = std::norm(s.psi[idx[a]]);
        dens.push_back(std::move(row));
    }

    MeanFieldReference ref;
    for (std::size_t j = 1; j + 1 < times.size(); ++j) {
        ref.times.push_back(times[j]);
        ref.density.push_back(dens[j]);
        std::vector<double> dd(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            dd[a] = (dens[j + 1][a] - dens[j - 1][a]) / (2.0 * cfg.out_dt);
        ref.d_density_dt.push_back(std::move(dd));
    }
    return ref;
}

std::vector<double> correlation_trace(const EnsembleStats& stats, double x) {
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t i = 1; i < stats.xs.size(); ++i) {
        if (std::fabs(stats.xs[i] - x) < std::fabs(stats.xs[best_a] - x)) best_a = i;
        if (std::fabs(stats.xs[i] + x) < std::fabs(stats.xs[best_b] + x)) best_b = i;
    }
    std::vector<double> out(stats.times.size());
    for (std::size_t ti = 0; ti < stats.times.size(); ++ti)
        out[ti] = stats.corr[ti](static_cast<Eigen::Index>(best_a),
                                 static_cast<Eigen::Index>(best_b));
    return out;
}

namespace {

struct Quadratic {
    double a, b, c, r2;
};

Quadratic quad_fit(const std::vector<double>& t, const std::vector<double>& y) {
    const auto m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd X(m, 3);
    Eigen::VectorXd Y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        X(i, 0) = ti * ti;
        X(i, 1) = ti;
        X(i, 2) = 1.0;
        Y(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d beta = X.colPivHouseholderQr().solve(Y);
    const Eigen::VectorXd resid = Y - X * beta;
    const double ymean = Y.mean();
    const double ss_tot = (Y.array() - ymean).square().sum();
    const double r2 = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
    return {beta(0), beta(1), beta(2), r2};
}

} // namespace

FngFit fit_fng(const EnsembleStats& stats, const MeanFieldReference& ref, double period,
               double fit_from) {
    if (ref.times.empty()) throw ConfigError("fit_fng: empty reference");
    if (stats.times.back() - fit_from < 3.0 * period)
        throw WindowTooShortError("fit_fng: fewer than 3 oscillation periods in the fit window");

    FngFit fit;
    const auto nsub = static_cast<Eigen::Index>(stats.xs.size());
    Eigen::MatrixXd rrt(nsub, nsub);
    double last_resid = 0.0;
    for (std::size_t j = 0; j < ref.times.size(); ++j) {
        const double t = ref.times[j];
        if (t < fit_from) continue;
        // locate the matching ensemble output time
        const auto ti = static_cast<std::size_t>(
            std::llround((t - stats.times.front()) / (stats.times[1] - stats.times[0])));
        if (ti >= stats.times.size() || std::fabs(stats.times[ti] - t) > 1e-6) continue;
        const auto& r = ref.d_density_dt[j];
        for (Eigen::Index a = 0; a < nsub; ++a)
            for (Eigen::Index b = 0; b < nsub; ++b)
                rrt(a, b) = r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
        const double denom = rrt.squaredNorm();
        if (denom <= 0.0) continue;
        const double A = stats.corr[ti].cwiseProduct(rrt).sum() / denom;
        fit.times.push_back(t);
        fit.amplitude.push_back(A);
        const double gn = stats.corr[ti].norm();
        last_resid = gn > 0.0 ? (stats.corr[ti] - A * rrt).norm() / gn : 0.0;
    }
    if (fit.times.size() < 8) throw WindowTooShortError("fit_fng: too few usable output times");
    const Quadratic q = quad_fit(fit.times, fit.amplitude);
    fit.a = q.a;
    fit.b = q.b;
    fit.c = q.c;
    fit.r2 = q.r2;
    fit.rank1_residual_final = last_resid;
    return fit;
}

EnvelopeFit quadratic_envelope_fit(const std::vector<double>& t, const std::vector<double>& y,
                                   double period, double fit_from) {
    if (t.size() != y.size() || t.size() < 8)
        throw ConfigError("quadratic_envelope_fit: series too short");
    EnvelopeFit fit;
    double w0 = fit_from;
    while (w0 + period <= t.back() + 1e-9) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < w0 || t[i] >= w0 + period) continue;
            if (!any) {
                lo = hi = y[i];
                any = true;
            } else {
                lo = std::min(lo, y[i]);
                hi = std::max(hi, y[i]);
            }
        }
        if (any) {
            fit.t_centers.push_back(w0 + 0.5 * period);
            fit.amplitude.push_back(0.5 * (hi - lo));
        }
        w0 += period;
    }
    if (fit.t_centers.size() < 4)
        throw WindowTooShortError("quadratic_envelope_fit: fewer than 4 periods in the window");
    const Quadratic q = quad_fit(fit.t_centers, fit.amplitude);
    fit.a = q.a;
    fit.b = q.b;
    fit.c = q.c;
    fit.r2 = q.r2;
    return fit;
}

double rank1_dominance(const Eigen::MatrixXd& g) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    const auto& s = svd.singularValues();
    if (s.size() < 2 || s(1) == 0.0) return 0.0;
    return s(0) / s(1);
}

double cosine_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.cwiseProduct(b).sum() / (na * nb);
}

} // namespace fng
