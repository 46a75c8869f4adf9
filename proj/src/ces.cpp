#include "fng/ces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fng/errors.hpp"
#include "fng/fft.hpp"
#include "fng/threads.hpp"
#include "fng/tolerances.hpp"

namespace fng {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

std::size_t nearest_index(const Grid1D& g, double x) {
    const double pos = (x + 0.5 * g.length) / g.dx;
    auto i = static_cast<std::ptrdiff_t>(std::llround(pos));
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    i = ((i % n) + n) % n;
    return static_cast<std::size_t>(i);
}
} // namespace

void QuenchConfig::validate() const {
    if (!(v > 0.0 && v < 1.0))
        throw ConfigError("quench: v must satisfy 0 < v < 1 (subsonic inflow)");
    if (!(Z > 0.0)) throw ConfigError("quench: Z must be positive");
    if (!(L > 0.0) || n == 0) throw ConfigError("quench: invalid box");
    if (!(dt > 0.0) || !(t_max > 0.0)) throw ConfigError("quench: invalid time stepping");
    if (!(transient_cut < t_max)) throw ConfigError("quench: transient_cut must be < t_max");
    if (std::fabs(probe_x) > 0.5 * L || std::fabs(probe2_x) > 0.5 * L)
        throw ConfigError("quench: probe outside the box");
}

QuenchEngine QuenchEngine::make(const QuenchConfig& cfg) {
    cfg.validate();
    QuenchEngine e{Grid1D(cfg.L, cfg.n), Potential{}, RestoringSponge{}, 0.0, 0.0, 0.0};
    const double dk_grid = 2.0 * kPi / cfg.L;
    e.k_carrier = dk_grid * std::round(cfg.v / dk_grid);
    e.k_offset = cfg.v - e.k_carrier;
    e.mu_ref = 0.5 * cfg.v * cfg.v + 1.0;
    e.barrier = gaussian_barrier(e.grid, cfg.Z, 0.0, cfg.barrier_sigma);
    e.sponge = RestoringSponge::edges(e.grid, cfg.sponge_width_frac, cfg.sponge_gamma,
                                      /*amp=*/1.0, e.k_carrier, e.mu_ref);
    return e;
}

FieldState QuenchEngine::initial_plane_wave() const {
    FieldState s;
    s.t = 0.0;
    s.k_offset = k_offset;
    s.psi.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double ph = k_carrier * grid.x(i);
        s.psi[i] = cplx{std::cos(ph), std::sin(ph)};
    }
    return s;
}

Classification classify_series(const std::vector<double>& t, const std::vector<double>& d,
                               double transient_cut) {
    if (t.size() != d.size() || t.size() < 16)
        throw ConfigError("classify_series: series too short");
    std::size_t i0 = 0;
    while (i0 < t.size() && t[i0] < transient_cut) ++i0;
    if (t.size() - i0 < 16) throw ConfigError("classify_series: window after cut too short");

    // sustained oscillation amplitude over the last quarter of the run
    const std::size_t tail0 = i0 + (t.size() - i0) * 3 / 4;
    double lo = d[tail0], hi = d[tail0], mean = 0.0;
    for (std::size_t i = tail0; i < d.size(); ++i) {
        lo = std::min(lo, d[i]);
        hi = std::max(hi, d[i]);
        mean += d[i];
    }
    mean /= static_cast<double>(d.size() - tail0);
    Classification out;
    out.amplitude = 0.5 * (hi - lo) / std::max(mean, 1e-300);

    // Hann-windowed periodogram of the demeaned series after the cut
    const std::size_t m = t.size() - i0;
    std::size_t npad = 1;
    while (npad < 2 * m) npad <<= 1;
    std::vector<cplx> buf(npad, 0.0);
    double wmean = 0.0;
    for (std::size_t i = i0; i < d.size(); ++i) wmean += d[i];
    wmean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (m - 1));
        buf[i] = (d[i0 + i] - wmean) * hann;
    }
    Fft fft(npad);
    fft.forward(buf.data());
    const double dt_s = t[1] - t[0];
    std::vector<double> power(npad / 2);
    for (std::size_t j = 1; j < npad / 2; ++j) power[j] = std::norm(buf[j]);
    std::vector<double> sorted(power.begin() + 1, power.end());
    std::sort(sorted.begin(), sorted.end());
    const double floor_med = sorted[sorted.size() / 2];
    std::size_t jpk = 1;
    for (std::size_t j = 2; j < power.size(); ++j)
        if (power[j] > power[jpk]) jpk = j;
    out.has_peak = power[jpk] > Tol::ces_peak_factor * std::max(floor_med, 1e-300);

    if (out.has_peak && jpk + 1 < power.size() && jpk >= 1) {
        // quadratic interpolation on log power around the peak bin
        const double pl = std::log(std::max(power[jpk - 1], 1e-300));
        const double pc = std::log(power[jpk]);
        const double pr = std::log(std::max(power[jpk + 1], 1e-300));
        double shift = 0.5 * (pl - pr) / (pl - 2.0 * pc + pr);
        if (!std::isfinite(shift) || std::fabs(shift) > 0.5) shift = 0.0;
        out.omega = 2.0 * kPi * (static_cast<double>(jpk) + shift) /
                    (static_cast<double>(npad) * dt_s);
    }

    if (out.amplitude >= Tol::ces_amp_hi && out.has_peak) {
        out.kind = QuenchKind::CES;
    } else if (out.amplitude < Tol::ces_amp_lo) {
        out.kind = QuenchKind::GS;
        out.omega = 0.0;
    } else {
        // guard band, or a large amplitude without an isolated peak
        out.kind = out.amplitude >= Tol::ces_amp_hi ? QuenchKind::CES : QuenchKind::GS;
        out.inconclusive = true;
    }
    return out;
}

double refine_frequency(const std::vector<double>& t, const std::vector<double>& d,
                        double omega0, double t_from) {
    std::size_t i0 = 0;
    while (i0 < t.size() && t[i0] < t_from) ++i0;
    const std::size_t m = t.size() - i0;
    if (m < 32 || omega0 <= 0.0) return omega0;
    const std::size_t half = m / 2;
    auto coeff = [&](std::size_t from, std::size_t count) {
        cplx acc = 0.0;
        double mean = 0.0;
        for (std::size_t i = 0; i < count; ++i) mean += d[from + i];
        mean /= static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i)
            acc += (d[from + i] - mean) * std::exp(-kI * (omega0 * t[from + i]));
        return acc;
    };
    const cplx c1 = coeff(i0, half);
    const cplx c2 = coeff(i0 + half, m - half);
    if (std::abs(c1) == 0.0 || std::abs(c2) == 0.0) return omega0;
    const double dphase = std::arg(c2 / c1);
    const double dt_centers = (t[i0 + half] + t[t.size() - 1]) / 2.0 - (t[i0] + t[i0 + half - 1]) / 2.0;
    return omega0 + dphase / dt_centers;
}

QuenchResult run_quench(const QuenchConfig& cfg) {
    const QuenchEngine eng = QuenchEngine::make(cfg);
    SplitStepper stepper(eng.grid, eng.barrier, eng.k_offset, eng.sponge);
    FieldState s = eng.initial_plane_wave();

    const std::size_t ip1 = nearest_index(eng.grid, cfg.probe_x);
    const std::size_t ip2 = nearest_index(eng.grid, cfg.probe2_x);
    const double x1 = eng.grid.x(ip1);

    auto out_steps = static_cast<std::size_t>(std::llround(cfg.out_dt / cfg.dt));
    if (out_steps == 0) out_steps = 1;
    const auto n_out = static_cast<std::size_t>(std::floor(cfg.t_max / (cfg.dt * out_steps)));

    const double record_dt = cfg.record_dt > 0.0 ? cfg.record_dt : 4.0 * cfg.dt;
    auto rec_steps = static_cast<std::size_t>(std::llround(record_dt / cfg.dt));
    if (rec_steps == 0) rec_steps = 1;

    QuenchResult res;
    auto push_probe = [&](const FieldState& state) {
        res.probe.t.push_back(state.t);
        res.probe.n_probe.push_back(std::norm(state.psi[ip1]));
        res.probe.n_probe2.push_back(std::norm(state.psi[ip2]));
        res.probe.phase_probe.push_back(std::arg(state.psi[ip1]) + state.k_offset * x1);
    };
    push_probe(s);

    const bool recording = cfg.record_from >= 0.0;
    res.snap_dt = cfg.dt * static_cast<double>(rec_steps);

    std::size_t steps_done = 0;
    const auto total_steps = n_out * out_steps;
    while (steps_done < total_steps) {
        std::size_t chunk = out_steps - (steps_done % out_steps);
        if (recording && s.t + 1e-9 >= cfg.record_from) chunk = std::min(chunk, rec_steps);
        chunk = std::min(chunk, total_steps - steps_done);
        stepper.advance(s, cfg.dt, chunk);
        steps_done += chunk;
        if (recording && s.t + 1e-9 >= cfg.record_from) {
            if (res.snaps.empty() ||
                std::llround((s.t - res.snaps.back().t) / cfg.dt) >= static_cast<long>(rec_steps))
                res.snaps.push_back(s);
        }
        if (steps_done % out_steps == 0) push_probe(s);
    }
    res.final_state = s;

    const Classification cls = classify_series(res.probe.t, res.probe.n_probe, cfg.transient_cut);
    res.kind = cls.kind;
    res.inconclusive = cls.inconclusive;
    res.amplitude = cls.amplitude;
    if (cls.kind == QuenchKind::CES && cls.omega > 0.0) {
        res.omega = refine_frequency(res.probe.t, res.probe.n_probe, cls.omega, cfg.transient_cut);
        res.period = 2.0 * kPi / res.omega;
        const Classification cls2 =
            classify_series(res.probe.t, res.probe.n_probe2, cfg.transient_cut);
        res.omega2 = cls2.omega > 0.0
                         ? refine_frequency(res.probe.t, res.probe.n_probe2, cls2.omega,
                                            cfg.transient_cut)
                         : 0.0;
    }

    // chemical potential from the unwrapped phase slope at the probe over the
    // last five periods (CES) or the last quarter of the run (GS)
    {
        const double span = res.period > 0.0 ? 5.0 * res.period
                                             : 0.25 * (cfg.t_max - cfg.transient_cut);
        const double t_from = res.probe.t.back() - span;
        std::vector<double> tt, ph;
        double acc = 0.0, prev = 0.0;
        bool started = false;
        for (std::size_t i = 0; i < res.probe.t.size(); ++i) {
            const double raw = res.probe.phase_probe[i];
            if (!started) {
                acc = raw;
                prev = raw;
                started = true;
            } else {
                double delta = raw - prev;
                while (delta > kPi) delta -= 2.0 * kPi;
                while (delta < -kPi) delta += 2.0 * kPi;
                acc += delta;
                prev = raw;
            }
            if (res.probe.t[i] >= t_from) {
                tt.push_back(res.probe.t[i]);
                ph.push_back(acc);
            }
        }
        // least-squares slope
        const auto msz = static_cast<double>(tt.size());
        double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0;
        for (std::size_t i = 0; i < tt.size(); ++i) {
            st += tt[i];
            sp += ph[i];
            stt += tt[i] * tt[i];
            stp += tt[i] * ph[i];
        }
        const double slope = (msz * stp - st * sp) / (msz * stt - st * st);
        res.mu_probe = -slope;
    }
    return res;
}

std::vector<ScanCell> scan_phase_diagram(const std::vector<double>& Zs,
                                         const std::vector<double>& vs,
                                         const QuenchConfig& tmpl, std::size_t workers) {
    std::vector<ScanCell> cells(Zs.size() * vs.size());
    parallel_for(cells.size(), [&](std::size_t idx) {
        const double Z = Zs[idx / vs.size()];
        const double v = vs[idx % vs.size()];
        QuenchConfig cfg = tmpl;
        cfg.Z = Z;
        cfg.v = v;
        cfg.record_from = -1.0;
        const QuenchResult r = run_quench(cfg);
        cells[idx] = {Z, v, r.kind, r.inconclusive, r.omega, r.amplitude};
    }, workers);
    return cells;
}

namespace {

Classification classify_at(char axis, double fixed, double val, const QuenchConfig& tmpl) {
    QuenchConfig cfg = tmpl;
    cfg.record_from = -1.0;
    if (axis == 'v') {
        cfg.Z = fixed;
        cfg.v = val;
    } else {
        cfg.v = fixed;
        cfg.Z = val;
    }
    for (int attempt = 0; attempt < 3; ++attempt) {
        const QuenchResult r = run_quench(cfg);
        if (!r.inconclusive) {
            Classification c;
            c.kind = r.kind;
            c.omega = r.omega;
            c.amplitude = r.amplitude;
            c.inconclusive = false;
            return c;
        }
        cfg.t_max *= 2.0; // critical slowing near the boundary
    }
    Classification c;
    c.inconclusive = true;
    QuenchConfig last = cfg;
    const QuenchResult r = run_quench(last);
    c.kind = r.amplitude >= 1e-3 ? QuenchKind::CES : QuenchKind::GS;
    c.amplitude = r.amplitude;
    c.omega = r.omega;
    return c;
}

} // namespace

double bisect_boundary(char axis, double fixed, double lo, double hi,
                       const QuenchConfig& tmpl, double resolution) {
    if (axis != 'v' && axis != 'Z') throw ConfigError("bisect_boundary: axis must be 'v' or 'Z'");
    Classification clo = classify_at(axis, fixed, lo, tmpl);
    Classification chi = classify_at(axis, fixed, hi, tmpl);
    if (clo.kind != QuenchKind::GS || chi.kind != QuenchKind::CES)
        throw NoSolutionError("bisect_boundary: endpoints do not bracket the boundary");
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        const Classification c = classify_at(axis, fixed, mid, tmpl);
        if (c.kind == QuenchKind::CES)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& delta_omega) {
    if (delta_omega.size() < 6)
        throw InsufficientRangeError("fit_power_law: need at least 6 samples");
    double dmin = delta_omega.front().first, dmax = dmin;
    for (const auto& [d, w] : delta_omega) {
        (void)w;
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (!(dmin > 0.0) || dmax / dmin < 10.0)
        throw InsufficientRangeError("fit_power_law: samples must span at least one decade");

    const auto m = static_cast<double>(delta_omega.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [d, w] : delta_omega) {
        const double x = std::log(d), y = std::log(w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    PowerLawFit fit;
    const double denom = m * sxx - sx * sx;
    fit.exponent = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / m;
    fit.prefactor = std::exp(intercept);

    double ss_res = 0.0, ss_tot = 0.0;
    const double ymean = sy / m;
    for (const auto& [d, w] : delta_omega) {
        const double y = std::log(w);
        const double yhat = intercept + fit.exponent * std::log(d);
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ymean) * (y - ymean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (delta_omega.size() > 2) {
        const double var = ss_res / (m - 2.0);
        fit.exponent_stderr = std::sqrt(var * m / denom);
    }
    return fit;
}

double optimal_gibbs_mu(const Grid1D& g, const FieldState& first, const FieldState& last,
                        double T, double mu_hint) {
    (void)g;
    cplx c = 0.0;
    for (std::size_t i = 0; i < first.psi.size(); ++i)
        c += std::conj(first.psi[i]) * last.psi[i];
    // || exp(i mu T) psi_b - psi_a ||^2 is minimal at mu T = -arg(c) mod 2pi
    const double base = -std::arg(c) / T;
    const double step = 2.0 * kPi / T;
    const double k = std::round((mu_hint - base) / step);
    return base + k * step;
}

FloquetCharges floquet_charge(const Grid1D& g, const std::vector<FieldState>& snaps,
                              double snap_dt, double mu, double omega, const Potential& V) {
    if (snaps.size() < 5) throw ConfigError("floquet_charge: too few snapshots");
    const double span = snaps.back().t - snaps.front().t;
    const double T = 2.0 * kPi / omega;
    if (std::fabs(span - T) > 0.01 * T)
        throw PeriodMismatchError("floquet_charge: window " + std::to_string(span) +
                                  " deviates from the period " + std::to_string(T) +
                                  " by more than 1%");
    const double t_ref = snaps.front().t;
    const std::size_t n = g.n;

    // Gibbs-frame field at snapshot j
    auto frame = [&](std::size_t j, std::vector<cplx>& out) {
        const double ph = mu * (snaps[j].t - t_ref);
        const cplx rot{std::cos(ph), std::sin(ph)};
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = rot * snaps[j].psi[i];
    };

    std::vector<cplx> prev(n), cur(n), next(n);
    FloquetCharges out;
    double f_acc = 0.0;
    std::size_t f_count = 0;
    for (std::size_t j = 1; j + 1 < snaps.size(); ++j) {
        frame(j - 1, prev);
        frame(j + 1, next);
        frame(j, cur);
        cplx val = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx dpsi_dt = (next[i] - prev[i]) / (2.0 * snap_dt);
            val += std::conj(cur[i]) * kI * dpsi_dt;
        }
        f_acc += val.real() * g.dx;
        ++f_count;
    }
    out.F = f_acc / (static_cast<double>(f_count) * omega);

    double e_acc = 0.0, n_acc = 0.0;
    for (const auto& s : snaps) {
        const Charges c = observables(g, s, V);
        e_acc += c.e;
        n_acc += c.n;
    }
    out.E = e_acc / static_cast<double>(snaps.size());
    out.n_mean = n_acc / static_cast<double>(snaps.size());
    const double e0 = observables(g, snaps.front(), V).e;
    const double e1 = observables(g, snaps.back(), V).e;
    out.e_drift = std::fabs(e1 - e0) / std::fabs(out.E);
    out.I = out.E - omega * out.F;
    return out;
}

} // namespace fng
