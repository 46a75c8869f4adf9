#include "fng/modes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fng/errors.hpp"
#include "fng/tolerances.hpp"

namespace fng {

namespace {
constexpr cplx kI{0.0, 1.0};
}

BdGSpinor conjugate_spinor(const BdGSpinor& z) {
    BdGSpinor out;
    out.t = z.t;
    out.u.resize(z.v.size());
    out.v.resize(z.u.size());
    for (std::size_t i = 0; i < z.v.size(); ++i) out.u[i] = std::conj(z.v[i]);
    for (std::size_t i = 0; i < z.u.size(); ++i) out.v[i] = std::conj(z.u[i]);
    return out;
}

cplx symplectic_product(const Grid1D& g, const BdGSpinor& a, const BdGSpinor& b) {
    if (a.u.size() != g.n || b.u.size() != g.n)
        throw ConfigError("symplectic_product: grid mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        acc += std::conj(a.u[i]) * b.u[i] - std::conj(a.v[i]) * b.v[i];
    return acc * g.dx;
}

double spinor_l2(const Grid1D& g, const BdGSpinor& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) acc += std::norm(z.u[i]) + std::norm(z.v[i]);
    return std::sqrt(acc * g.dx);
}

BdGOperator::BdGOperator(const Grid1D& g, FieldState background, Potential V, double mu,
                         double flow_v, bool check_stationary)
    : grid_(g), bg_(std::move(background)), pot_(std::move(V)), mu_(mu), flow_v_(flow_v),
      fft_(g.n) {
    if (bg_.psi.size() != g.n || pot_.v.size() != g.n)
        throw ConfigError("BdGOperator: size mismatch");
    if (check_stationary) {
        const double r = gpg_residual(grid_, bg_, pot_, mu_, flow_v_);
        if (!(r < Tol::stationary_residual))
            throw NumericalError("BdGOperator: background is not stationary, residual=" +
                                 std::to_string(r));
    }
}

void BdGOperator::apply(const BdGSpinor& in, BdGSpinor& out) const {
    const std::size_t n = grid_.n;
    if (in.u.size() != n || in.v.size() != n) throw ConfigError("BdGOperator: spinor mismatch");
    out.u.assign(in.u.begin(), in.u.end());
    out.v.assign(in.v.begin(), in.v.end());
    // kinetic + flow symbols act in Fourier space; the carrier offset shifts
    // the wavenumber oppositely in the two components
    const double dk = bg_.k_offset;
    fft_.forward(out.u.data());
    fft_.forward(out.v.data());
    for (std::size_t j = 0; j < n; ++j) {
        const double ku = grid_.k[j] + dk;
        const double kv = grid_.k[j] - dk;
        out.u[j] *= 0.5 * ku * ku - flow_v_ * ku;
        out.v[j] *= -(0.5 * kv * kv + flow_v_ * kv);
    }
    fft_.inverse(out.u.data());
    fft_.inverse(out.v.data());
    for (std::size_t i = 0; i < n; ++i) {
        const cplx w = pot_.v[i] + 2.0 * std::norm(bg_.psi[i]) - mu_;
        const cplx a = bg_.psi[i] * bg_.psi[i];
        out.u[i] += w * in.u[i] + a * in.v[i];
        out.v[i] += -std::conj(a) * in.u[i] - std::conj(w) * in.v[i];
    }
    out.t = in.t;
}

BdGSpinor BdGOperator::apply(const BdGSpinor& in) const {
    BdGSpinor out;
    apply(in, out);
    return out;
}

Eigen::MatrixXcd BdGOperator::dense() const {
    const std::size_t n = grid_.n;
    Eigen::MatrixXcd m(2 * n, 2 * n);
    BdGSpinor e = BdGSpinor::zero(n), col;
    for (std::size_t j = 0; j < 2 * n; ++j) {
        auto& slot = j < n ? e.u[j] : e.v[j - n];
        slot = 1.0;
        apply(e, col);
        slot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col.u[i];
            m(static_cast<Eigen::Index>(i + n), static_cast<Eigen::Index>(j)) = col.v[i];
        }
    }
    return m;
}

BdGSpectrum bogoliubov_spectrum(const BdGOperator& op) {
    const Grid1D& g = op.grid();
    const std::size_t n = g.n;
    const Eigen::MatrixXcd m = op.dense();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("bogoliubov_spectrum: eigensolver failed");

    const double scale = m.cwiseAbs().maxCoeff();
    BdGSpectrum out;
    out.modes.reserve(2 * n);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(2 * n); ++j) {
        ModePair mp;
        mp.eps = solver.eigenvalues()(j);
        mp.z = BdGSpinor::zero(n);
        for (std::size_t i = 0; i < n; ++i) {
            mp.z.u[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), j);
            mp.z.v[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i + n), j);
        }
        mp.unstable = std::fabs(mp.eps.imag()) > Tol::instability_im * std::max(1.0, scale);
        const double l2 = spinor_l2(g, mp.z);
        const double s = symplectic_product(g, mp.z, mp.z).real();
        if (!mp.unstable && std::fabs(s) > 1e-8 * l2 * l2) {
            const double f = 1.0 / std::sqrt(std::fabs(s));
            for (auto& a : mp.z.u) a *= f;
            for (auto& a : mp.z.v) a *= f;
            mp.norm_sign = s > 0.0 ? 1.0 : -1.0;
        }
        if (mp.unstable) ++out.n_unstable;
        out.modes.push_back(std::move(mp));
    }
    std::sort(out.modes.begin(), out.modes.end(), [](const ModePair& a, const ModePair& b) {
        if (a.eps.real() != b.eps.real()) return a.eps.real() < b.eps.real();
        return a.eps.imag() < b.eps.imag();
    });
    return out;
}

namespace {

// Self-conjugate spinor from a complex field: z = (f, f*).
BdGSpinor self_conjugate(const std::vector<cplx>& f) {
    BdGSpinor z;
    z.u = f;
    z.v.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) z.v[i] = std::conj(f[i]);
    return z;
}

std::vector<cplx> spectral_derivative(const Grid1D& g, const std::vector<cplx>& f) {
    std::vector<cplx> out(f);
    Fft fft(g.n);
    fft.forward(out.data());
    for (std::size_t j = 0; j < g.n; ++j) out[j] *= kI * g.k[j];
    fft.inverse(out.data());
    return out;
}

} // namespace

GoldstoneGibbsModes goldstone_gibbs_modes(const RingSpec& spec, const Grid1D& g,
                                          double h_n, double h_p) {
    if (std::fabs(g.length - spec.L) > 1e-12 * spec.L)
        throw ConfigError("goldstone_gibbs_modes: grid length must equal the ring length");
    if (h_n <= 0.0) h_n = 1e-4 * spec.nbar;
    if (h_p <= 0.0) h_p = 1e-4 * std::max(std::fabs(spec.pbar), spec.nbar / spec.L);

    GoldstoneGibbsModes out;
    out.base = solve_ring(spec);
    const FieldState psi0 = cnoidal_sample(out.base, g);

    std::vector<cplx> f(g.n);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = -kI * psi0.psi[i];
    out.z_theta = self_conjugate(f);

    const auto dpsi = spectral_derivative(g, psi0.psi);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = -dpsi[i];
    out.z_x = self_conjugate(f);

    auto fd_mode = [&](double dn, double dp, double dq) {
        RingSpec plus = spec, minus = spec;
        plus.nbar += dn;
        plus.pbar += dp;
        minus.nbar -= dn;
        minus.pbar -= dp;
        const auto sp = cnoidal_sample(solve_ring_near(plus, out.base.nu), g);
        const auto sm = cnoidal_sample(solve_ring_near(minus, out.base.nu), g);
        std::vector<cplx> d(g.n);
        for (std::size_t i = 0; i < g.n; ++i) d[i] = (sp.psi[i] - sm.psi[i]) / (2.0 * dq);
        return self_conjugate(d);
    };
    out.z_N = fd_mode(h_n, 0.0, h_n * spec.L);
    out.z_P = fd_mode(0.0, h_p, h_p * spec.L);

    const BdGSpinor* zs[4] = {&out.z_theta, &out.z_x, &out.z_N, &out.z_P};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            out.gram(a, b) = symplectic_product(g, *zs[a], *zs[b]);
    return out;
}

double berry_gibbs_curvature(const RingSpec& spec, const Grid1D& g, double h_n, double h_p,
                             double gauge_shift_c) {
    if (h_n <= 0.0) h_n = 1e-4 * spec.nbar;
    if (h_p <= 0.0) h_p = 1e-4 * std::max(std::fabs(spec.pbar), spec.nbar / spec.L);
    const CnoidalParams base = solve_ring(spec);

    // density and continuous phase of the family member at (nbar, pbar),
    // with an optional charge-dependent translation of the profile
    auto profiles = [&](double nbar, double pbar, std::vector<double>& n_out,
                        std::vector<double>& eta_out) {
        RingSpec s = spec;
        s.nbar = nbar;
        s.pbar = pbar;
        const CnoidalParams p = solve_ring_near(s, base.nu);
        const double shift = gauge_shift_c * (nbar - spec.nbar) * spec.L;
        n_out.resize(g.n);
        eta_out.resize(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            const double x = g.x(i) - shift;
            n_out[i] = cnoidal_density(p, x);
            eta_out[i] = p.v * x + cnoidal_phase(p, x);
        }
    };

    std::vector<double> n_np, eta_np, n_nm, eta_nm, n_pp, eta_pp, n_pm, eta_pm;
    profiles(spec.nbar + h_n, spec.pbar, n_np, eta_np);
    profiles(spec.nbar - h_n, spec.pbar, n_nm, eta_nm);
    profiles(spec.nbar, spec.pbar + h_p, n_pp, eta_pp);
    profiles(spec.nbar, spec.pbar - h_p, n_pm, eta_pm);

    const double dN = 2.0 * h_n * spec.L;
    const double dP = 2.0 * h_p * spec.L;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double dn_dN = (n_np[i] - n_nm[i]) / dN;
        const double de_dN = (eta_np[i] - eta_nm[i]) / dN;
        const double dn_dP = (n_pp[i] - n_pm[i]) / dP;
        const double de_dP = (eta_pp[i] - eta_pm[i]) / dP;
        acc += de_dN * dn_dP - dn_dN * de_dP;
    }
    return acc * g.dx;
}

FloquetPropagator::FloquetPropagator(const Grid1D& g, const std::vector<FieldState>* snaps,
                                     double snap_dt, double t_ref, Potential V, double mu,
                                     std::optional<std::vector<double>> sponge_gamma)
    : grid_(g), snaps_(snaps), snap_dt_(snap_dt), t_ref_(t_ref), pot_(std::move(V)), mu_(mu),
      gamma_(std::move(sponge_gamma)), fft_(g.n) {
    if (!snaps_ || snaps_->empty()) throw ConfigError("FloquetPropagator: empty trajectory");
    if (pot_.v.size() != g.n) throw ConfigError("FloquetPropagator: potential size mismatch");
}

void FloquetPropagator::background_at(double t, std::vector<cplx>& out) const {
    const double t0 = snaps_->front().t;
    const double pos = (t - t0) / snap_dt_;
    const auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    if (j < 0 || static_cast<std::size_t>(j) + 1 >= snaps_->size()) {
        if (j >= 0 && static_cast<std::size_t>(j) + 1 == snaps_->size() &&
            pos - static_cast<double>(j) < 1e-9) {
            out = snaps_->back().psi;
        } else {
            throw PeriodMismatchError("FloquetPropagator: background window does not cover t=" +
                                      std::to_string(t));
        }
    } else {
        const double frac = pos - static_cast<double>(j);
        const auto& a = (*snaps_)[static_cast<std::size_t>(j)].psi;
        const auto& b = (*snaps_)[static_cast<std::size_t>(j) + 1].psi;
        out.resize(grid_.n);
        for (std::size_t i = 0; i < grid_.n; ++i) out[i] = a[i] + frac * (b[i] - a[i]);
    }
    // rotate the stored lab-frame field into the multiplier frame
    const cplx phase = std::exp(kI * (mu_ * (t - t_ref_)));
    for (auto& a : out) a *= phase;
}

BdGSpinor FloquetPropagator::propagate(const BdGSpinor& z0, double t0, double duration,
                                       double dt) const {
    const std::size_t n = grid_.n;
    if (z0.u.size() != n) throw ConfigError("FloquetPropagator: spinor size mismatch");
    auto nsteps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-12));
    if (nsteps == 0) nsteps = 1;
    const double step = duration / static_cast<double>(nsteps);
    const double dk = snaps_->front().k_offset;

    std::vector<cplx> kin_u(n), kin_v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ku = grid_.k[j] + dk;
        const double kv = grid_.k[j] - dk;
        kin_u[j] = std::exp(-kI * (0.5 * ku * ku * step));
        kin_v[j] = std::exp(kI * (0.5 * kv * kv * step));
    }

    BdGSpinor z = z0;
    std::vector<cplx> bg(n);

    auto local_substep = [&](double tau, double t_local) {
        background_at(t_local, bg);
        for (std::size_t i = 0; i < n; ++i) {
            // exp(-i tau B) for B = [[w, a], [-a*, -w*]]: split off the trace
            // (pure imaginary, i Im w per diagonal), leaving the traceless
            // B0 = [[w0, a], [-a*, -w0]] with real w0 and B0^2 = (w0^2 - |a|^2) I
            const cplx w = pot_.v[i] + 2.0 * std::norm(bg[i]) - mu_;
            const cplx a = bg[i] * bg[i];
            const double w0 = w.real();
            const cplx s = std::sqrt(cplx(w0 * w0 - std::norm(a), 0.0));
            const cplx arg = s * tau;
            cplx c, snc; // cos(s tau) and sin(s tau)/s
            if (std::abs(arg) < 1e-8) {
                c = 1.0 - 0.5 * arg * arg;
                snc = tau * (1.0 - arg * arg / 6.0);
            } else {
                c = std::cos(arg);
                snc = std::sin(arg) / s;
            }
            const cplx pref = std::exp(w.imag() * tau); // exp(-i tau * i Im w)
            const cplx uu = z.u[i], vv = z.v[i];
            z.u[i] = pref * (c * uu - kI * snc * (w0 * uu + a * vv));
            z.v[i] = pref * (c * vv - kI * snc * (-std::conj(a) * uu - w0 * vv));
        }
        if (gamma_) {
            for (std::size_t i = 0; i < n; ++i) {
                if ((*gamma_)[i] == 0.0) continue;
                const double damp = std::exp(-(*gamma_)[i] * tau);
                z.u[i] *= damp;
                z.v[i] *= damp;
            }
        }
    };

    auto kinetic_substep = [&]() {
        fft_.forward(z.u.data());
        fft_.forward(z.v.data());
        for (std::size_t j = 0; j < n; ++j) {
            z.u[j] *= kin_u[j];
            z.v[j] *= kin_v[j];
        }
        fft_.inverse(z.u.data());
        fft_.inverse(z.v.data());
    };

    local_substep(0.5 * step, t0);
    for (std::size_t s = 0; s + 1 < nsteps; ++s) {
        kinetic_substep();
        local_substep(step, t0 + step * static_cast<double>(s + 1));
    }
    kinetic_substep();
    local_substep(0.5 * step, t0 + duration);
    z.t = z0.t + duration;

    for (const auto& a : z.u)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw NumericalError("FloquetPropagator: non-finite spinor");
    return z;
}

double windowed_diff(const Grid1D& g, const BdGSpinor& a, const BdGSpinor& ref, double window) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        if (std::fabs(g.x(i)) > window) continue;
        num += std::norm(a.u[i] - ref.u[i]) + std::norm(a.v[i] - ref.v[i]);
        den += std::norm(ref.u[i]) + std::norm(ref.v[i]);
    }
    return std::sqrt(num / den);
}

} // namespace fng
