#include "fng/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fng/errors.hpp"

namespace fng {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};
} // namespace

Grid1D::Grid1D(double L, std::size_t npoints) : length(L), n(npoints) {
    if (L <= 0.0) throw ConfigError("Grid1D: length must be positive");
    if (npoints == 0 || npoints % 2 != 0) throw ConfigError("Grid1D: point count must be even");
    dx = L / static_cast<double>(npoints);
    k.resize(npoints);
    const double dk = 2.0 * kPi / L;
    const std::size_t half = npoints / 2;
    for (std::size_t j = 0; j < npoints; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        k[j] = dk * static_cast<double>(j <= half ? sj : sj - static_cast<std::ptrdiff_t>(npoints));
    }
}

std::vector<double> Grid1D::xs() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

Potential gaussian_barrier(const Grid1D& g, double Z, double x0, double sigma) {
    if (sigma <= 0.0) sigma = 2.0 * g.dx;
    Potential pot = Potential::zero(g);
    const double amp = -Z / (sigma * std::sqrt(2.0 * kPi));
    for (std::size_t i = 0; i < g.n; ++i) {
        // minimal-image distance keeps the barrier periodic
        double d = g.x(i) - x0;
        d -= g.length * std::round(d / g.length);
        pot.v[i] = amp * std::exp(-0.5 * d * d / (sigma * sigma));
    }
    return pot;
}

RestoringSponge RestoringSponge::edges(const Grid1D& g, double width_frac, double gamma0,
                                       cplx amp, double k_ref, double mu_ref) {
    RestoringSponge sp;
    sp.amp = amp;
    sp.k_ref = k_ref;
    sp.mu_ref = mu_ref;
    sp.gamma.assign(g.n, 0.0);
    const double w = width_frac * g.length;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double d_lo = x - (-0.5 * g.length); // distance from left edge
        const double d_hi = (0.5 * g.length - g.dx) - x + g.dx;
        double s = 0.0;
        if (d_lo < w) s = std::cos(0.5 * kPi * d_lo / w);
        if (d_hi < w) s = std::max(s, std::cos(0.5 * kPi * d_hi / w));
        sp.gamma[i] = gamma0 * s * s;
    }
    return sp;
}

Charges observables(const Grid1D& g, const FieldState& s, const Potential& V) {
    Charges c;
    const std::size_t n = g.n;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::norm(s.psi[i]);
        c.n += d;
        c.e += V.v[i].real() * d + 0.5 * d * d;
    }
    std::vector<cplx> hat(s.psi);
    Fft fft(n);
    fft.forward(hat.data());
    const double spec_w = 1.0 / static_cast<double>(n);
    double p = 0.0, ke = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = g.k[j] + s.k_offset;
        const double w = std::norm(hat[j]) * spec_w;
        p += kj * w;
        ke += 0.5 * kj * kj * w;
    }
    c.n *= g.dx;
    c.p = p * g.dx;
    c.e = (c.e + ke) * g.dx;
    return c;
}

SplitStepper::SplitStepper(const Grid1D& g, Potential V, double k_offset,
                           std::optional<RestoringSponge> sponge)
    : grid_(g), pot_(std::move(V)), k_offset_(k_offset), sponge_(std::move(sponge)),
      fft_(std::make_unique<Fft>(g.n)) {
    if (pot_.v.size() != g.n) throw ConfigError("SplitStepper: potential size mismatch");
    for (const auto& v : pot_.v)
        if (v.imag() > 0.0) throw ConfigError("SplitStepper: absorbing part must be <= 0");
    if (sponge_ && sponge_->gamma.size() != g.n)
        throw ConfigError("SplitStepper: sponge size mismatch");
}

namespace {

void check_finite(const std::vector<cplx>& psi, std::size_t step) {
    double peak = 0.0;
    for (const auto& a : psi) {
        const double m = std::abs(a);
        if (!std::isfinite(m))
            throw NumericalError("split_step: non-finite field at step " + std::to_string(step));
        peak = std::max(peak, m);
    }
    if (!(peak < 1e12))
        throw NumericalError("split_step: field blew up at step " + std::to_string(step) +
                             ", max|psi|=" + std::to_string(peak));
}

} // namespace

void SplitStepper::advance(FieldState& s, double dt, std::size_t nsteps) const {
    if (nsteps == 0) return;
    if (s.psi.size() != grid_.n) throw ConfigError("split_step: state size mismatch");

    const std::size_t n = grid_.n;
    std::vector<cplx> kin_full(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = grid_.k[j] + k_offset_;
        kin_full[j] = std::exp(-kI * (0.5 * kj * kj * dt));
    }

    auto potential_substep = [&](double tau, double t_local) {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx w = pot_.v[i] + std::norm(s.psi[i]);
            s.psi[i] *= std::exp(-kI * w * tau);
        }
        if (sponge_) {
            const auto& sp = *sponge_;
            for (std::size_t i = 0; i < n; ++i) {
                if (sp.gamma[i] == 0.0) continue;
                const cplx ref = sp.amp * std::exp(kI * (sp.k_ref * grid_.x(i) - sp.mu_ref * t_local));
                s.psi[i] = ref + (s.psi[i] - ref) * std::exp(-sp.gamma[i] * tau);
            }
        }
    };

    auto kinetic_substep = [&]() {
        fft_->forward(s.psi.data());
        for (std::size_t j = 0; j < n; ++j) s.psi[j] *= kin_full[j];
        fft_->inverse(s.psi.data());
    };

    // Strang composition with merged interior half-steps:
    // V(dt/2) [K(dt) V(dt)]^{n-1} K(dt) V(dt/2)
    const double t0 = s.t;
    potential_substep(0.5 * dt, t0);
    for (std::size_t step = 0; step + 1 < nsteps; ++step) {
        kinetic_substep();
        potential_substep(dt, t0 + dt * static_cast<double>(step + 1));
        if ((step & 0xFF) == 0xFF) check_finite(s.psi, step);
    }
    kinetic_substep();
    potential_substep(0.5 * dt, t0 + dt * static_cast<double>(nsteps));
    check_finite(s.psi, nsteps);
    s.t = t0 + dt * static_cast<double>(nsteps);
}

GroundState imaginary_time(const Grid1D& g, FieldState s, const Potential& V,
                           double dtau, double tol, double target_n,
                           std::size_t max_iters) {
    if (s.psi.size() != g.n) throw ConfigError("imaginary_time: state size mismatch");
    const std::size_t n = g.n;
    Fft fft(n);

    std::vector<double> kin(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = g.k[j] + s.k_offset;
        kin[j] = std::exp(-0.5 * kj * kj * dtau);
    }

    auto renormalize = [&]() {
        double nn = 0.0;
        for (const auto& a : s.psi) nn += std::norm(a);
        nn *= g.dx;
        const double scale = std::sqrt(target_n / nn);
        for (auto& a : s.psi) a *= scale;
    };

    auto residual_mu = [&](double& mu_out) {
        // mu from the Rayleigh quotient of H_GP, then the L2 defect
        std::vector<cplx> hpsi(s.psi);
        fft.forward(hpsi.data());
        for (std::size_t j = 0; j < n; ++j) {
            const double kj = g.k[j] + s.k_offset;
            hpsi[j] *= 0.5 * kj * kj;
        }
        fft.inverse(hpsi.data());
        for (std::size_t i = 0; i < n; ++i)
            hpsi[i] += (V.v[i].real() + std::norm(s.psi[i])) * s.psi[i];
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (std::conj(s.psi[i]) * hpsi[i]).real();
            den += std::norm(s.psi[i]);
        }
        const double mu = num / den;
        double defect = 0.0;
        for (std::size_t i = 0; i < n; ++i) defect += std::norm(hpsi[i] - mu * s.psi[i]);
        mu_out = mu;
        return std::sqrt(defect / den);
    };

    renormalize();
    GroundState out;
    for (std::size_t it = 0; it < max_iters; ++it) {
        // half potential, full kinetic, half potential in imaginary time
        for (std::size_t i = 0; i < n; ++i)
            s.psi[i] *= std::exp(-0.5 * dtau * (V.v[i].real() + std::norm(s.psi[i])));
        fft.forward(s.psi.data());
        for (std::size_t j = 0; j < n; ++j) s.psi[j] *= kin[j];
        fft.inverse(s.psi.data());
        for (std::size_t i = 0; i < n; ++i)
            s.psi[i] *= std::exp(-0.5 * dtau * (V.v[i].real() + std::norm(s.psi[i])));
        renormalize();
        if (it % 50 == 49 || it + 1 == max_iters) {
            out.residual = residual_mu(out.mu);
            if (out.residual < tol) {
                out.iterations = it + 1;
                out.state = std::move(s);
                return out;
            }
        }
    }
    throw MaxIterationsError("imaginary_time: residual stalled at " +
                             std::to_string(out.residual));
}

double gpg_residual(const Grid1D& g, const FieldState& s, const Potential& V,
                    double mu, double flow_v) {
    const std::size_t n = g.n;
    Fft fft(n);
    std::vector<cplx> lap(s.psi), grad(s.psi);
    fft.forward(lap.data());
    grad = lap;
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = g.k[j] + s.k_offset;
        lap[j] *= 0.5 * kj * kj;
        grad[j] *= kI * kj;
    }
    fft.inverse(lap.data());
    fft.inverse(grad.data());
    double defect = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx r = lap[i] + (V.v[i].real() + std::norm(s.psi[i]) - mu) * s.psi[i] +
                       kI * flow_v * grad[i];
        defect += std::norm(r);
        norm += std::norm(s.psi[i]);
    }
    return std::sqrt(defect / norm);
}

} // namespace fng
