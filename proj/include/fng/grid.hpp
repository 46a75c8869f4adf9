#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fng {

using cplx = std::complex<double>;

// Uniform periodic grid on [-L/2, L/2) with FFT-ordered wavenumbers
// (2pi/L) * [0, 1, ..., N/2, -N/2+1, ..., -1].
struct Grid1D {
    double length = 0.0;
    std::size_t n = 0;
    double dx = 0.0;
    std::vector<double> k;

    Grid1D() = default;
    Grid1D(double L, std::size_t npoints);

    double x(std::size_t i) const { return -0.5 * length + dx * static_cast<double>(i); }
    std::vector<double> xs() const;
};

// Condensate wavefunction sample. The physical field is
// psi_phys(x) = exp(i k_offset x) * psi(x) with psi periodic; k_offset
// absorbs a carrier wavenumber that is not grid-representable.
struct FieldState {
    std::vector<cplx> psi;
    double t = 0.0;
    double k_offset = 0.0;
};

// External potential; a nonpositive imaginary part acts as an absorber.
struct Potential {
    std::vector<cplx> v;

    static Potential zero(const Grid1D& g) { return Potential{std::vector<cplx>(g.n, 0.0)}; }
};

// Attractive barrier of integrated strength -Z, regularized as a narrow
// Gaussian of width sigma (default 2*dx) centered at x0.
Potential gaussian_barrier(const Grid1D& g, double Z, double x0, double sigma = 0.0);

} // namespace fng
