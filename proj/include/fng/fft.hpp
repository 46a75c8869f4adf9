#pragma once

#include <complex>
#include <cstddef>

namespace fng {

// Thin FFTW wrapper, one plan pair per transform size. Plan creation is
// serialized internally (FFTW planning is not thread-safe); execution on
// distinct buffers is safe concurrently. Transforms are unnormalized;
// inverse() divides by n.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }
    void forward(std::complex<double>* data) const;
    void inverse(std::complex<double>* data) const;

private:
    std::size_t n_;
    void* fwd_;
    void* inv_;
};

} // namespace fng
