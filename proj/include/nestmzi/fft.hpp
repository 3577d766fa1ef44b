#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "nestmzi/common.hpp"

namespace nestmzi {

// Radix-2 in-place FFT with precomputed twiddles and bit-reversal table.
// Forward transform uses the e^{-2*pi*i*jk/N} kernel, inverse divides by N,
// so inverse(forward(x)) == x up to roundoff.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw domain_error("Fft: size must be a power of two >= 2, got " + std::to_string(n));
        rev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            rev_[i] = r;
        }
        tw_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            tw_[k] = std::polar(1.0, -2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
    }

    std::size_t size() const { return n_; }

    void forward(cplx* x) const { transform(x, false); }

    void inverse(cplx* x) const {
        transform(x, true);
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] *= s;
    }

private:
    void transform(cplx* x, bool conj_kernel) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (rev_[i] > i) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t step = n_ / len;
            for (std::size_t base = 0; base < n_; base += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    cplx w = tw_[k * step];
                    if (conj_kernel) w = std::conj(w);
                    const cplx u = x[base + k];
                    const cplx v = x[base + k + len / 2] * w;
                    x[base + k] = u + v;
                    x[base + k + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cplx> tw_;
};

// DFT of arbitrary length. Power-of-two sizes run the radix-2 path directly;
// other sizes go through the Bluestein chirp-z identity
//   X_k = conj(w_k) * sum_j (x_j conj(w_j)) w_{k-j},   w_m = e^{-i*pi*m^2/N},
// which turns the DFT into one circular convolution of length >= 2N-1.
class Dft {
public:
    explicit Dft(std::size_t n) : n_(n) {
        if (n < 2) throw domain_error("Dft: size must be >= 2, got " + std::to_string(n));
        if ((n & (n - 1)) == 0) {
            pow2_ = std::make_unique<Fft>(n);
            return;
        }
        std::size_t m = 1;
        while (m < 2 * n - 1) m <<= 1;
        conv_ = std::make_unique<Fft>(m);
        chirp_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            // j^2 mod 2N keeps the phase argument small for large N
            const std::size_t j2 = (j * j) % (2 * n);
            chirp_[j] = std::polar(1.0, -pi * static_cast<double>(j2) / static_cast<double>(n));
        }
        kernel_fft_.assign(m, cplx{0.0, 0.0});
        kernel_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n; ++j) {
            kernel_fft_[j] = std::conj(chirp_[j]);
            kernel_fft_[m - j] = std::conj(chirp_[j]);
        }
        conv_->forward(kernel_fft_.data());
    }

    std::size_t size() const { return n_; }

    std::vector<cplx> forward(const std::vector<cplx>& x) const {
        if (x.size() != n_)
            throw domain_error("Dft::forward: input length " + std::to_string(x.size()) +
                               " does not match configured size " + std::to_string(n_));
        if (pow2_) {
            std::vector<cplx> out = x;
            pow2_->forward(out.data());
            return out;
        }
        const std::size_t m = conv_->size();
        std::vector<cplx> a(m, cplx{0.0, 0.0});
        for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
        conv_->forward(a.data());
        for (std::size_t j = 0; j < m; ++j) a[j] *= kernel_fft_[j];
        conv_->inverse(a.data());
        std::vector<cplx> out(n_);
        for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * chirp_[k];
        return out;
    }

private:
    std::size_t n_;
    std::unique_ptr<Fft> pow2_;
    std::unique_ptr<Fft> conv_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_fft_;
};

}  // namespace nestmzi
