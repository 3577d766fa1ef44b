#pragma once

// Quad-cell readout. A detector reports two channels per time sample: the
// difference signal S (right half minus left half of the transverse power
// profile) and the total power P. |S| <= P always; S flips sign when the
// profile mirrors, P does not.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/optics.hpp"

namespace nestmzi {

struct QuadCellReading {
    double s = 0.0;
    double p = 0.0;
};

// Modal readout: P = |c|^2, S = c^H G c with G the sign Gram matrix for the
// same mode count. G is real symmetric so the quadratic form is real; the
// tiny rounding-level imaginary part is dropped.
inline QuadCellReading quad_cell(const Eigen::VectorXcd& c, const Eigen::MatrixXd& gram) {
    if (gram.rows() != c.size() || gram.cols() != c.size())
        throw domain_error("sign Gram matrix does not match mode count");
    QuadCellReading out;
    out.p = c.squaredNorm();
    cplx s(0.0, 0.0);
    for (int n = 0; n < c.size(); ++n)
        for (int m = 0; m < c.size(); ++m)
            if (gram(n, m) != 0.0) s += std::conj(c(n)) * gram(n, m) * c(m);
    out.s = s.real();
    return out;
}

// Grid readout over the midpoint samples. The two half-sums carry a leading
// midpoint-rule bias of +- h^2/12 f'(0) at the sign boundary with opposite
// signs, so S gets an explicit h/12 jump correction; P has no boundary and
// needs none.
inline QuadCellReading quad_cell(const Grid& g, const std::vector<cplx>& psi) {
    if (static_cast<int>(psi.size()) != g.n) throw domain_error("profile length does not match grid");
    const int half = g.n / 2;
    double left = 0.0, right = 0.0;
    for (int j = 0; j < half; ++j) left += std::norm(psi[static_cast<std::size_t>(j)]);
    for (int j = half; j < g.n; ++j) right += std::norm(psi[static_cast<std::size_t>(j)]);
    const double f_lo = std::norm(psi[static_cast<std::size_t>(half - 1)]);
    const double f_hi = std::norm(psi[static_cast<std::size_t>(half)]);
    QuadCellReading out;
    out.p = g.step * (left + right);
    out.s = g.step * (right - left) - (g.step / 12.0) * (f_hi - f_lo);
    return out;
}

// One detector's sampled output over a run.
struct DetectorTrace {
    std::string detector;
    std::vector<double> s;
    std::vector<double> p;
};

// Additive Gaussian readout noise on the difference channel only (the total
// power is the reference channel and stays clean). Deterministic for a given
// seed; sigma == 0 draws nothing and leaves the trace bit-identical.
inline void add_noise(DetectorTrace& trace, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw domain_error("noise level must be >= 0");
    if (sigma == 0.0) return;
    std::mt19937_64 rng(seed);
    // Box-Muller on (0,1] uniforms built from the top 53 bits
    bool have_spare = false;
    double spare = 0.0;
    const auto gauss = [&]() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare = radius * std::sin(2.0 * pi * u2);
        have_spare = true;
        return radius * std::cos(2.0 * pi * u2);
    };
    for (double& v : trace.s) v += sigma * gauss();
}

}  // namespace nestmzi
