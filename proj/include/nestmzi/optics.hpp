#pragma once

// Transverse-mode machinery. The beam is expanded either in Hermite-Gauss
// modes of the source width (modal representation, coefficients c_0..c_{K-1})
// or sampled on a uniform midpoint grid (grid representation). All mode math
// is dimensionless: y = x / width, and mirror deflections are quoted as
// fractions of the width, so the two representations share amplitudes.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/fft.hpp"
#include "nestmzi/netlang.hpp"

namespace nestmzi {

// The double closest to 1/sqrt(2). Balanced splitters use this exact value
// for both coefficients so balanced interference cancels bitwise.
inline const double balanced_ratio = std::sqrt(0.5);

struct BsCoeffs {
    double t;  // transmission amplitude
    double r;  // reflection amplitude; the reflected leg carries a factor i
};

inline BsCoeffs bs_coeffs(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw domain_error("splitter ratio must lie in [0, 1]");
    // For the balanced case t must equal r bitwise, not merely to rounding:
    // a dark port is t*(t*x) - r*(r*x) component-wise, and only identical
    // scalar sequences cancel exactly.
    if (r == balanced_ratio) return {balanced_ratio, balanced_ratio};
    return {std::sqrt(1.0 - r * r), r};
}

// out1 = t*in1 + i r*in2, out2 = i r*in1 + t*in2
inline Eigen::Matrix2cd bs_matrix(double r) {
    const BsCoeffs c = bs_coeffs(r);
    Eigen::Matrix2cd m;
    m << cplx(c.t, 0.0), cplx(0.0, c.r), cplx(0.0, c.r), cplx(c.t, 0.0);
    return m;
}

// Normalized Hermite-Gauss profile: integral of hg_mode^2 dx = 1.
// Evaluated with the normalized three-term recurrence, stable in n and y.
inline double hg_mode(int n, double x, double width = 1.0) {
    if (n < 0) throw domain_error("mode index must be >= 0");
    if (!(width > 0.0)) throw domain_error("beam width must be > 0");
    const double y = x / width;
    const double h0 = std::pow(pi, -0.25) * std::exp(-0.5 * y * y);
    if (n == 0) return h0 / std::sqrt(width);
    double prev = h0;
    double cur = std::sqrt(2.0) * y * h0;
    for (int k = 1; k < n; ++k) {
        const double next =
            std::sqrt(2.0 / (k + 1.0)) * y * cur - std::sqrt(k / (k + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur / std::sqrt(width);
}

// Values of the dimensionless modes at y = 0; odd modes vanish.
inline std::vector<double> hg_values_at_zero(int count) {
    std::vector<double> h0(count, 0.0);
    if (count > 0) h0[0] = std::pow(pi, -0.25);
    for (int n = 2; n < count; n += 2) h0[n] = -std::sqrt((n - 1.0) / n) * h0[n - 2];
    return h0;
}

// Gram matrix of sign(y) between Hermite-Gauss modes:
//   G[n][m] = integral sign(y) h_n(y) h_m(y) dy.
// Exactly zero when n + m is even; odd entries from a closed recurrence on
// the half-line integrals I[n][m] = integral_0^inf h_n h_m dy, so no
// quadrature error enters the differential-signal path.
inline Eigen::MatrixXd sign_gram(int K) {
    if (K < 1) throw domain_error("mode count must be >= 1");
    const int KK = K + 4;
    const auto h0 = hg_values_at_zero(KK + 1);
    Eigen::MatrixXd I = Eigen::MatrixXd::Zero(KK + 1, KK + 1);
    for (int n = 0; n <= KK; ++n) I(n, n) = 0.5;
    // Gap 1: the relation ties I[n][n+1] to itself through symmetry, so the
    // two equal unknowns merge into one solve.
    for (int n = 0; n + 1 <= KK; ++n) {
        const double lower = (n > 0) ? 2.0 * std::sqrt(double(n)) * I(n - 1, n) : 0.0;
        I(n, n + 1) = (std::sqrt(2.0) * h0[n] * h0[n] + lower) / (2.0 * std::sqrt(n + 1.0));
        I(n + 1, n) = I(n, n + 1);
    }
    // Odd gaps g >= 3 reference only gaps g and g - 2, filled in ascending n.
    for (int g = 3; g <= KK; g += 2) {
        for (int n = 0; n + g <= KK; ++n) {
            const int m = n + g;
            double v = std::sqrt(m - 1.0) * I(n, m - 2) + std::sqrt(2.0) * h0[n] * h0[m - 1] -
                       std::sqrt(n + 1.0) * I(n + 1, m - 1);
            if (n > 0) v += std::sqrt(double(n)) * I(n - 1, m - 1);
            I(n, m) = v / std::sqrt(double(m));
            I(m, n) = I(n, m);
        }
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, K);
    for (int n = 0; n < K; ++n)
        for (int m = 0; m < K; ++m)
            if ((n + m) % 2 == 1) G(n, m) = 2.0 * I(n, m);
    return G;
}

// Truncated transverse-displacement operator exp((d/sqrt(2)) (adag - a)) for
// a deflection of d beam widths. adag - a is conjugate to -(a + adag) under
// the diagonal map diag(i^n), so the factory eigendecomposes the real
// tridiagonal position matrix once and each displacement is a diagonal
// rephasing. The matrix is orthogonal up to truncation and rounding; d == 0
// returns the exact identity so resting mirrors cannot scramble a state.
class DisplacementFactory {
public:
    explicit DisplacementFactory(int K) : K_(K) {
        if (K < 1) throw domain_error("mode count must be >= 1");
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(K, K);
        for (int n = 0; n + 1 < K; ++n) {
            X(n, n + 1) = std::sqrt(n + 1.0);
            X(n + 1, n) = X(n, n + 1);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(X);
        if (solver.info() != Eigen::Success)
            throw domain_error("position-operator eigendecomposition failed");
        eig_ = solver.eigenvalues();
        // B = diag((-i)^n) V, so exp((d/sqrt2)(adag - a)) = B diag(e^{i c eig}) B^H
        const Eigen::MatrixXd& V = solver.eigenvectors();
        B_.resize(K, K);
        const cplx minus_i(0.0, -1.0);
        cplx row_phase(1.0, 0.0);
        for (int n = 0; n < K; ++n) {
            for (int mu = 0; mu < K; ++mu) B_(n, mu) = row_phase * V(n, mu);
            row_phase *= minus_i;
        }
    }

    int mode_count() const { return K_; }

    Eigen::MatrixXcd matrix(double d) const {
        if (d == 0.0) return Eigen::MatrixXcd::Identity(K_, K_);
        // beyond a fifth of a beam width the truncated basis stops tracking
        // the exact operator, so treat larger deflections as misuse
        if (!(std::abs(d) <= 0.2)) throw domain_error("deflection exceeds 0.2 beam widths");
        const double c = d / std::sqrt(2.0);
        Eigen::VectorXcd phases(K_);
        for (int mu = 0; mu < K_; ++mu) phases(mu) = std::polar(1.0, c * eig_(mu));
        Eigen::MatrixXcd T = B_ * phases.asDiagonal() * B_.adjoint();
        // the exact operator is real; strip the rounding-level imaginary part
        Eigen::MatrixXcd R(K_, K_);
        for (int n = 0; n < K_; ++n)
            for (int m = 0; m < K_; ++m) R(n, m) = cplx(T(n, m).real(), 0.0);
        return R;
    }

private:
    int K_;
    Eigen::VectorXd eig_;
    Eigen::MatrixXcd B_;
};

inline Eigen::MatrixXcd displacement_matrix(int K, double d) {
    return DisplacementFactory(K).matrix(d);
}

// Physical-units convenience: deflection d and beam width share a unit.
inline Eigen::MatrixXcd displacement_matrix(int K, double d, double width) {
    if (!(width > 0.0)) throw domain_error("beam width must be > 0");
    return DisplacementFactory(K).matrix(d / width);
}

// ---------------------------------------------------------------------------
// Grid representation

// Uniform midpoint grid on [-half_width, half_width]: y_j = -L + (j + 1/2) h.
// No sample sits on y = 0; the sign boundary falls between n/2 - 1 and n/2.
struct Grid {
    int n = 0;
    double half_width = 0.0;
    double step = 0.0;

    double point(int j) const { return -half_width + (j + 0.5) * step; }
};

inline Grid make_grid(int n, double half_width) {
    if (n < 4 || (n & (n - 1)) != 0) throw domain_error("grid size must be a power of two >= 4");
    if (!(half_width > 0.0)) throw domain_error("grid half-width must be > 0");
    return Grid{n, half_width, 2.0 * half_width / n};
}

inline std::vector<cplx> gaussian_profile(const Grid& g, double width = 1.0) {
    std::vector<cplx> out(static_cast<std::size_t>(g.n));
    for (int j = 0; j < g.n; ++j) out[j] = cplx(hg_mode(0, g.point(j), width), 0.0);
    return out;
}

// Multiplies a spectrum in place by the translation phases for a shift of d:
// bin m picks up e^{-i pi m d / L}, conjugate on negative bins, cosine at
// Nyquist so the operator stays real-to-real. Phases come from repeated
// multiplication by one phasor; no per-bin trig.
inline void apply_shift_spectrum(const Grid& g, double d, cplx* spectrum) {
    if (d == 0.0) return;
    const cplx w = std::polar(1.0, -pi * d / g.half_width);
    cplx wp(1.0, 0.0);
    const int half = g.n / 2;
    for (int m = 1; m < half; ++m) {
        wp *= w;
        spectrum[m] *= wp;
        spectrum[g.n - m] *= std::conj(wp);
    }
    wp *= w;
    spectrum[half] *= wp.real();
}

// Translates a sampled profile: out(y) = in(y - d), periodic on the box.
inline std::vector<cplx> grid_shift(const Grid& g, const std::vector<cplx>& values, double d) {
    if (static_cast<int>(values.size()) != g.n)
        throw domain_error("profile length does not match grid");
    // shifts approaching the box size wrap the periodic image into the window
    if (!(std::abs(d) < g.half_width / 4.0))
        throw domain_error("shift must stay below a quarter of the grid half-width");
    std::vector<cplx> work = values;
    Fft fft(static_cast<std::size_t>(g.n));
    fft.forward(work.data());
    apply_shift_spectrum(g, d, work.data());
    fft.inverse(work.data());
    return work;
}

// ---------------------------------------------------------------------------
// Static (zeroth-order) network transfer

// Scalar amplitudes carried by each arm when every mirror is at rest: resting
// mirrors are exact identities, so all modes share one coefficient and the
// network reduces to scalar transfer. Cut vectors are indexed like
// ValidatedNetwork::cuts and hold end-of-arm values (inline chain applied).
struct TransferTable {
    std::vector<cplx> arm_start;  // per arm id, value leaving the producer
    std::vector<cplx> arm_end;    // per arm id, value after the inline chain
    std::vector<std::vector<cplx>> cut_amps;
    std::map<std::string, cplx> detector_amp;
    double absorbed_power = 0.0;        // total power removed by blocks
    double max_conservation_defect = 0.0;
};

inline TransferTable compile_transfer(const ValidatedNetwork& vn) {
    TransferTable tt;
    const std::size_t n_arms = vn.arms.size();
    tt.arm_start.assign(n_arms, cplx(0.0, 0.0));
    tt.arm_end.assign(n_arms, cplx(0.0, 0.0));

    const auto run_chain = [&](int arm) {
        cplx v = tt.arm_start[static_cast<std::size_t>(arm)];
        for (const int ci : vn.arms[static_cast<std::size_t>(arm)].chain) {
            const Element& c = vn.spec.elements[static_cast<std::size_t>(ci)];
            if (c.kind == ElementKind::phase) {
                v *= std::polar(1.0, c.angle);
            } else if (c.kind == ElementKind::block) {
                tt.absorbed_power += std::norm(v);
                v = cplx(0.0, 0.0);
            }
            // resting mirrors leave the state untouched
        }
        tt.arm_end[static_cast<std::size_t>(arm)] = v;
    };

    double injected = 0.0;
    double detected = 0.0;
    for (std::size_t step = 0; step < vn.node_order.size(); ++step) {
        const int ei = vn.node_order[step];
        const Element& e = vn.spec.elements[static_cast<std::size_t>(ei)];
        if (e.kind == ElementKind::source) {
            const int a = vn.arm_of(e.out_arms[0]);
            tt.arm_start[static_cast<std::size_t>(a)] = cplx(1.0, 0.0);
            run_chain(a);
            injected += 1.0;
        } else if (e.kind == ElementKind::bs) {
            const BsCoeffs c = bs_coeffs(e.r);
            const cplx ir(0.0, c.r);
            cplx in1(0.0, 0.0), in2(0.0, 0.0);
            if (e.in_arms[0] != "vac") in1 = tt.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[0]))];
            if (e.in_arms[1] != "vac") in2 = tt.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[1]))];
            const int o1 = vn.arm_of(e.out_arms[0]);
            const int o2 = vn.arm_of(e.out_arms[1]);
            tt.arm_start[static_cast<std::size_t>(o1)] = c.t * in1 + ir * in2;
            tt.arm_start[static_cast<std::size_t>(o2)] = ir * in1 + c.t * in2;
            run_chain(o1);
            run_chain(o2);
        } else if (e.kind == ElementKind::detector) {
            const cplx v = tt.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[0]))];
            tt.detector_amp[e.name] = v;
            detected += std::norm(v);
        }
        double live = 0.0;
        for (const int a : vn.cuts[step]) live += std::norm(tt.arm_end[static_cast<std::size_t>(a)]);
        const double defect = std::abs(live + detected + tt.absorbed_power - injected);
        tt.max_conservation_defect = std::max(tt.max_conservation_defect, defect);
    }
    if (tt.max_conservation_defect > 1e-10)
        throw domain_error("static transfer violates power conservation");
    return tt;
}

}  // namespace nestmzi
