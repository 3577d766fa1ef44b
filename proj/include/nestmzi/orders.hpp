#pragma once

// Symbolic small-deflection expansion. Each vibrating mirror i contributes a
// formal scale symbol (its deflection amplitude) and a unit phasor
// e^{i theta_i(t)}; a field coefficient is a polynomial in the scales whose
// terms carry integer harmonic vectors. Expanding every mirror operator to a
// chosen total degree D and pushing the polynomials through the network
// yields closed-form predictions for which spectral lines exist, at which
// perturbative order, and with what amplitude.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/netlang.hpp"
#include "nestmzi/optics.hpp"
#include "nestmzi/spectrum.hpp"

namespace nestmzi {

// One term: coefficient of mode |mode> times prod_i scale_i^{powers[i]} times
// e^{i sum_i harmonics[i] theta_i(t)}. Vibration phases stay out of the
// coefficients; they enter only when lines are classified or evaluated.
struct TraceKey {
    int mode = 0;
    std::vector<int> harmonics;
    std::vector<int> powers;

    bool operator<(const TraceKey& o) const {
        if (mode != o.mode) return mode < o.mode;
        if (harmonics != o.harmonics) return harmonics < o.harmonics;
        return powers < o.powers;
    }
};

using TracePolynomial = std::map<TraceKey, cplx>;

inline int total_power(const TraceKey& k) {
    int acc = 0;
    for (const int p : k.powers) acc += p;
    return acc;
}

// Drops terms below `rel` of the largest magnitude. The discarded mass is
// returned so callers can assert pruning never bites into real content.
inline double prune_small(TracePolynomial& poly, double rel = 1e-15) {
    double largest = 0.0;
    for (const auto& [k, c] : poly) largest = std::max(largest, std::abs(c));
    double removed = 0.0;
    for (auto it = poly.begin(); it != poly.end();) {
        if (std::abs(it->second) <= rel * largest) {
            removed = std::max(removed, std::abs(it->second));
            it = poly.erase(it);
        } else {
            ++it;
        }
    }
    return removed;
}

namespace detail {

inline void poly_axpy(TracePolynomial& dst, const TracePolynomial& src, cplx factor) {
    for (const auto& [k, c] : src) {
        auto [it, inserted] = dst.emplace(k, factor * c);
        if (!inserted) it->second += factor * c;
    }
}

inline double binom(int p, int q) {
    double acc = 1.0;
    for (int i = 0; i < q; ++i) acc = acc * (p - i) / (i + 1);
    return acc;
}

}  // namespace detail

// Applies one vibrating mirror (slot index into the scale symbols) to a
// field polynomial, truncated at total degree `max_degree`:
//   exp(scale sin(theta) (adag - a)/sqrt2)
//     = sum_p (scale sin theta)^p / (p! 2^{p/2}) (adag - a)^p,
//   sin^p(theta) = (2i)^{-p} sum_q C(p,q) (-1)^{p-q} e^{i(2q-p) theta}.
inline TracePolynomial apply_mirror(const TracePolynomial& poly, int slot, int max_degree) {
    TracePolynomial out;
    for (const auto& [key, coeff] : poly) {
        const int budget = max_degree - total_power(key);
        // p = 0 passes the term through untouched
        out[key] += coeff;
        for (int p = 1; p <= budget; ++p) {
            // ladder walk: (adag - a)^p applied to |mode>
            std::map<int, double> ladder{{key.mode, 1.0}};
            for (int step = 0; step < p; ++step) {
                std::map<int, double> next;
                for (const auto& [mu, w] : ladder) {
                    next[mu + 1] += w * std::sqrt(mu + 1.0);
                    if (mu > 0) next[mu - 1] -= w * std::sqrt(double(mu));
                }
                ladder = std::move(next);
            }
            double p_factorial = 1.0;
            for (int i = 2; i <= p; ++i) p_factorial *= i;
            const cplx sin_scale = std::pow(cplx(0.0, -0.5), p);  // (2i)^{-p}
            const double op_scale = std::pow(0.5, p / 2.0) / p_factorial;  // 2^{-p/2} / p!
            for (int q = 0; q <= p; ++q) {
                const double sign = ((p - q) % 2 == 0) ? 1.0 : -1.0;
                const cplx harmonic_factor = sin_scale * detail::binom(p, q) * sign;
                for (const auto& [mu, w] : ladder) {
                    TraceKey nk = key;
                    nk.mode = mu;
                    nk.harmonics[static_cast<std::size_t>(slot)] += 2 * q - p;
                    nk.powers[static_cast<std::size_t>(slot)] += p;
                    out[nk] += coeff * harmonic_factor * (op_scale * w);
                }
            }
        }
    }
    prune_small(out);
    return out;
}

struct SymbolicField {
    int degree = 0;
    int mode_count = 0;
    std::vector<int> mirror_elems;  // element index per scale slot
    std::vector<TracePolynomial> arm_end;  // per arm id
    std::map<std::string, TracePolynomial> detector_poly;
};

inline SymbolicField symbolic_propagate(const ValidatedNetwork& vn, int degree) {
    if (degree < 0 || degree > 3)
        throw domain_error("expansion degree must lie in [0, 3]");
    SymbolicField sf;
    sf.degree = degree;
    sf.mode_count = degree + 1;
    sf.mirror_elems = vn.vibrating_mirrors;
    std::vector<int> slot_of_elem(vn.spec.elements.size(), -1);
    for (std::size_t s = 0; s < sf.mirror_elems.size(); ++s)
        slot_of_elem[static_cast<std::size_t>(sf.mirror_elems[s])] = static_cast<int>(s);
    const std::size_t n_slots = sf.mirror_elems.size();
    sf.arm_end.assign(vn.arms.size(), TracePolynomial{});

    const auto run_chain = [&](int arm, TracePolynomial poly) {
        for (const int ci : vn.arms[static_cast<std::size_t>(arm)].chain) {
            const Element& c = vn.spec.elements[static_cast<std::size_t>(ci)];
            if (c.kind == ElementKind::mirror) {
                const int slot = slot_of_elem[static_cast<std::size_t>(ci)];
                if (slot >= 0) poly = apply_mirror(poly, slot, degree);
            } else if (c.kind == ElementKind::phase) {
                const cplx ph = std::polar(1.0, c.angle);
                for (auto& [k, v] : poly) v *= ph;
            } else {
                poly.clear();
            }
        }
        sf.arm_end[static_cast<std::size_t>(arm)] = std::move(poly);
    };

    for (const int ei : vn.node_order) {
        const Element& e = vn.spec.elements[static_cast<std::size_t>(ei)];
        if (e.kind == ElementKind::source) {
            TracePolynomial p;
            TraceKey k;
            k.mode = 0;
            k.harmonics.assign(n_slots, 0);
            k.powers.assign(n_slots, 0);
            p[k] = cplx(1.0, 0.0);
            run_chain(vn.arm_of(e.out_arms[0]), std::move(p));
        } else if (e.kind == ElementKind::bs) {
            const BsCoeffs c = bs_coeffs(e.r);
            const cplx ir(0.0, c.r);
            const TracePolynomial empty;
            const TracePolynomial& in1 =
                e.in_arms[0] == "vac" ? empty : sf.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[0]))];
            const TracePolynomial& in2 =
                e.in_arms[1] == "vac" ? empty : sf.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[1]))];
            TracePolynomial o1, o2;
            detail::poly_axpy(o1, in1, cplx(c.t, 0.0));
            detail::poly_axpy(o1, in2, ir);
            detail::poly_axpy(o2, in1, ir);
            detail::poly_axpy(o2, in2, cplx(c.t, 0.0));
            for (auto it = o1.begin(); it != o1.end();)
                it = (it->second == cplx(0.0, 0.0)) ? o1.erase(it) : std::next(it);
            for (auto it = o2.begin(); it != o2.end();)
                it = (it->second == cplx(0.0, 0.0)) ? o2.erase(it) : std::next(it);
            run_chain(vn.arm_of(e.out_arms[0]), std::move(o1));
            run_chain(vn.arm_of(e.out_arms[1]), std::move(o2));
        } else if (e.kind == ElementKind::detector) {
            sf.detector_poly[e.name] =
                sf.arm_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[0]))];
        }
    }
    return sf;
}

// Evaluates a field polynomial to mode coefficients at time t, using each
// mirror's configured amplitude, frequency and phase.
inline Eigen::VectorXcd evaluate_modes(const TracePolynomial& poly, const ValidatedNetwork& vn,
                                       const SymbolicField& sf, double t) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(sf.mode_count);
    for (const auto& [key, coeff] : poly) {
        if (key.mode >= sf.mode_count) continue;
        cplx v = coeff;
        for (std::size_t s = 0; s < sf.mirror_elems.size(); ++s) {
            const auto& vib = *vn.spec.elements[static_cast<std::size_t>(sf.mirror_elems[s])].vibration;
            const double theta = 2.0 * pi * vib.frequency_hz * t + vib.phase;
            const int kp = key.powers[s];
            if (kp > 0) v *= std::pow(vib.amplitude, kp);
            const int mh = key.harmonics[s];
            if (mh != 0) v *= std::polar(1.0, mh * theta);
        }
        c(key.mode) += v;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Line classification

enum class Channel { difference, power };

struct LineRow {
    Channel channel = Channel::difference;
    std::string label;  // e.g. "f_A", "f_F+f_A", "2f_C"; mirror names follow their arms
    double frequency_hz = 0.0;
    int leading_order = 0;
    double coefficient = 0.0;  // cosine amplitude per eps_ref^order at the leading order
    bool interferes_with_zeroth = false;
    std::vector<std::vector<int>> lattices;        // contributing harmonic steps
    std::map<int, double> order_coefficients;      // per total degree
};

struct LineTable {
    double eps_ref = 0.0;  // deflection amplitude of the first vibrating mirror
    std::vector<LineRow> rows;

    const LineRow* find(Channel ch, double frequency_hz, double tol = 1e-6) const {
        for (const auto& r : rows)
            if (r.channel == ch && std::abs(r.frequency_hz - frequency_hz) <= tol) return &r;
        return nullptr;
    }
};

// Predicted calibrated spectrum peak for a row at effective deflection eps
// (the row coefficient is quoted per eps_ref^order).
inline double predicted_peak_power(const LineRow& row, double eps) {
    const double amp = row.coefficient * std::pow(eps, row.leading_order);
    return amp * amp;
}

namespace detail {

struct LineAccum {
    std::map<int, cplx> z_by_degree;
    std::map<int, bool> zeroth_by_degree;
};

// Renders a harmonic lattice vector as a frequency expression over the arms
// the mirrors sit on: (A:+1, F:+1) -> "f_F+f_A", (C:+2) -> "2f_C". Positive
// terms come first, higher frequencies first within a sign.
inline std::string lattice_label(const std::vector<int>& dm, const std::vector<double>& freq,
                                 const std::vector<std::string>& arm_name) {
    std::vector<std::size_t> idx;
    for (std::size_t s = 0; s < dm.size(); ++s)
        if (dm[s] != 0) idx.push_back(s);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if ((dm[a] > 0) != (dm[b] > 0)) return dm[a] > 0;
        return freq[a] > freq[b];
    });
    std::string out;
    for (const std::size_t s : idx) {
        const int n = std::abs(dm[s]);
        if (!out.empty() || dm[s] < 0) out += dm[s] > 0 ? "+" : "-";
        if (n > 1) out += std::to_string(n);
        out += "f_" + arm_name[s];
    }
    return out;
}

}  // namespace detail

// Builds the line table for one detector: every ordered pair of terms beats
// at frequency (m2 - m1) . f. Pairs are counted once per signed lattice
// vector (the reverse pair carries the conjugate at the opposite sign), so a
// line's cosine amplitude is 2 |sum z| with z accumulated below. Lattice
// vectors that land on the same frequency merge coherently.
inline LineTable classify_lines(const ValidatedNetwork& vn, const SymbolicField& sf,
                                const std::string& detector, double merge_tol_hz = 1e-6) {
    const auto it = sf.detector_poly.find(detector);
    if (it == sf.detector_poly.end())
        throw domain_error("no field polynomial for detector '" + detector + "'");
    const TracePolynomial& poly = it->second;

    const std::size_t n_slots = sf.mirror_elems.size();
    std::vector<double> freq(n_slots), phase(n_slots), ratio(n_slots);
    std::vector<std::string> slot_arm(n_slots);
    double eps_ref = 0.0;
    for (std::size_t s = 0; s < n_slots; ++s) {
        const Element& me = vn.spec.elements[static_cast<std::size_t>(sf.mirror_elems[s])];
        const auto& vib = *me.vibration;
        freq[s] = vib.frequency_hz;
        phase[s] = vib.phase;
        slot_arm[s] = me.in_arms[0];
        if (s == 0) eps_ref = vib.amplitude;
        ratio[s] = vib.amplitude / (eps_ref != 0.0 ? eps_ref : 1.0);
    }

    const Eigen::MatrixXd gram = sign_gram(sf.mode_count);

    using LatticeKey = std::pair<Channel, std::vector<int>>;
    std::map<LatticeKey, detail::LineAccum> accum;

    const std::vector<int> zero_lattice(n_slots, 0);
    for (const auto& [k1, c1] : poly) {
        for (const auto& [k2, c2] : poly) {
            std::vector<int> dm(n_slots);
            double nu = 0.0;
            for (std::size_t s = 0; s < n_slots; ++s) {
                dm[s] = k2.harmonics[s] - k1.harmonics[s];
                nu += dm[s] * freq[s];
            }
            // keep one representative per signed lattice vector
            bool canonical;
            if (std::abs(nu) > merge_tol_hz) {
                canonical = nu > 0.0;
            } else if (dm == zero_lattice) {
                canonical = true;
            } else {
                canonical = dm > zero_lattice;  // zero-beat pair: lexicographic side
            }
            if (!canonical) continue;

            // a field truncated at sf.degree yields complete beat sums only up
            // to that total degree; higher partial sums miss the pairs with one
            // factor beyond the truncation and would fake lines that cancel
            const int degree = total_power(k1) + total_power(k2);
            if (degree > sf.degree) continue;
            cplx base = std::conj(c1) * c2;
            double dphi = 0.0;
            for (std::size_t s = 0; s < n_slots; ++s) {
                dphi += dm[s] * phase[s];
                const int kp = k1.powers[s] + k2.powers[s];
                if (kp > 0 && ratio[s] != 1.0) base *= std::pow(ratio[s], kp);
            }
            base *= std::polar(1.0, dphi);
            const bool zero_beat_pair = std::abs(nu) <= merge_tol_hz && !(dm == zero_lattice);
            const bool touches_zeroth = (total_power(k1) == 0) || (total_power(k2) == 0);

            // difference channel weights pairs by the sign Gram matrix
            const double g = gram(k1.mode, k2.mode);
            if (g != 0.0) {
                auto& acc = accum[{Channel::difference, dm}];
                acc.z_by_degree[degree] += zero_beat_pair ? cplx(2.0 * (base * g).real(), 0.0)
                                                          : base * g;
                if (touches_zeroth) acc.zeroth_by_degree[degree] = true;
            }
            // power channel pairs equal modes only
            if (k1.mode == k2.mode) {
                auto& acc = accum[{Channel::power, dm}];
                acc.z_by_degree[degree] += zero_beat_pair ? cplx(2.0 * base.real(), 0.0) : base;
                if (touches_zeroth) acc.zeroth_by_degree[degree] = true;
            }
        }
    }

    // collapse lattice vectors onto numeric frequencies; the mean (zero
    // frequency) is not a spectral line and is not reported
    struct Merged {
        Channel channel;
        double frequency_hz;
        std::vector<std::vector<int>> lattices;
        detail::LineAccum acc;
    };
    std::vector<Merged> merged;
    for (const auto& [key, acc] : accum) {
        double nu = 0.0;
        for (std::size_t s = 0; s < n_slots; ++s) nu += key.second[s] * freq[s];
        if (std::abs(nu) <= merge_tol_hz) continue;
        Merged* home = nullptr;
        for (auto& m : merged)
            if (m.channel == key.first && std::abs(m.frequency_hz - nu) <= merge_tol_hz) home = &m;
        if (!home) {
            merged.push_back({key.first, nu, {}, {}});
            home = &merged.back();
        }
        home->lattices.push_back(key.second);
        for (const auto& [deg, z] : acc.z_by_degree) home->acc.z_by_degree[deg] += z;
        for (const auto& [deg, flag] : acc.zeroth_by_degree)
            if (flag) home->acc.zeroth_by_degree[deg] = true;
    }

    LineTable table;
    table.eps_ref = eps_ref;
    for (const auto& m : merged) {
        LineRow row;
        row.channel = m.channel;
        row.frequency_hz = m.frequency_hz;
        row.lattices = m.lattices;
        for (const auto& lat : m.lattices) {
            if (!row.label.empty()) row.label += " = ";
            row.label += detail::lattice_label(lat, freq, slot_arm);
        }
        bool has_leading = false;
        for (const auto& [deg, z] : m.acc.z_by_degree) {
            const double amp = 2.0 * std::abs(z);
            if (amp <= 1e-13) continue;
            row.order_coefficients[deg] = amp;
            if (!has_leading) {
                has_leading = true;
                row.leading_order = deg;
                row.coefficient = amp;
                const auto f = m.acc.zeroth_by_degree.find(deg);
                row.interferes_with_zeroth = (f != m.acc.zeroth_by_degree.end()) && f->second;
            }
        }
        if (has_leading) table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const LineRow& a, const LineRow& b) {
        if (a.channel != b.channel) return a.channel == Channel::difference;
        return a.frequency_hz < b.frequency_hz;
    });
    return table;
}

// Predicted calibrated peak table at effective reference deflection eps, for
// one readout channel. Beyond eps = 0.05 the truncated expansion stops being
// trustworthy, so larger requests are refused.
inline PeakTable predict_spectrum(const LineTable& lt, double eps,
                                  Channel channel = Channel::difference) {
    if (!(eps > 0.0) || !(eps <= 0.05))
        throw domain_error("effective deflection must lie in (0, 0.05]");
    PeakTable out;
    for (const auto& row : lt.rows) {
        if (row.channel != channel) continue;
        PeakRow pr;
        pr.label = row.label;
        pr.probe_hz = row.frequency_hz;
        pr.bin_hz = row.frequency_hz;
        pr.power = predicted_peak_power(row, eps);
        pr.noise_floor = 0.0;
        out.rows.push_back(std::move(pr));
    }
    return out;
}

// Per-arm presence: largest term magnitude at each total degree. An arm the
// light never reaches at some order shows 0 there; a first-order-only trace
// shows 0 at degree 0 and a finite entry at degree 1.
struct ArmPresence {
    std::string arm;
    std::vector<double> max_by_order;  // index = total degree, size degree + 1
};

inline std::vector<ArmPresence> arm_presence_report(const ValidatedNetwork& vn,
                                                    const SymbolicField& sf) {
    std::vector<ArmPresence> out;
    for (std::size_t a = 0; a < vn.arms.size(); ++a) {
        if (vn.arms[a].vacuum) continue;
        ArmPresence ap;
        ap.arm = vn.arms[a].name;
        ap.max_by_order.assign(static_cast<std::size_t>(sf.degree) + 1, 0.0);
        for (const auto& [k, c] : sf.arm_end[a]) {
            const int d = total_power(k);
            if (d <= sf.degree)
                ap.max_by_order[static_cast<std::size_t>(d)] =
                    std::max(ap.max_by_order[static_cast<std::size_t>(d)], std::abs(c));
        }
        out.push_back(std::move(ap));
    }
    return out;
}

}  // namespace nestmzi
