#pragma once

// Time-domain simulation. Mirror vibrations are far slower than the light's
// transit, so every time sample is an independent static propagation with
// each mirror frozen at its instantaneous deflection (quasi-static regime).
// Samples therefore parallelize trivially and results are byte-identical for
// any thread count.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/detect.hpp"
#include "nestmzi/fft.hpp"
#include "nestmzi/netlang.hpp"
#include "nestmzi/optics.hpp"

namespace nestmzi {

struct TimeBase {
    double rate_hz = 10000.0;
    double duration_s = 1.0;

    std::size_t sample_count() const {
        if (!(rate_hz > 0.0) || !(duration_s > 0.0))
            throw domain_error("sample rate and duration must be > 0");
        const double exact = rate_hz * duration_s;
        const double n = std::round(exact);
        if (std::abs(exact - n) > 1e-6 * std::max(n, 1.0))
            throw domain_error("duration times sample rate must be an integer");
        if (!(n >= 16.0) || n > 1e9)
            throw domain_error("sample count must lie in [16, 1e9]");
        return static_cast<std::size_t>(n);
    }

    double time(std::size_t j) const { return static_cast<double>(j) / rate_hz; }
};

struct SimulationResult {
    TimeBase time;
    std::vector<DetectorTrace> traces;  // detector file order
    double max_conservation_defect = 0.0;

    const DetectorTrace& trace(std::string_view name) const {
        for (const auto& t : traces)
            if (t.detector == name) return t;
        throw domain_error("no trace for detector '" + std::string(name) + "'");
    }
};

namespace detail {

struct Drive {
    int elem = -1;  // element index of the vibrating mirror
    double frequency_hz = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

inline std::vector<Drive> collect_drives(const ValidatedNetwork& vn) {
    std::vector<Drive> out;
    for (const int ei : vn.vibrating_mirrors) {
        const auto& v = *vn.spec.elements[static_cast<std::size_t>(ei)].vibration;
        out.push_back({ei, v.frequency_hz, v.amplitude, v.phase});
    }
    return out;
}

// Instantaneous deflection of each vibrating mirror, in drives order.
inline std::vector<double> drive_displacements(const std::vector<Drive>& drives, double t) {
    std::vector<double> disp(drives.size());
    for (std::size_t s = 0; s < drives.size(); ++s)
        disp[s] = drives[s].amplitude *
                  std::sin(2.0 * pi * drives[s].frequency_hz * t + drives[s].phase);
    return disp;
}

// The quasi-static picture needs every drive resolved by the sampling comb.
inline void check_nyquist(const TimeBase& tb, const std::vector<Drive>& drives) {
    for (const auto& d : drives)
        if (!(tb.rate_hz > 2.0 * d.frequency_hz))
            throw domain_error("sample rate must exceed twice every mirror frequency");
}

// Runs fn(j) over [0, count) on `threads` workers with contiguous chunks.
template <typename Fn>
void parallel_samples(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::size_t j = 0; j < count; ++j) fn(j);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = count * w / workers;
        const std::size_t hi = count * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t j = lo; j < hi; ++j) fn(j);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Zeroth-order (all mirrors at rest) complex amplitude per arm: the scalar
// transfer of the network, independent of engine or mode count.
inline TransferTable propagate_static(const ValidatedNetwork& vn) { return compile_transfer(vn); }

// ---------------------------------------------------------------------------
// Modal engine: per-arm coefficient vectors over K Hermite-Gauss modes.

struct ModalField {
    std::vector<Eigen::VectorXcd> arm_end;  // per arm id, after the inline chain
    std::map<std::string, Eigen::VectorXcd> detector_state;
    double absorbed_power = 0.0;
};

class ModalEngine {
public:
    ModalEngine(ValidatedNetwork vn, int mode_count)
        : vn_(std::move(vn)), factory_(mode_count), gram_(sign_gram(mode_count)) {
        drives_ = detail::collect_drives(vn_);
        slot_of_elem_.assign(vn_.spec.elements.size(), -1);
        for (std::size_t s = 0; s < drives_.size(); ++s)
            slot_of_elem_[static_cast<std::size_t>(drives_[s].elem)] = static_cast<int>(s);
    }

    int mode_count() const { return factory_.mode_count(); }
    const Eigen::MatrixXd& gram() const { return gram_; }
    const ValidatedNetwork& network() const { return vn_; }
    const std::vector<detail::Drive>& drives() const { return drives_; }

    // One static propagation; displacement_of_slot may be null (all at rest)
    // or hold one deflection per vibrating mirror, in drives() order.
    ModalField field(const double* displacement_of_slot = nullptr) const {
        const int K = factory_.mode_count();
        ModalField out;
        out.arm_end.assign(vn_.arms.size(), Eigen::VectorXcd());
        const auto run_chain = [&](int arm, Eigen::VectorXcd state) {
            for (const int ci : vn_.arms[static_cast<std::size_t>(arm)].chain) {
                const Element& c = vn_.spec.elements[static_cast<std::size_t>(ci)];
                if (c.kind == ElementKind::mirror) {
                    const int slot = slot_of_elem_[static_cast<std::size_t>(ci)];
                    const double d =
                        (slot >= 0 && displacement_of_slot) ? displacement_of_slot[slot] : 0.0;
                    if (d != 0.0) state = factory_.matrix(d) * state;
                } else if (c.kind == ElementKind::phase) {
                    state *= std::polar(1.0, c.angle);
                } else {
                    out.absorbed_power += state.squaredNorm();
                    state.setZero();
                }
            }
            out.arm_end[static_cast<std::size_t>(arm)] = std::move(state);
        };
        const Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(K);
        for (const int ei : vn_.node_order) {
            const Element& e = vn_.spec.elements[static_cast<std::size_t>(ei)];
            if (e.kind == ElementKind::source) {
                Eigen::VectorXcd s = Eigen::VectorXcd::Zero(K);
                s(0) = cplx(1.0, 0.0);
                run_chain(vn_.arm_of(e.out_arms[0]), std::move(s));
            } else if (e.kind == ElementKind::bs) {
                const BsCoeffs c = bs_coeffs(e.r);
                const cplx ir(0.0, c.r);
                const Eigen::VectorXcd& in1 =
                    e.in_arms[0] == "vac" ? vac
                                          : out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[0]))];
                const Eigen::VectorXcd& in2 =
                    e.in_arms[1] == "vac" ? vac
                                          : out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[1]))];
                run_chain(vn_.arm_of(e.out_arms[0]), c.t * in1 + ir * in2);
                run_chain(vn_.arm_of(e.out_arms[1]), ir * in1 + c.t * in2);
            } else if (e.kind == ElementKind::detector) {
                out.detector_state[e.name] =
                    out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[0]))];
            }
        }
        return out;
    }

    SimulationResult run(const TimeBase& tb, int threads = 1) const {
        SimulationResult res;
        res.time = tb;
        const std::size_t count = tb.sample_count();
        detail::check_nyquist(tb, drives_);
        for (const int d : vn_.detector_elems) {
            DetectorTrace t;
            t.detector = vn_.spec.elements[static_cast<std::size_t>(d)].name;
            t.s.assign(count, 0.0);
            t.p.assign(count, 0.0);
            res.traces.push_back(std::move(t));
        }
        std::vector<double> defects(count, 0.0);
        detail::parallel_samples(count, threads, [&](std::size_t j) {
            const std::vector<double> disp = detail::drive_displacements(drives_, tb.time(j));
            const ModalField f = field(disp.empty() ? nullptr : disp.data());
            double total = f.absorbed_power;
            for (std::size_t d = 0; d < res.traces.size(); ++d) {
                const auto& state = f.detector_state.at(res.traces[d].detector);
                const QuadCellReading q = quad_cell(state, gram_);
                res.traces[d].s[j] = q.s;
                res.traces[d].p[j] = q.p;
                total += q.p;
            }
            for (const int a : vn_.dangling_arms)
                total += f.arm_end[static_cast<std::size_t>(a)].squaredNorm();
            defects[j] = std::abs(total - static_cast<double>(vn_.source_arms.size()));
        });
        for (const double d : defects)
            res.max_conservation_defect = std::max(res.max_conservation_defect, d);
        return res;
    }

private:
    ValidatedNetwork vn_;
    DisplacementFactory factory_;
    Eigen::MatrixXd gram_;
    std::vector<detail::Drive> drives_;
    std::vector<int> slot_of_elem_;
};

// ---------------------------------------------------------------------------
// Grid engine: per-arm sampled profiles, propagated in the spatial-frequency
// domain. The source profile is transformed once; mirror shifts are diagonal
// phase multiplies; profiles return to real space only at detectors.

struct GridField {
    std::vector<std::vector<cplx>> arm_end;  // per arm id, spectrum after chain
    std::map<std::string, std::vector<cplx>> detector_psi;  // real space
    double absorbed_power = 0.0;
};

class GridEngine {
public:
    GridEngine(ValidatedNetwork vn, const Grid& grid)
        : vn_(std::move(vn)), grid_(grid), fft_(static_cast<std::size_t>(grid.n)) {
        // six beam widths of clearance keep the Gaussian tails and their
        // periodic images below double rounding at the box edge
        if (!(grid_.half_width >= 6.0 * vn_.spec.beam.width))
            throw domain_error("grid half-width must be at least six beam widths");
        drives_ = detail::collect_drives(vn_);
        slot_of_elem_.assign(vn_.spec.elements.size(), -1);
        for (std::size_t s = 0; s < drives_.size(); ++s)
            slot_of_elem_[static_cast<std::size_t>(drives_[s].elem)] = static_cast<int>(s);
        source_spectrum_ = gaussian_profile(grid_, vn_.spec.beam.width);
        fft_.forward(source_spectrum_.data());
        source_power_ = spectrum_power(source_spectrum_);
    }

    const Grid& grid() const { return grid_; }
    const ValidatedNetwork& network() const { return vn_; }

    double spectrum_power(const std::vector<cplx>& spec) const {
        double acc = 0.0;
        for (const cplx& v : spec) acc += std::norm(v);
        return acc * grid_.step / static_cast<double>(grid_.n);
    }

    GridField field(const double* displacement_of_slot = nullptr) const {
        GridField out;
        out.arm_end.assign(vn_.arms.size(), {});
        const std::size_t n = static_cast<std::size_t>(grid_.n);
        const auto run_chain = [&](int arm, std::vector<cplx> spec) {
            for (const int ci : vn_.arms[static_cast<std::size_t>(arm)].chain) {
                const Element& c = vn_.spec.elements[static_cast<std::size_t>(ci)];
                if (c.kind == ElementKind::mirror) {
                    const int slot = slot_of_elem_[static_cast<std::size_t>(ci)];
                    const double d =
                        (slot >= 0 && displacement_of_slot) ? displacement_of_slot[slot] : 0.0;
                    apply_shift_spectrum(grid_, d * vn_.spec.beam.width, spec.data());
                } else if (c.kind == ElementKind::phase) {
                    const cplx ph = std::polar(1.0, c.angle);
                    for (cplx& v : spec) v *= ph;
                } else {
                    out.absorbed_power += spectrum_power(spec);
                    std::fill(spec.begin(), spec.end(), cplx(0.0, 0.0));
                }
            }
            out.arm_end[static_cast<std::size_t>(arm)] = std::move(spec);
        };
        const std::vector<cplx> vac(n, cplx(0.0, 0.0));
        for (const int ei : vn_.node_order) {
            const Element& e = vn_.spec.elements[static_cast<std::size_t>(ei)];
            if (e.kind == ElementKind::source) {
                run_chain(vn_.arm_of(e.out_arms[0]), source_spectrum_);
            } else if (e.kind == ElementKind::bs) {
                const BsCoeffs c = bs_coeffs(e.r);
                const cplx ir(0.0, c.r);
                const std::vector<cplx>& in1 =
                    e.in_arms[0] == "vac" ? vac
                                          : out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[0]))];
                const std::vector<cplx>& in2 =
                    e.in_arms[1] == "vac" ? vac
                                          : out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[1]))];
                std::vector<cplx> o1(n), o2(n);
                for (std::size_t k = 0; k < n; ++k) {
                    o1[k] = c.t * in1[k] + ir * in2[k];
                    o2[k] = ir * in1[k] + c.t * in2[k];
                }
                run_chain(vn_.arm_of(e.out_arms[0]), std::move(o1));
                run_chain(vn_.arm_of(e.out_arms[1]), std::move(o2));
            } else if (e.kind == ElementKind::detector) {
                std::vector<cplx> psi = out.arm_end[static_cast<std::size_t>(vn_.arm_of(e.in_arms[0]))];
                fft_.inverse(psi.data());
                out.detector_psi[e.name] = std::move(psi);
            }
        }
        return out;
    }

    SimulationResult run(const TimeBase& tb, int threads = 1) const {
        SimulationResult res;
        res.time = tb;
        const std::size_t count = tb.sample_count();
        detail::check_nyquist(tb, drives_);
        for (const int d : vn_.detector_elems) {
            DetectorTrace t;
            t.detector = vn_.spec.elements[static_cast<std::size_t>(d)].name;
            t.s.assign(count, 0.0);
            t.p.assign(count, 0.0);
            res.traces.push_back(std::move(t));
        }
        std::vector<double> defects(count, 0.0);
        detail::parallel_samples(count, threads, [&](std::size_t j) {
            const std::vector<double> disp = detail::drive_displacements(drives_, tb.time(j));
            const GridField f = field(disp.empty() ? nullptr : disp.data());
            double total = f.absorbed_power;
            for (std::size_t d = 0; d < res.traces.size(); ++d) {
                const auto& psi = f.detector_psi.at(res.traces[d].detector);
                const QuadCellReading q = quad_cell(grid_, psi);
                res.traces[d].s[j] = q.s;
                res.traces[d].p[j] = q.p;
                total += q.p;
            }
            for (const int a : vn_.dangling_arms)
                total += spectrum_power(f.arm_end[static_cast<std::size_t>(a)]);
            defects[j] = std::abs(total - source_power_ * static_cast<double>(vn_.source_arms.size()));
        });
        for (const double d : defects)
            res.max_conservation_defect = std::max(res.max_conservation_defect, d);
        return res;
    }

private:
    ValidatedNetwork vn_;
    Grid grid_;
    Fft fft_;
    std::vector<detail::Drive> drives_;
    std::vector<int> slot_of_elem_;
    std::vector<cplx> source_spectrum_;
    double source_power_ = 0.0;
};

}  // namespace nestmzi
