#pragma once

// Two-state-vector analysis at zeroth order. The forward state is the static
// transfer of the source; the backward state is the chosen detector's mode
// pulled back through the adjoint network. Weak values of arm projectors then
// say how much each arm contributes to the postselected amplitude, and the
// report compares backward-state conventions side by side.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/netlang.hpp"
#include "nestmzi/optics.hpp"

namespace nestmzi {

// Overlaps at or below this magnitude make weak values undefined; that is a
// reportable finding (dark-port postselection), never an exception.
inline constexpr double overlap_floor = 1e-12;

// A topological cut: the set of arms live right after one node has acted.
struct CutView {
    std::string id;         // alphabetical arm names joined with ','
    std::vector<int> arms;  // arm ids in production order
    int node = -1;          // element index of the node this cut follows
};

inline std::vector<CutView> list_cuts(const ValidatedNetwork& vn) {
    std::vector<CutView> out;
    for (std::size_t k = 0; k < vn.node_order.size(); ++k) {
        const Element& e = vn.spec.elements[static_cast<std::size_t>(vn.node_order[k])];
        if (e.kind == ElementKind::detector) continue;
        CutView cv;
        cv.node = vn.node_order[k];
        cv.arms = vn.cuts[k];
        std::vector<std::string> names;
        for (const int a : cv.arms) names.push_back(vn.arms[static_cast<std::size_t>(a)].name);
        std::sort(names.begin(), names.end());
        for (const auto& n : names) {
            if (!cv.id.empty()) cv.id += ',';
            cv.id += n;
        }
        out.push_back(std::move(cv));
    }
    return out;
}

// Finds the cut whose arm-name set matches `names` exactly.
inline const CutView* find_cut(const std::vector<CutView>& cuts,
                               std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    std::string id;
    for (const auto& n : names) {
        if (!id.empty()) id += ',';
        id += n;
    }
    for (const auto& c : cuts)
        if (c.id == id) return &c;
    return nullptr;
}

struct ForwardState {
    std::string cut;
    std::vector<std::string> arms;
    std::vector<cplx> amps;
};

struct BackwardState {
    std::string cut;
    std::string convention;  // "adjoint", "c_arm_only", or "custom"
    std::vector<std::string> arms;
    std::vector<cplx> amps;
};

namespace detail {

// Backward amplitude at every arm end for a unit excitation of the chosen
// detector, from a reverse walk over the node order. Phases conjugate, static
// mirrors pass through, blocks pass zero backward just as they do forward.
inline std::vector<cplx> backward_arm_end(const ValidatedNetwork& vn,
                                          const std::string& detector) {
    int det_elem = -1;
    for (const int d : vn.detector_elems)
        if (vn.spec.elements[static_cast<std::size_t>(d)].name == detector) det_elem = d;
    if (det_elem < 0) throw domain_error("no detector named '" + detector + "'");

    std::vector<cplx> phi_end(vn.arms.size(), cplx(0.0, 0.0));
    const auto pull_chain = [&](int arm) -> cplx {
        cplx phi = phi_end[static_cast<std::size_t>(arm)];
        const auto& chain = vn.arms[static_cast<std::size_t>(arm)].chain;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Element& c = vn.spec.elements[static_cast<std::size_t>(*it)];
            if (c.kind == ElementKind::phase)
                phi *= std::polar(1.0, -c.angle);
            else if (c.kind == ElementKind::block)
                phi = cplx(0.0, 0.0);
        }
        return phi;
    };

    for (auto it = vn.node_order.rbegin(); it != vn.node_order.rend(); ++it) {
        const Element& e = vn.spec.elements[static_cast<std::size_t>(*it)];
        if (e.kind == ElementKind::detector) {
            const int a = vn.arm_of(e.in_arms[0]);
            phi_end[static_cast<std::size_t>(a)] =
                (*it == det_elem) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
        } else if (e.kind == ElementKind::bs) {
            const BsCoeffs c = bs_coeffs(e.r);
            const cplx rm(0.0, -c.r);  // conj(i r)
            const cplx po1 = pull_chain(vn.arm_of(e.out_arms[0]));
            const cplx po2 = pull_chain(vn.arm_of(e.out_arms[1]));
            if (e.in_arms[0] != "vac")
                phi_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[0]))] = c.t * po1 + rm * po2;
            if (e.in_arms[1] != "vac")
                phi_end[static_cast<std::size_t>(vn.arm_of(e.in_arms[1]))] = rm * po1 + c.t * po2;
        }
    }
    return phi_end;
}

inline CutView require_cut(const ValidatedNetwork& vn, const std::vector<std::string>& names) {
    const auto cuts = list_cuts(vn);
    const CutView* cv = find_cut(cuts, names);
    if (!cv) throw domain_error("arm set does not form a topological cut");
    return *cv;
}

}  // namespace detail

// Zeroth-order forward amplitudes on one cut, with all mirrors at rest.
inline ForwardState forward_state(const ValidatedNetwork& vn,
                                  const std::vector<std::string>& cut_arms) {
    const CutView cv = detail::require_cut(vn, cut_arms);
    const TransferTable tt = compile_transfer(vn);
    ForwardState fw;
    fw.cut = cv.id;
    for (const int a : cv.arms) {
        fw.arms.push_back(vn.arms[static_cast<std::size_t>(a)].name);
        fw.amps.push_back(tt.arm_end[static_cast<std::size_t>(a)]);
    }
    return fw;
}

// Backward state on one cut. `c_arm` names the arm kept by the c_arm_only
// convention; `custom` supplies explicit amplitudes and must cover the cut's
// arms exactly. The c_arm_only state is renormalized to unit norm.
inline BackwardState backward_state(const ValidatedNetwork& vn, const std::string& detector,
                                    const std::string& convention,
                                    const std::vector<std::string>& cut_arms,
                                    const std::string& c_arm = "C",
                                    const std::map<std::string, cplx>& custom = {}) {
    const CutView cv = detail::require_cut(vn, cut_arms);
    BackwardState bw;
    bw.cut = cv.id;
    bw.convention = convention;
    for (const int a : cv.arms) bw.arms.push_back(vn.arms[static_cast<std::size_t>(a)].name);

    if (convention == "adjoint" || convention == "c_arm_only") {
        const std::vector<cplx> phi = detail::backward_arm_end(vn, detector);
        for (const int a : cv.arms) bw.amps.push_back(phi[static_cast<std::size_t>(a)]);
        if (convention == "c_arm_only") {
            double norm2 = 0.0;
            for (std::size_t i = 0; i < bw.arms.size(); ++i) {
                if (bw.arms[i] != c_arm) bw.amps[i] = cplx(0.0, 0.0);
                norm2 += std::norm(bw.amps[i]);
            }
            if (!(norm2 > overlap_floor * overlap_floor))
                throw domain_error("backward state has zero norm on this cut");
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& v : bw.amps) v *= inv;
        }
    } else if (convention == "custom") {
        for (const auto& [name, _] : custom)
            if (std::find(bw.arms.begin(), bw.arms.end(), name) == bw.arms.end())
                throw domain_error("custom state names unknown arm '" + name + "'");
        double norm2 = 0.0;
        for (const auto& name : bw.arms) {
            const auto it = custom.find(name);
            const cplx v = it == custom.end() ? cplx(0.0, 0.0) : it->second;
            bw.amps.push_back(v);
            norm2 += std::norm(v);
        }
        if (!(norm2 > overlap_floor * overlap_floor))
            throw domain_error("backward state has zero norm on this cut");
    } else {
        throw domain_error("unknown backward-state convention '" + convention + "'");
    }
    return bw;
}

inline cplx state_overlap(const ForwardState& fw, const BackwardState& bw) {
    if (fw.cut != bw.cut) throw domain_error("states live on different cuts");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < fw.amps.size(); ++i) acc += std::conj(bw.amps[i]) * fw.amps[i];
    return acc;
}

// Weak value of the projector onto one arm; empty when the postselection
// overlap vanishes (then no weak value exists, which is itself a finding).
inline std::optional<cplx> weak_value(const ForwardState& fw, const BackwardState& bw,
                                      const std::string& arm) {
    const cplx ov = state_overlap(fw, bw);
    if (!(std::abs(ov) > overlap_floor)) return std::nullopt;
    for (std::size_t i = 0; i < fw.arms.size(); ++i)
        if (fw.arms[i] == arm) return std::conj(bw.amps[i]) * fw.amps[i] / ov;
    throw domain_error("arm '" + arm + "' is not on this cut");
}

// ---------------------------------------------------------------------------
// Side-by-side report over every cut and convention

struct ArmWeakRow {
    std::string name;
    cplx forward{};
    cplx backward{};
    std::optional<cplx> weak;  // empty when undefined
    bool forward_present_weak_zero = false;
};

struct CutConventionReport {
    std::string cut;
    std::string convention;
    std::vector<ArmWeakRow> arms;
    cplx overlap{};
    std::optional<cplx> sum_weak;
    bool defined = false;  // backward state exists and the overlap is nonzero
    std::string note;      // reason, when not defined
};

struct WeakValueReport {
    std::string detector;
    std::vector<CutConventionReport> entries;
};

namespace detail {

inline CutConventionReport cut_report(const ForwardState& fw, const BackwardState& bw) {
    CutConventionReport rep;
    rep.cut = fw.cut;
    rep.convention = bw.convention;
    rep.overlap = state_overlap(fw, bw);
    const bool defined = std::abs(rep.overlap) > overlap_floor;
    rep.defined = defined;
    if (!defined) rep.note = "postselection overlap vanishes";
    cplx sum(0.0, 0.0);
    for (std::size_t i = 0; i < fw.arms.size(); ++i) {
        ArmWeakRow row;
        row.name = fw.arms[i];
        row.forward = fw.amps[i];
        row.backward = bw.amps[i];
        if (defined) {
            const cplx w = std::conj(bw.amps[i]) * fw.amps[i] / rep.overlap;
            row.weak = w;
            sum += w;
            row.forward_present_weak_zero =
                std::abs(fw.amps[i]) > overlap_floor && std::abs(w) <= overlap_floor;
        }
        rep.arms.push_back(std::move(row));
    }
    if (defined) rep.sum_weak = sum;
    return rep;
}

}  // namespace detail

// Full comparison: every cut, adjoint always, c_arm_only when the network has
// an arm with that name, custom (if supplied) on the single cut its arm set
// covers. Undefined entries are reported, not raised.
inline WeakValueReport weak_trace_report(const ValidatedNetwork& vn, const std::string& detector,
                                         const std::string& c_arm = "C",
                                         const std::map<std::string, cplx>& custom = {}) {
    WeakValueReport report;
    report.detector = detector;
    const auto cuts = list_cuts(vn);
    const TransferTable tt = compile_transfer(vn);
    const std::vector<cplx> phi = detail::backward_arm_end(vn, detector);
    const bool have_c_arm = vn.arm_index.count(c_arm) > 0;

    for (const auto& cv : cuts) {
        ForwardState fw;
        fw.cut = cv.id;
        for (const int a : cv.arms) {
            fw.arms.push_back(vn.arms[static_cast<std::size_t>(a)].name);
            fw.amps.push_back(tt.arm_end[static_cast<std::size_t>(a)]);
        }

        BackwardState adj;
        adj.cut = cv.id;
        adj.convention = "adjoint";
        adj.arms = fw.arms;
        for (const int a : cv.arms) adj.amps.push_back(phi[static_cast<std::size_t>(a)]);
        report.entries.push_back(detail::cut_report(fw, adj));

        if (have_c_arm) {
            BackwardState ca = adj;
            ca.convention = "c_arm_only";
            double norm2 = 0.0;
            for (std::size_t i = 0; i < ca.arms.size(); ++i) {
                if (ca.arms[i] != c_arm) ca.amps[i] = cplx(0.0, 0.0);
                norm2 += std::norm(ca.amps[i]);
            }
            if (norm2 > overlap_floor * overlap_floor) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& v : ca.amps) v *= inv;
                report.entries.push_back(detail::cut_report(fw, ca));
            } else {
                CutConventionReport rep;
                rep.cut = cv.id;
                rep.convention = "c_arm_only";
                rep.note = "backward state has zero norm on this cut";
                for (std::size_t i = 0; i < fw.arms.size(); ++i) {
                    ArmWeakRow row;
                    row.name = fw.arms[i];
                    row.forward = fw.amps[i];
                    rep.arms.push_back(std::move(row));
                }
                report.entries.push_back(std::move(rep));
            }
        }

        if (!custom.empty()) {
            std::vector<std::string> names;
            for (const auto& [n, _] : custom) names.push_back(n);
            std::sort(names.begin(), names.end());
            std::vector<std::string> here = fw.arms;
            std::sort(here.begin(), here.end());
            if (names == here) {
                const BackwardState cb =
                    backward_state(vn, detector, "custom", fw.arms, c_arm, custom);
                report.entries.push_back(detail::cut_report(fw, cb));
            }
        }
    }
    return report;
}

}  // namespace nestmzi
