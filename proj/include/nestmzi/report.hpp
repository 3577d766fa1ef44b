#pragma once

// JSON and CSV emission. All emitters are deterministic: object keys keep
// insertion order, floats print as shortest round-trip decimals, and complex
// numbers serialize as [re, im] pairs.

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/netlang.hpp"
#include "nestmzi/orders.hpp"
#include "nestmzi/propagate.hpp"
#include "nestmzi/spectrum.hpp"
#include "nestmzi/tsvf.hpp"

namespace nestmzi {

using ordered_json = nlohmann::ordered_json;

namespace report {

inline ordered_json complex_json(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

inline std::string channel_name(Channel ch) {
    return ch == Channel::difference ? "difference" : "power";
}

// Signal series per detector: one row per sample.
inline void write_signal_csv(std::ostream& os, const SimulationResult& res,
                             const std::string& detector) {
    const DetectorTrace& tr = res.trace(detector);
    os << "t_s,S,P\n";
    for (std::size_t j = 0; j < tr.s.size(); ++j) {
        os << detail::format_double(res.time.time(j)) << ','
           << detail::format_double(tr.s[j]) << ',' << detail::format_double(tr.p[j]) << '\n';
    }
}

inline ordered_json peak_table_json(const PeakTable& pt) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : pt.rows) {
        ordered_json row;
        row["label"] = r.label;
        row["probe_hz"] = r.probe_hz;
        row["bin_hz"] = r.bin_hz;
        row["power"] = r.power;
        row["noise_floor"] = r.noise_floor;
        rows.push_back(std::move(row));
    }
    return rows;
}

// Line table rows; predicted_power is evaluated at the given effective
// reference deflection.
inline ordered_json line_table_json(const LineTable& lt, double eps) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : lt.rows) {
        ordered_json row;
        row["line"] = r.label;
        row["channel"] = channel_name(r.channel);
        row["freq_hz"] = r.frequency_hz;
        row["order"] = r.leading_order;
        row["coefficient"] = r.coefficient;
        row["interferes_with_zeroth"] = r.interferes_with_zeroth;
        row["predicted_power"] = predicted_peak_power(r, eps);
        ordered_json oc;
        for (const auto& [deg, amp] : r.order_coefficients) oc[std::to_string(deg)] = amp;
        row["order_coefficients"] = std::move(oc);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json arm_presence_json(const std::vector<ArmPresence>& rows) {
    ordered_json out = ordered_json::array();
    for (const auto& ap : rows) {
        for (std::size_t order = 0; order < ap.max_by_order.size(); ++order) {
            ordered_json row;
            row["arm"] = ap.arm;
            row["order"] = order;
            row["magnitude"] = ap.max_by_order[order];
            out.push_back(std::move(row));
        }
    }
    return out;
}

inline ordered_json weak_report_json(const WeakValueReport& rep) {
    ordered_json out;
    out["detector"] = rep.detector;
    ordered_json entries = ordered_json::array();
    for (const auto& e : rep.entries) {
        ordered_json entry;
        entry["cut"] = e.cut;
        entry["convention"] = e.convention;
        ordered_json arms = ordered_json::array();
        for (const auto& a : e.arms) {
            ordered_json row;
            row["name"] = a.name;
            row["forward"] = complex_json(a.forward);
            row["backward"] = complex_json(a.backward);
            if (a.weak)
                row["weak_value"] = complex_json(*a.weak);
            else
                row["weak_value"] = "undefined";
            row["forward_present_weak_zero"] = a.forward_present_weak_zero;
            arms.push_back(std::move(row));
        }
        entry["arms"] = std::move(arms);
        if (e.sum_weak)
            entry["sum_weak"] = complex_json(*e.sum_weak);
        else
            entry["sum_weak"] = "undefined";
        entry["overlap"] = complex_json(e.overlap);
        entry["defined"] = e.defined;
        if (!e.note.empty()) entry["note"] = e.note;
        entries.push_back(std::move(entry));
    }
    out["entries"] = std::move(entries);
    return out;
}

}  // namespace report
}  // namespace nestmzi
