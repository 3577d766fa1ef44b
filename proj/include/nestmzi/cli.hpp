#pragma once

// Scenario runner behind the command-line tool. Each subcommand is a plain
// function from a parsed configuration to an exit code, so tests can drive
// them without spawning processes. Exit convention: 0 success, 1 runtime
// failure, 2 usage or network-parse failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/detect.hpp"
#include "nestmzi/netlang.hpp"
#include "nestmzi/orders.hpp"
#include "nestmzi/presets.hpp"
#include "nestmzi/propagate.hpp"
#include "nestmzi/report.hpp"
#include "nestmzi/spectrum.hpp"
#include "nestmzi/tsvf.hpp"

namespace nestmzi {

// Errors in how the tool was invoked, as opposed to errors while computing.
class usage_error : public domain_error {
public:
    using domain_error::domain_error;
};

struct EngineMode {
    bool modal = true;
    int mode_count = 4;       // modal basis size
    int grid_points = 1024;   // grid sample count
    double half_width = 6.0;  // grid half-width
};

// Accepts "modal", "modal:K", "grid", "grid:N", "grid:N,L".
inline EngineMode parse_mode(const std::string& text) {
    EngineMode m;
    std::string kind = text;
    std::string args;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        kind = text.substr(0, colon);
        args = text.substr(colon + 1);
    }
    try {
        if (kind == "modal") {
            if (!args.empty()) m.mode_count = std::stoi(args);
            m.modal = true;
            if (m.mode_count < 1 || m.mode_count > 64)
                throw usage_error("modal mode count must lie in [1, 64]");
            return m;
        }
        if (kind == "grid") {
            m.modal = false;
            if (!args.empty()) {
                const auto comma = args.find(',');
                m.grid_points = std::stoi(args.substr(0, comma));
                if (comma != std::string::npos) m.half_width = std::stod(args.substr(comma + 1));
            }
            if (m.grid_points < 4) throw usage_error("grid needs at least 4 points");
            if (!(m.half_width > 0.0)) throw usage_error("grid half-width must be > 0");
            return m;
        }
    } catch (const usage_error&) {
        throw;
    } catch (const std::exception&) {
        throw usage_error("cannot parse mode '" + text + "'");
    }
    throw usage_error("mode must be modal[:K] or grid[:N[,L]], got '" + text + "'");
}

struct ScenarioConfig {
    std::string preset;
    std::string net_file;
    std::string mode_text = "modal";
    double rate_hz = 10000.0;
    double duration_s = 1.0;
    double eps_scale = 1.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    std::string detector;
    std::string c_arm = "C";
    std::string out_dir = ".";
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string network_text(const ScenarioConfig& cfg) {
    if (!cfg.preset.empty() && !cfg.net_file.empty())
        throw usage_error("give either a preset or a network file, not both");
    if (!cfg.preset.empty()) return load_preset(cfg.preset);
    if (!cfg.net_file.empty()) return read_file(cfg.net_file);
    throw usage_error("a network is required: --preset NAME or --net FILE");
}

inline ValidatedNetwork prepared_network(const ScenarioConfig& cfg) {
    if (!(cfg.eps_scale > 0.0)) throw usage_error("eps-scale must be > 0");
    const NetworkSpec spec = parse_network(network_text(cfg));
    return validate(scale_vibrations(spec, cfg.eps_scale));
}

inline std::string pick_detector(const ValidatedNetwork& vn, const ScenarioConfig& cfg) {
    std::vector<std::string> names;
    for (const int d : vn.detector_elems)
        names.push_back(vn.spec.elements[static_cast<std::size_t>(d)].name);
    if (names.empty()) throw usage_error("network has no detector");
    if (cfg.detector.empty()) {
        if (names.size() == 1) return names[0];
        std::string msg = "--detector required; choices:";
        for (const auto& n : names) msg += " " + n;
        throw usage_error(msg);
    }
    for (const auto& n : names)
        if (n == cfg.detector) return n;
    throw domain_error("no detector named '" + cfg.detector + "'");
}

inline int worker_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

inline SimulationResult run_simulation(const ValidatedNetwork& vn, const EngineMode& mode,
                                       const TimeBase& tb) {
    if (mode.modal) return ModalEngine(vn, mode.mode_count).run(tb, worker_threads());
    return GridEngine(vn, make_grid(mode.grid_points, mode.half_width)).run(tb, worker_threads());
}

// Sorted unique vibration frequencies with their "f_<arm>" labels.
inline std::vector<std::pair<std::string, double>> drive_lines(const ValidatedNetwork& vn) {
    std::vector<std::pair<std::string, double>> out;
    for (const int ei : vn.vibrating_mirrors) {
        const Element& e = vn.spec.elements[static_cast<std::size_t>(ei)];
        out.emplace_back("f_" + e.in_arms[0], e.vibration->frequency_hz);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot write '" + path.string() + "'");
    out << content;
}

inline void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// run: simulate, write signal and spectrum files plus a summary report

inline int cmd_run(const ScenarioConfig& cfg) {
    const ValidatedNetwork vn = detail::prepared_network(cfg);
    // run writes every detector; a named detector is only checked for typos
    if (!cfg.detector.empty()) (void)detail::pick_detector(vn, cfg);
    const EngineMode mode = parse_mode(cfg.mode_text);
    const TimeBase tb{cfg.rate_hz, cfg.duration_s};
    SimulationResult res = detail::run_simulation(vn, mode, tb);
    for (std::size_t d = 0; d < res.traces.size(); ++d)
        add_noise(res.traces[d], cfg.noise_sigma, cfg.seed + d);

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    const auto lines = detail::drive_lines(vn);
    std::vector<double> probes;
    for (const auto& [_, f] : lines) probes.push_back(f);

    ordered_json rep;
    rep["network"] = cfg.preset.empty() ? cfg.net_file : cfg.preset;
    rep["mode"] = cfg.mode_text;
    rep["sample_rate_hz"] = tb.rate_hz;
    rep["duration_s"] = tb.duration_s;
    rep["eps_scale"] = cfg.eps_scale;
    rep["noise_sigma"] = cfg.noise_sigma;
    rep["seed"] = cfg.seed;
    rep["max_conservation_defect"] = res.max_conservation_defect;
    ordered_json dets = ordered_json::array();

    for (const auto& tr : res.traces) {
        {
            std::ostringstream csv;
            report::write_signal_csv(csv, res, tr.detector);
            detail::write_text_file(out_dir / (tr.detector + "_signal.csv"), csv.str());
        }
        const Spectrum sp_s = power_spectrum(tr.s, tb.rate_hz, Window::rect);
        const Spectrum sp_p = power_spectrum(tr.p, tb.rate_hz, Window::rect);
        {
            std::ostringstream csv;
            write_spectrum_csv(csv, sp_s);
            detail::write_text_file(out_dir / (tr.detector + "_spectrum.csv"), csv.str());
        }
        {
            std::ostringstream csv;
            write_spectrum_csv(csv, sp_p);
            detail::write_text_file(out_dir / (tr.detector + "_power_spectrum.csv"), csv.str());
        }

        PeakTable pk_s = peak_table(sp_s, probes);
        PeakTable pk_p = peak_table(sp_p, probes);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            pk_s.rows[i].label = lines[i].first;
            pk_p.rows[i].label = lines[i].first;
        }

        double mean_p = 0.0, min_p = 0.0;
        if (!tr.p.empty()) {
            min_p = tr.p[0];
            for (const double v : tr.p) {
                mean_p += v;
                min_p = std::min(min_p, v);
            }
            mean_p /= static_cast<double>(tr.p.size());
        }
        ordered_json dj;
        dj["name"] = tr.detector;
        dj["mean_total_power"] = mean_p;
        // normalized S/P is only meaningful when P stays clear of zero
        dj["normalized_defined"] = min_p > 1e-12;
        dj["peaks"]["difference"] = report::peak_table_json(pk_s);
        dj["peaks"]["power"] = report::peak_table_json(pk_p);
        dets.push_back(std::move(dj));
    }
    rep["detectors"] = std::move(dets);
    detail::write_json_file(out_dir / "run_report.json", rep);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep: rerun at several effective deflections and fit per-line exponents

inline int cmd_sweep(const ScenarioConfig& cfg, const std::vector<double>& eps_list) {
    if (eps_list.size() < 3) throw usage_error("sweep needs at least three eps values");
    for (const double e : eps_list)
        if (!(e > 0.0)) throw usage_error("eps values must be > 0");

    const NetworkSpec base = parse_network(detail::network_text(cfg));
    const ValidatedNetwork vn0 = validate(base);
    const std::string det = detail::pick_detector(vn0, cfg);
    const EngineMode mode = parse_mode(cfg.mode_text);
    const TimeBase tb{cfg.rate_hz, cfg.duration_s};

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    ordered_json rep;
    rep["network"] = cfg.preset.empty() ? cfg.net_file : cfg.preset;
    rep["detector"] = det;
    rep["mode"] = cfg.mode_text;
    rep["window"] = "rect";
    rep["eps"] = eps_list;
    // reference scaling exponents for spectral peak power: a line of leading
    // order n has amplitude ~ eps^n, hence power ~ eps^(2n)
    rep["reference_exponents"]["first_order_lines"] = 2.0;
    rep["reference_exponents"]["second_order_lines"] = 4.0;

    if (vn0.vibrating_mirrors.empty()) {
        rep["lines"] = ordered_json::array();
        rep["note"] = "no lines";
        detail::write_json_file(out_dir / "sweep_report.json", rep);
        return 0;
    }

    const double amp_ref =
        vn0.spec.elements[static_cast<std::size_t>(vn0.vibrating_mirrors[0])].vibration->amplitude;
    const SymbolicField sf = symbolic_propagate(vn0, 2);
    const LineTable lt = classify_lines(vn0, sf, det);

    // one simulation per eps, both readout channels
    std::vector<Spectrum> spectra_s, spectra_p;
    double worst_defect = 0.0;
    for (const double eps : eps_list) {
        const ValidatedNetwork vn = validate(scale_vibrations(base, eps / amp_ref));
        const SimulationResult res = detail::run_simulation(vn, mode, tb);
        worst_defect = std::max(worst_defect, res.max_conservation_defect);
        const DetectorTrace& tr = res.trace(det);
        spectra_s.push_back(power_spectrum(tr.s, tb.rate_hz, Window::rect));
        spectra_p.push_back(power_spectrum(tr.p, tb.rate_hz, Window::rect));
    }
    rep["max_conservation_defect"] = worst_defect;

    ordered_json rows = ordered_json::array();
    for (const auto& line : lt.rows) {
        const auto& spectra = line.channel == Channel::difference ? spectra_s : spectra_p;
        std::vector<double> powers, predicted;
        for (std::size_t i = 0; i < eps_list.size(); ++i) {
            powers.push_back(peak_power(spectra[i], line.frequency_hz));
            predicted.push_back(predicted_peak_power(line, eps_list[i]));
        }
        ordered_json row;
        row["line"] = line.label;
        row["channel"] = report::channel_name(line.channel);
        row["freq_hz"] = line.frequency_hz;
        row["leading_order"] = line.leading_order;
        row["reference_exponent"] = 2.0 * line.leading_order;
        row["peak_powers"] = powers;
        row["predicted_powers"] = predicted;
        bool fittable = true;
        for (const double p : powers) fittable = fittable && p > 0.0;
        if (fittable) {
            const PowerFit fit = fit_exponent(eps_list, powers);
            row["measured_exponent"] = fit.exponent;
            row["intercept"] = fit.intercept;
            row["r_squared"] = fit.r_squared;
        } else {
            row["measured_exponent"] = nullptr;
            row["note"] = "peak vanished at some eps; no fit";
        }
        rows.push_back(std::move(row));
    }
    rep["lines"] = std::move(rows);
    if (lt.rows.empty()) rep["note"] = "no lines";
    detail::write_json_file(out_dir / "sweep_report.json", rep);
    return 0;
}

// ---------------------------------------------------------------------------
// weak: two-state-vector report

inline int cmd_weak(const ScenarioConfig& cfg, const std::string& convention,
                    bool all_conventions, const std::string& custom_file) {
    const ValidatedNetwork vn = detail::prepared_network(cfg);
    const std::string det = detail::pick_detector(vn, cfg);

    std::map<std::string, cplx> custom;
    if (!custom_file.empty()) {
        ordered_json j;
        try {
            j = ordered_json::parse(detail::read_file(custom_file));
        } catch (const usage_error&) {
            throw;
        } catch (const std::exception& e) {
            throw usage_error("cannot parse custom state file: " + std::string(e.what()));
        }
        if (!j.is_object() || j.empty())
            throw usage_error("custom state file must be a non-empty object of arm: [re, im]");
        for (const auto& [arm, val] : j.items()) {
            if (!val.is_array() || val.size() != 2 || !val[0].is_number() || !val[1].is_number())
                throw usage_error("custom state for arm '" + arm + "' must be [re, im]");
            custom[arm] = cplx(val[0].get<double>(), val[1].get<double>());
        }
    }

    WeakValueReport full = weak_trace_report(vn, det, cfg.c_arm, custom);
    if (!custom.empty()) {
        bool any_custom = false;
        for (const auto& e : full.entries) any_custom = any_custom || e.convention == "custom";
        if (!any_custom)
            throw domain_error("custom state arms do not cover any topological cut");
    }

    if (!all_conventions && !convention.empty()) {
        const std::string want = convention == "c-arm" ? "c_arm_only" : convention;
        if (want != "adjoint" && want != "c_arm_only" && want != "custom")
            throw usage_error("convention must be adjoint, c-arm, or custom");
        WeakValueReport filtered;
        filtered.detector = full.detector;
        for (auto& e : full.entries)
            if (e.convention == want) filtered.entries.push_back(std::move(e));
        full = std::move(filtered);
    }

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    detail::write_json_file(out_dir / "weak_report.json", report::weak_report_json(full));
    return 0;
}

// ---------------------------------------------------------------------------
// orders: symbolic line table, arm presence, optional simulated verification

inline int cmd_orders(const ScenarioConfig& cfg, int max_degree, bool verify) {
    if (max_degree < 0 || max_degree > 3)
        throw usage_error("max-degree must lie in [0, 3]");
    const ValidatedNetwork vn = detail::prepared_network(cfg);
    const std::string det = detail::pick_detector(vn, cfg);

    const SymbolicField sf = symbolic_propagate(vn, max_degree);
    const LineTable lt = classify_lines(vn, sf, det);
    const std::vector<ArmPresence> presence = arm_presence_report(vn, sf);

    ordered_json rep;
    rep["network"] = cfg.preset.empty() ? cfg.net_file : cfg.preset;
    rep["detector"] = det;
    rep["max_degree"] = max_degree;
    rep["eps_ref"] = lt.eps_ref;
    rep["lines"] = report::line_table_json(lt, lt.eps_ref);
    rep["arm_presence"] = report::arm_presence_json(presence);

    if (verify) {
        const EngineMode mode = parse_mode(cfg.mode_text);
        const TimeBase tb{cfg.rate_hz, cfg.duration_s};
        const SimulationResult res = detail::run_simulation(vn, mode, tb);
        const DetectorTrace& tr = res.trace(det);
        const Spectrum sp_s = power_spectrum(tr.s, tb.rate_hz, Window::rect);
        const Spectrum sp_p = power_spectrum(tr.p, tb.rate_hz, Window::rect);
        ordered_json rows = ordered_json::array();
        for (const auto& line : lt.rows) {
            const Spectrum& sp = line.channel == Channel::difference ? sp_s : sp_p;
            const double measured = peak_power(sp, line.frequency_hz);
            const double predicted = predicted_peak_power(line, lt.eps_ref);
            ordered_json row;
            row["line"] = line.label;
            row["channel"] = report::channel_name(line.channel);
            row["freq_hz"] = line.frequency_hz;
            row["order"] = line.leading_order;
            row["predicted"] = predicted;
            row["measured"] = measured;
            row["ratio"] = predicted > 0.0 ? measured / predicted : 0.0;
            rows.push_back(std::move(row));
        }
        rep["verification"] = std::move(rows);
    }

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    detail::write_json_file(out_dir / "orders_report.json", rep);
    return 0;
}

}  // namespace nestmzi
