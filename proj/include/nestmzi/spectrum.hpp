#pragma once

// One-sided power spectra of detector traces, calibrated in amplitude power:
// a unit sinusoid centered on a bin reports 1.0 there, a constant offset c
// reports c^2 at DC. Windowing renormalizes by the window's coherent gain so
// bin-centered tones keep their calibration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/fft.hpp"
#include "nestmzi/netlang.hpp"

namespace nestmzi {

enum class Window { rect, hann };

struct Spectrum {
    double rate_hz = 0.0;
    std::size_t sample_count = 0;
    std::vector<double> freq_hz;  // bins 0 .. floor(N/2)
    std::vector<double> power;

    double bin_width_hz() const { return rate_hz / static_cast<double>(sample_count); }

    std::size_t bin_of(double frequency_hz) const {
        if (!(frequency_hz >= 0.0)) throw domain_error("frequency must be >= 0");
        const double b = frequency_hz / bin_width_hz();
        const std::size_t m = static_cast<std::size_t>(std::llround(b));
        if (m >= power.size()) throw domain_error("frequency beyond the spectrum range");
        return m;
    }
};

inline Spectrum power_spectrum(const std::vector<double>& samples, double rate_hz,
                               Window window = Window::rect) {
    const std::size_t n = samples.size();
    if (n < 4) throw domain_error("need at least 4 samples for a spectrum");
    if (!(rate_hz > 0.0)) throw domain_error("sample rate must be > 0");
    std::vector<cplx> x(n);
    double gain = 0.0;  // sum of window values; N for the plain rectangle
    if (window == Window::rect) {
        for (std::size_t j = 0; j < n; ++j) x[j] = cplx(samples[j], 0.0);
        gain = static_cast<double>(n);
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            const double w =
                0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(j) / static_cast<double>(n)));
            x[j] = cplx(samples[j] * w, 0.0);
            gain += w;
        }
    }
    const Dft dft(n);
    const std::vector<cplx> X = dft.forward(x);
    Spectrum out;
    out.rate_hz = rate_hz;
    out.sample_count = n;
    const std::size_t half = n / 2;
    out.freq_hz.resize(half + 1);
    out.power.resize(half + 1);
    for (std::size_t m = 0; m <= half; ++m) {
        out.freq_hz[m] = static_cast<double>(m) * rate_hz / static_cast<double>(n);
        const double a = std::norm(X[m] / gain);
        // interior bins carry both halves of the line; DC and Nyquist do not
        const bool interior = (m != 0) && !(n % 2 == 0 && m == half);
        out.power[m] = interior ? 4.0 * a : a;
    }
    return out;
}

// Power at a probe frequency: the maximum over the nearest bin and its two
// neighbours, tolerant of probe lines that straddle a bin edge.
inline double peak_power(const Spectrum& spec, double frequency_hz) {
    const std::size_t m = spec.bin_of(frequency_hz);
    double best = spec.power[m];
    if (m > 0) best = std::max(best, spec.power[m - 1]);
    if (m + 1 < spec.power.size()) best = std::max(best, spec.power[m + 1]);
    return best;
}

struct PeakRow {
    std::string label;         // optional human name for the probe
    double probe_hz = 0.0;     // requested frequency
    double bin_hz = 0.0;       // center of the winning bin
    double power = 0.0;        // max over the nearest bin and neighbours
    double noise_floor = 0.0;  // median of nearby bins, peak neighbourhood excluded
};

struct PeakTable {
    std::vector<PeakRow> rows;

    const PeakRow& at(double frequency_hz) const {
        for (const auto& r : rows)
            if (std::abs(r.probe_hz - frequency_hz) < 1e-9) return r;
        throw domain_error("no peak row for the requested frequency");
    }
};

// Probes each frequency and estimates a local floor from the median power in
// a window of `floor_halfwidth` bins on each side, excluding the three bins
// that may carry the line itself.
inline PeakTable peak_table(const Spectrum& spec, const std::vector<double>& probes_hz,
                            std::size_t floor_halfwidth = 25) {
    PeakTable out;
    for (const double f : probes_hz) {
        const std::size_t m = spec.bin_of(f);
        PeakRow row;
        row.probe_hz = f;
        row.power = spec.power[m];
        row.bin_hz = spec.freq_hz[m];
        if (m > 0 && spec.power[m - 1] > row.power) {
            row.power = spec.power[m - 1];
            row.bin_hz = spec.freq_hz[m - 1];
        }
        if (m + 1 < spec.power.size() && spec.power[m + 1] > row.power) {
            row.power = spec.power[m + 1];
            row.bin_hz = spec.freq_hz[m + 1];
        }
        std::vector<double> nearby;
        const std::size_t lo = (m > floor_halfwidth) ? m - floor_halfwidth : 0;
        const std::size_t hi = std::min(spec.power.size() - 1, m + floor_halfwidth);
        for (std::size_t k = lo; k <= hi; ++k) {
            if (k + 1 >= m && k <= m + 1) continue;  // skip the peak neighbourhood
            nearby.push_back(spec.power[k]);
        }
        if (!nearby.empty()) {
            std::sort(nearby.begin(), nearby.end());
            row.noise_floor = nearby[nearby.size() / 2];
        }
        out.rows.push_back(row);
    }
    return out;
}

// Least-squares line through (log eps, log power): power ~ amplitude * eps^exponent.
// Needs at least three strictly positive points so the slope and the residual
// are both meaningful. intercept is log(amplitude), kept so callers can
// reconstruct the fit line.
struct PowerFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

inline PowerFit fit_exponent(const std::vector<double>& eps, const std::vector<double>& power) {
    if (eps.size() != power.size()) throw domain_error("fit inputs must have equal length");
    if (eps.size() < 3) throw domain_error("exponent fit needs at least three points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw domain_error("scale values must be > 0");
        if (!(power[i] > 0.0)) throw domain_error("powers must be > 0 to fit an exponent");
        lx.push_back(std::log(eps[i]));
        ly.push_back(std::log(power[i]));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw domain_error("scale values must not all coincide");
    PowerFit fit;
    fit.points = lx.size();
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.amplitude = std::exp(fit.intercept);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double resid = ly[i] - (my + fit.exponent * (lx[i] - mx));
        ss_res += resid * resid;
    }
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
    os << "freq_hz,power\n";
    for (std::size_t m = 0; m < spec.power.size(); ++m)
        os << detail::format_double(spec.freq_hz[m]) << ',' << detail::format_double(spec.power[m])
           << '\n';
}

}  // namespace nestmzi
