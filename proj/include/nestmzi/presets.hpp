#pragma once

// Built-in network descriptions. The same texts ship as .mzi files under
// presets/; a test keeps the two copies byte-identical. All frequencies are
// integers so that every line and every pairwise combination is bin-centered
// over a one-second record at 10 kHz.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nestmzi/common.hpp"
#include "nestmzi/netlang.hpp"

namespace nestmzi {

namespace presets {

inline constexpr std::string_view simple_mzi =
    R"PRESET(# Balanced two-splitter interferometer with one vibrating mirror per arm.
# Port d is dark by exact cancellation; all signal rides on port b.
beam (width=1)
source src -> s0
bs BS1 in: s0, vac out: u, v
mirror M1 on u vibrate(f=282 Hz, amp=0.0005, phase=0.9)
mirror M2 on v vibrate(f=296 Hz, amp=0.0005, phase=2.3)
bs BS2 in: u, v out: d, b
detector dark quadcell on d
detector bright quadcell on b
)PRESET";

inline constexpr std::string_view nested_aligned =
    R"PRESET(# Nested interferometer: an inner loop (arms A and B between mirrors E and F)
# sits in one arm of the outer loop; mirror C rides the other outer arm.
# The first splitter sends two thirds of the power toward the inner loop and
# every later splitter is balanced, so the inner output toward F is dark and
# arms A, B, C carry equal static amplitude. Vibration phases are distinct so
# frequency combinations that collide (f_A + f_F = f_B + f_E = 2 f_C = 614 Hz)
# do not cancel by symmetry.
beam (width=1)
source src -> s0
bs O1 (r=0.816496580927726) in: s0, vac out: C, E
mirror MC on C vibrate(f=307 Hz, amp=0.0005, phase=1.6)
mirror ME on E vibrate(f=318 Hz, amp=0.0005, phase=4.1)
bs I1 in: E, vac out: A, B
mirror MA on A vibrate(f=282 Hz, amp=0.0005, phase=0.9)
mirror MB on B vibrate(f=296 Hz, amp=0.0005, phase=2.3)
bs I2 in: A, B out: F, X
mirror MF on F vibrate(f=332 Hz, amp=0.0005, phase=3.2)
bs O2 in: F, C out: D0, D1
detector D quadcell on D0
)PRESET";

inline constexpr std::string_view nested_misaligned =
    R"PRESET(# Nested interferometer with the inner loop pulled off its dark fringe by a
# quarter-wave phase on arm B. The port toward F is no longer dark, so the
# inner mirrors E and F imprint first-order lines on the detector.
beam (width=1)
source src -> s0
bs O1 (r=0.816496580927726) in: s0, vac out: C, E
mirror MC on C vibrate(f=307 Hz, amp=0.0005, phase=1.6)
mirror ME on E vibrate(f=318 Hz, amp=0.0005, phase=4.1)
bs I1 in: E, vac out: A, B
mirror MA on A vibrate(f=282 Hz, amp=0.0005, phase=0.9)
mirror MB on B vibrate(f=296 Hz, amp=0.0005, phase=2.3)
phase PB on B (1.5707963267948966)
bs I2 in: A, B out: F, X
mirror MF on F vibrate(f=332 Hz, amp=0.0005, phase=3.2)
bs O2 in: F, C out: D0, D1
detector D quadcell on D0
)PRESET";

inline constexpr std::string_view nested_blocked =
    R"PRESET(# Nested interferometer with arm B blocked. Light reaching the detector
# through the inner loop must pass arm A; the inner dark-port cancellation
# toward F is gone because only one inner arm survives.
beam (width=1)
source src -> s0
bs O1 (r=0.816496580927726) in: s0, vac out: C, E
mirror MC on C vibrate(f=307 Hz, amp=0.0005, phase=1.6)
mirror ME on E vibrate(f=318 Hz, amp=0.0005, phase=4.1)
bs I1 in: E, vac out: A, B
mirror MA on A vibrate(f=282 Hz, amp=0.0005, phase=0.9)
mirror MB on B vibrate(f=296 Hz, amp=0.0005, phase=2.3)
block BB on B
bs I2 in: A, B out: F, X
mirror MF on F vibrate(f=332 Hz, amp=0.0005, phase=3.2)
bs O2 in: F, C out: D0, D1
detector D quadcell on D0
)PRESET";

}  // namespace presets

inline const std::map<std::string, std::string_view>& preset_catalog() {
    static const std::map<std::string, std::string_view> catalog{
        {"simple_mzi", presets::simple_mzi},
        {"nested_aligned", presets::nested_aligned},
        {"nested_misaligned", presets::nested_misaligned},
        {"nested_blocked", presets::nested_blocked},
    };
    return catalog;
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : preset_catalog()) names.push_back(name);
    return names;
}

inline std::string load_preset(const std::string& name) {
    const auto& catalog = preset_catalog();
    const auto it = catalog.find(name);
    if (it == catalog.end()) {
        std::string msg = "unknown preset '" + name + "'; available:";
        for (const auto& [n, _] : catalog) msg += " " + n;
        throw domain_error(msg);
    }
    return std::string(it->second);
}

}  // namespace nestmzi
