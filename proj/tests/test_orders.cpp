#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nestmzi/detect.hpp"
#include "nestmzi/orders.hpp"
#include "nestmzi/presets.hpp"
#include "nestmzi/propagate.hpp"

using namespace nestmzi;

namespace {

ValidatedNetwork preset_at(const std::string& name, double eps_scale) {
    return validate(scale_vibrations(parse_network(load_preset(name)), eps_scale));
}

bool odd(int n) { return n % 2 != 0; }

}  // namespace

TEST_CASE("one mirror expands into the exact low-degree ladder terms") {
    TracePolynomial start;
    start[TraceKey{0, {0}, {0}}] = 1.0;
    const TracePolynomial out = apply_mirror(start, 0, 2);
    REQUIRE(out.size() == 9);

    const double i2r2 = 1.0 / (2.0 * std::sqrt(2.0));
    CHECK(out.at(TraceKey{0, {0}, {0}}) == cplx(1.0, 0.0));
    CHECK(out.at(TraceKey{1, {1}, {1}}).imag() == Catch::Approx(-i2r2).margin(1e-15));
    CHECK(out.at(TraceKey{1, {1}, {1}}).real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(out.at(TraceKey{1, {-1}, {1}}).imag() == Catch::Approx(i2r2).margin(1e-15));

    CHECK(out.at(TraceKey{2, {0}, {2}}).real() == Catch::Approx(std::sqrt(2.0) / 8.0).margin(1e-15));
    CHECK(out.at(TraceKey{2, {2}, {2}}).real() ==
          Catch::Approx(-std::sqrt(2.0) / 16.0).margin(1e-15));
    CHECK(out.at(TraceKey{2, {-2}, {2}}).real() ==
          Catch::Approx(-std::sqrt(2.0) / 16.0).margin(1e-15));
    CHECK(out.at(TraceKey{0, {0}, {2}}).real() == Catch::Approx(-0.125).margin(1e-15));
    CHECK(out.at(TraceKey{0, {2}, {2}}).real() == Catch::Approx(0.0625).margin(1e-15));
    CHECK(out.at(TraceKey{0, {-2}, {2}}).real() == Catch::Approx(0.0625).margin(1e-15));
}

TEST_CASE("pruning reports what it discarded") {
    TracePolynomial poly;
    poly[TraceKey{0, {0}, {0}}] = 1.0;
    poly[TraceKey{1, {1}, {1}}] = 5e-16;
    poly[TraceKey{2, {2}, {2}}] = 1e-20;
    const double removed = prune_small(poly, 1e-15);
    CHECK(poly.size() == 1);
    CHECK(removed == Catch::Approx(5e-16));
}

TEST_CASE("evaluated polynomials reproduce the displaced state of one mirror") {
    const ValidatedNetwork vn = validate(parse_network(
        "source s -> a\n"
        "mirror M on a vibrate(f=100 Hz, amp=0.01, phase=0.3)\n"
        "detector d quadcell on a\n"));
    const SymbolicField sf = symbolic_propagate(vn, 3);
    REQUIRE(sf.mode_count == 4);
    for (const double t : {0.0, 0.00123, 0.0071}) {
        const double theta = 2.0 * pi * 100.0 * t + 0.3;
        const double d = 0.01 * std::sin(theta);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(4);
        e0(0) = 1.0;
        const Eigen::VectorXcd expect = displacement_matrix(4, d) * e0;
        const Eigen::VectorXcd got = evaluate_modes(sf.detector_poly.at("d"), vn, sf, t);
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("zeroth order carries the static transfer and nothing else") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const SymbolicField sf = symbolic_propagate(vn, 0);
    const TracePolynomial& det = sf.detector_poly.at("D");
    REQUIRE(det.size() == 1);
    const auto& [key, coeff] = *det.begin();
    CHECK(key.mode == 0);
    CHECK(total_power(key) == 0);
    CHECK(std::abs(coeff - cplx(0.0, 1.0 / std::sqrt(6.0))) < 1e-15);
    // the inner output toward the recombiner is exactly dark
    CHECK(sf.arm_end[static_cast<std::size_t>(vn.arm_of("F"))].empty());
    const TracePolynomial& x = sf.arm_end[static_cast<std::size_t>(vn.arm_of("X"))];
    REQUIRE(x.size() == 1);
    CHECK(std::abs(x.begin()->second - cplx(-std::sqrt(2.0 / 3.0), 0.0)) < 1e-15);
}

TEST_CASE("aligned line table shows the outer arms and hides the inner mirrors") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const SymbolicField sf = symbolic_propagate(vn, 2);
    const LineTable lt = classify_lines(vn, sf, "D");
    CHECK(lt.eps_ref == 0.0005);

    std::size_t s_rows = 0;
    for (const auto& r : lt.rows)
        if (r.channel == Channel::difference) ++s_rows;
    CHECK(s_rows == 3);

    const LineRow* fa = lt.find(Channel::difference, 282.0);
    const LineRow* fb = lt.find(Channel::difference, 296.0);
    const LineRow* fc = lt.find(Channel::difference, 307.0);
    REQUIRE(fa);
    REQUIRE(fb);
    REQUIRE(fc);
    CHECK(fa->label == "f_A");
    CHECK(fc->label == "f_C");
    CHECK(fa->leading_order == 1);
    CHECK(fc->leading_order == 1);
    CHECK(fa->interferes_with_zeroth);

    // cosine amplitudes per unit deflection, straight from the path sums
    CHECK(fa->coefficient == Catch::Approx(1.0 / (3.0 * std::sqrt(2.0 * pi))).epsilon(1e-9));
    CHECK(fb->coefficient == Catch::Approx(fa->coefficient).epsilon(1e-12));
    CHECK(fc->coefficient == Catch::Approx(1.0 / (3.0 * std::sqrt(pi))).epsilon(1e-9));
    const double r2 = fc->coefficient / fa->coefficient;
    CHECK(r2 * r2 == Catch::Approx(2.0).epsilon(1e-9));

    // the inner mirrors leave no line of their own in either channel
    for (const double f : {318.0, 332.0}) {
        CHECK(lt.find(Channel::difference, f) == nullptr);
        CHECK(lt.find(Channel::power, f) == nullptr);
    }
}

TEST_CASE("colliding second-order combinations merge into one power line") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const LineTable lt = classify_lines(vn, symbolic_propagate(vn, 2), "D");

    const LineRow* collision = lt.find(Channel::power, 614.0);
    REQUIRE(collision);
    CHECK(collision->leading_order == 2);
    CHECK(collision->lattices.size() == 3);
    CHECK(collision->label.find("2f_C") != std::string::npos);
    CHECK(collision->label.find("f_E+f_B") != std::string::npos);
    CHECK(collision->label.find("f_F+f_A") != std::string::npos);
    CHECK(collision->interferes_with_zeroth);

    const LineRow* beat = lt.find(Channel::power, 50.0);
    REQUIRE(beat);
    CHECK(beat->label == "f_F-f_A");
    CHECK(beat->leading_order == 2);
    CHECK_FALSE(beat->interferes_with_zeroth);
}

TEST_CASE("difference lines are odd in deflection and power lines even") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const LineTable lt = classify_lines(vn, symbolic_propagate(vn, 3), "D");
    for (const auto& row : lt.rows) {
        INFO("line " << row.label);
        for (const auto& [deg, amp] : row.order_coefficients) {
            CHECK(odd(deg) == (row.channel == Channel::difference));
            CHECK(amp > 0.0);
        }
    }
    // third order corrects the first-order lines without unhiding E or F
    const LineRow* fa = lt.find(Channel::difference, 282.0);
    REQUIRE(fa);
    CHECK(fa->leading_order == 1);
    CHECK(fa->order_coefficients.count(3) == 1);
    CHECK(lt.find(Channel::difference, 318.0) == nullptr);
    CHECK(lt.find(Channel::difference, 332.0) == nullptr);
}

TEST_CASE("misalignment unhides the inner mirrors at first order") {
    const ValidatedNetwork vn = preset_at("nested_misaligned", 1.0);
    const LineTable lt = classify_lines(vn, symbolic_propagate(vn, 1), "D");
    const LineRow* fe = lt.find(Channel::difference, 318.0);
    const LineRow* ff = lt.find(Channel::difference, 332.0);
    REQUIRE(fe);
    REQUIRE(ff);
    CHECK(fe->leading_order == 1);
    CHECK(ff->leading_order == 1);
    CHECK(fe->label == "f_E");
    CHECK(ff->label == "f_F");
}

TEST_CASE("blocking one inner arm silences it and unhides the loop mirrors") {
    const ValidatedNetwork vn = preset_at("nested_blocked", 1.0);
    const LineTable lt = classify_lines(vn, symbolic_propagate(vn, 1), "D");
    CHECK(lt.find(Channel::difference, 282.0) != nullptr);
    CHECK(lt.find(Channel::difference, 307.0) != nullptr);
    CHECK(lt.find(Channel::difference, 318.0) != nullptr);
    CHECK(lt.find(Channel::difference, 332.0) != nullptr);
    CHECK(lt.find(Channel::difference, 296.0) == nullptr);
}

TEST_CASE("arm presence separates static light from first-order-only arms") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const std::vector<ArmPresence> rep = arm_presence_report(vn, symbolic_propagate(vn, 1));
    const ArmPresence* e = nullptr;
    const ArmPresence* f = nullptr;
    for (const auto& ap : rep) {
        if (ap.arm == "E") e = &ap;
        if (ap.arm == "F") f = &ap;
        CHECK(ap.arm != "vac");
    }
    REQUIRE(e);
    REQUIRE(f);
    CHECK(e->max_by_order[0] > 0.1);
    CHECK(f->max_by_order[0] == 0.0);
    CHECK(f->max_by_order[1] > 0.01);
}

TEST_CASE("predicted spectra square the leading coefficients") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 1.0);
    const LineTable lt = classify_lines(vn, symbolic_propagate(vn, 2), "D");
    const PeakTable pred = predict_spectrum(lt, 0.01);
    CHECK(pred.at(282.0).power ==
          Catch::Approx(std::pow(0.01 / (3.0 * std::sqrt(2.0 * pi)), 2)).epsilon(1e-9));
    CHECK(pred.at(307.0).power ==
          Catch::Approx(std::pow(0.01 / (3.0 * std::sqrt(pi)), 2)).epsilon(1e-9));
    CHECK_THROWS_AS(predict_spectrum(lt, 0.06), domain_error);
    CHECK_THROWS_AS(predict_spectrum(lt, 0.0), domain_error);
    CHECK_THROWS_AS(symbolic_propagate(vn, 4), domain_error);
    CHECK_THROWS_AS(symbolic_propagate(vn, -1), domain_error);
    CHECK_THROWS_AS(classify_lines(vn, symbolic_propagate(vn, 1), "nope"), domain_error);
}

TEST_CASE("evaluated polynomials reconstruct the simulated traces") {
    const ValidatedNetwork vn = preset_at("nested_aligned", 20.0);
    const SymbolicField sf = symbolic_propagate(vn, 3);
    const ModalEngine eng(vn, sf.mode_count);
    const TimeBase tb{10000.0, 0.0064};
    const SimulationResult sim = eng.run(tb);
    const DetectorTrace& tr = sim.trace("D");

    double num_s = 0.0, den_s = 0.0, num_p = 0.0, den_p = 0.0;
    for (std::size_t j = 0; j < tr.s.size(); ++j) {
        const Eigen::VectorXcd c = evaluate_modes(sf.detector_poly.at("D"), vn, sf, tb.time(j));
        const QuadCellReading q = quad_cell(c, eng.gram());
        num_s += (q.s - tr.s[j]) * (q.s - tr.s[j]);
        den_s += tr.s[j] * tr.s[j];
        num_p += (q.p - tr.p[j]) * (q.p - tr.p[j]);
        den_p += tr.p[j] * tr.p[j];
    }
    CHECK(std::sqrt(num_s / den_s) < 1e-3);
    CHECK(std::sqrt(num_p / den_p) < 1e-6);
}
