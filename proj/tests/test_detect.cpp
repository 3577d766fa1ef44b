#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nestmzi/detect.hpp"
#include "nestmzi/optics.hpp"

using namespace nestmzi;

TEST_CASE("quad cell on a centered Gaussian reads zero difference") {
    SECTION("modal") {
        const int K = 6;
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(K);
        c(0) = 1.0;
        const QuadCellReading q = quad_cell(c, sign_gram(K));
        CHECK(q.s == 0.0);
        CHECK(q.p == 1.0);
    }
    SECTION("grid") {
        const Grid g = make_grid(1024, 6.0);
        const QuadCellReading q = quad_cell(g, gaussian_profile(g));
        CHECK(std::abs(q.s) < 1e-15);
        CHECK(q.p == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("displaced Gaussian difference signal matches the error function") {
    // For a unit-width mode the intensity is exp(-(x-d)^2)/sqrt(pi), so the
    // right-minus-left power difference is exactly erf(d).
    const double d = 0.05;

    SECTION("grid readout") {
        const Grid g = make_grid(1024, 6.0);
        const std::vector<cplx> psi = grid_shift(g, gaussian_profile(g), d);
        const QuadCellReading q = quad_cell(g, psi);
        CHECK(q.s == Catch::Approx(std::erf(d)).margin(1e-9));
        CHECK(q.p == Catch::Approx(1.0).epsilon(1e-12));
    }

    SECTION("modal readout converges with mode count") {
        DisplacementFactory factory(24);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(24);
        e0(0) = 1.0;
        const Eigen::VectorXcd c = factory.matrix(d) * e0;
        const QuadCellReading q = quad_cell(c, sign_gram(24));
        CHECK(q.s == Catch::Approx(std::erf(d)).margin(1e-10));
        CHECK(q.p == Catch::Approx(1.0).epsilon(1e-12));
    }

    SECTION("two modes give the linearized response") {
        DisplacementFactory factory(2);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2);
        e0(0) = 1.0;
        const Eigen::VectorXcd c = factory.matrix(0.01) * e0;
        const QuadCellReading q = quad_cell(c, sign_gram(2));
        CHECK(q.s == Catch::Approx(2.0 / std::sqrt(pi) * 0.01).margin(1e-6));
    }
}

TEST_CASE("difference never exceeds total power") {
    const Grid g = make_grid(512, 6.0);
    for (const double d : {-1.0, -0.3, 0.0, 0.2, 0.9}) {
        const QuadCellReading q = quad_cell(g, grid_shift(g, gaussian_profile(g), d));
        CHECK(std::abs(q.s) <= q.p + 1e-15);
    }
}

TEST_CASE("grid and modal readouts agree on the same state") {
    const double d = 0.04;
    const Grid g = make_grid(1024, 6.0);
    const QuadCellReading qg = quad_cell(g, grid_shift(g, gaussian_profile(g), d));
    DisplacementFactory factory(24);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(24);
    e0(0) = 1.0;
    const QuadCellReading qm = quad_cell(factory.matrix(d) * e0, sign_gram(24));
    CHECK(qg.s == Catch::Approx(qm.s).margin(1e-9));
    CHECK(qg.p == Catch::Approx(qm.p).margin(1e-9));
}

TEST_CASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(quad_cell(Eigen::VectorXcd::Zero(3), sign_gram(4)), domain_error);
    const Grid g = make_grid(256, 6.0);
    CHECK_THROWS_AS(quad_cell(g, std::vector<cplx>(255)), domain_error);
}

TEST_CASE("readout noise is deterministic, difference-only, and optional") {
    DetectorTrace base;
    base.detector = "d";
    base.s.assign(10000, 0.25);
    base.p.assign(10000, 1.0);

    DetectorTrace a = base;
    add_noise(a, 0.0, 7);
    CHECK(a.s == base.s);  // sigma 0 draws nothing

    DetectorTrace b = base, c = base;
    add_noise(b, 0.01, 7);
    add_noise(c, 0.01, 7);
    CHECK(b.s == c.s);       // same seed, same samples
    CHECK(b.p == base.p);    // total power untouched
    CHECK(b.s != base.s);

    DetectorTrace e = base;
    add_noise(e, 0.01, 8);
    CHECK(e.s != b.s);  // different seed, different draw

    double mean = 0.0, var = 0.0;
    for (std::size_t j = 0; j < b.s.size(); ++j) mean += b.s[j] - base.s[j];
    mean /= static_cast<double>(b.s.size());
    for (std::size_t j = 0; j < b.s.size(); ++j) {
        const double x = b.s[j] - base.s[j] - mean;
        var += x * x;
    }
    var /= static_cast<double>(b.s.size() - 1);
    CHECK(std::abs(mean) < 5e-4);                       // ~5 sigma of the mean estimator
    CHECK(var == Catch::Approx(1e-4).epsilon(0.06));    // sigma^2 within sampling error

    CHECK_THROWS_AS(add_noise(b, -0.1, 1), domain_error);
}
