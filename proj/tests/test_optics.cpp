#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "nestmzi/optics.hpp"
#include "nestmzi/presets.hpp"

using namespace nestmzi;

TEST_CASE("balanced splitter coefficients are bitwise equal") {
    const BsCoeffs c = bs_coeffs(std::sqrt(0.5));
    CHECK(c.t == c.r);
    CHECK(c.t == std::sqrt(0.5));
}

TEST_CASE("splitter coefficients are unitary for any ratio") {
    for (const double r : {0.0, 0.3, std::sqrt(0.5), std::sqrt(2.0 / 3.0), 0.95, 1.0}) {
        const Eigen::Matrix2cd m = bs_matrix(r);
        const Eigen::Matrix2cd defect = m.adjoint() * m - Eigen::Matrix2cd::Identity();
        CHECK(defect.cwiseAbs().maxCoeff() < 1e-15);
    }
    CHECK_THROWS_AS(bs_coeffs(-0.1), domain_error);
    CHECK_THROWS_AS(bs_coeffs(1.1), domain_error);
}

TEST_CASE("Hermite-Gauss modes are orthonormal under fine quadrature") {
    const int K = 6;
    const int n_pts = 4000;
    const double lim = 10.0;
    const double h = 2.0 * lim / n_pts;
    for (int n = 0; n < K; ++n) {
        for (int m = n; m < K; ++m) {
            double acc = 0.0;
            for (int j = 0; j < n_pts; ++j) {
                const double x = -lim + (j + 0.5) * h;
                acc += hg_mode(n, x) * hg_mode(m, x) * h;
            }
            CHECK(std::abs(acc - (n == m ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("width scaling keeps modes normalized") {
    const double w = 2.5;
    const int n_pts = 4000;
    const double lim = 10.0 * w;
    const double h = 2.0 * lim / n_pts;
    double acc = 0.0;
    for (int j = 0; j < n_pts; ++j) {
        const double x = -lim + (j + 0.5) * h;
        acc += hg_mode(2, x, w) * hg_mode(2, x, w) * h;
    }
    CHECK(std::abs(acc - 1.0) < 1e-10);
}

TEST_CASE("sign Gram matrix matches its closed forms") {
    const Eigen::MatrixXd g = sign_gram(6);
    // parity: even n+m entries vanish identically
    for (int n = 0; n < 6; ++n)
        for (int m = 0; m < 6; ++m)
            if ((n + m) % 2 == 0) CHECK(g(n, m) == 0.0);
    CHECK(g(0, 1) == Catch::Approx(std::sqrt(2.0 / pi)).epsilon(1e-14));
    CHECK(g(1, 2) == Catch::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
    CHECK((g - g.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);

    // against brute-force quadrature
    const int n_pts = 24000;
    const double lim = 12.0;
    const double h = 2.0 * lim / n_pts;
    for (int n = 0; n < 6; ++n) {
        for (int m = 0; m < 6; ++m) {
            double acc = 0.0;
            for (int j = 0; j < n_pts; ++j) {
                const double x = -lim + (j + 0.5) * h;
                acc += (x > 0 ? 1.0 : -1.0) * hg_mode(n, x) * hg_mode(m, x) * h;
            }
            CHECK(std::abs(acc - g(n, m)) < 1e-6);
        }
    }
}

TEST_CASE("displacement operator basics") {
    DisplacementFactory factory(8);

    SECTION("zero deflection is the exact identity") {
        const Eigen::MatrixXcd m = factory.matrix(0.0);
        CHECK((m - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("matrix is real and orthogonal to rounding") {
        const Eigen::MatrixXcd m = factory.matrix(0.1);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) CHECK(m(i, j).imag() == 0.0);
        const Eigen::MatrixXcd defect = m.adjoint() * m - Eigen::MatrixXcd::Identity(8, 8);
        CHECK(defect.cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("ground-state overlap matches the Gaussian formula") {
        for (const double d : {0.01, 0.05, 0.2}) {
            CHECK(factory.matrix(d)(0, 0).real() ==
                  Catch::Approx(std::exp(-d * d / 4.0)).epsilon(1e-10));
            // column 0 against displaced-Gaussian overlap integrals
            const Eigen::MatrixXcd m = factory.matrix(d);
            const int n_pts = 4000;
            const double lim = 10.0;
            const double h = 2.0 * lim / n_pts;
            for (int n = 0; n < 4; ++n) {
                double acc = 0.0;
                for (int j = 0; j < n_pts; ++j) {
                    const double x = -lim + (j + 0.5) * h;
                    acc += hg_mode(n, x) * hg_mode(0, x - d) * h;
                }
                CHECK(std::abs(m(n, 0).real() - acc) < 1e-8);
            }
        }
    }

    SECTION("composition: D(a) D(b) = D(a + b) up to truncation") {
        const Eigen::MatrixXcd ab = factory.matrix(0.05) * factory.matrix(0.03);
        const Eigen::MatrixXcd sum = factory.matrix(0.08);
        // truncation breaks exactness in the last row/column band only
        CHECK((ab - sum).topLeftCorner(4, 4).cwiseAbs().maxCoeff() < 1e-10);
    }

    SECTION("deflections beyond a fifth of a width are refused") {
        CHECK_THROWS_AS(factory.matrix(0.25), domain_error);
        CHECK_THROWS_AS(factory.matrix(-0.25), domain_error);
        CHECK_NOTHROW(factory.matrix(0.2));
    }

    SECTION("width-aware overload divides through") {
        const Eigen::MatrixXcd a = displacement_matrix(6, 0.02, 2.0);
        const Eigen::MatrixXcd b = displacement_matrix(6, 0.01);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        CHECK_THROWS_AS(displacement_matrix(6, 0.01, 0.0), domain_error);
    }
}

TEST_CASE("grid construction and Gaussian sampling") {
    const Grid g = make_grid(256, 8.0);
    CHECK(g.step == Catch::Approx(16.0 / 256));
    // midpoint grid is symmetric about zero with no sample at zero
    for (int j = 0; j < g.n; ++j) {
        CHECK(g.point(j) + g.point(g.n - 1 - j) == Catch::Approx(0.0).margin(1e-15));
        CHECK(g.point(j) != 0.0);
    }
    const std::vector<cplx> psi = gaussian_profile(g);
    double norm = 0.0;
    for (const cplx& v : psi) norm += std::norm(v) * g.step;
    CHECK(norm == Catch::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(make_grid(100, 8.0), domain_error);  // not a power of two
    CHECK_THROWS_AS(make_grid(2, 8.0), domain_error);
    CHECK_THROWS_AS(make_grid(256, 0.0), domain_error);
}

TEST_CASE("grid shift translates a profile") {
    const Grid g = make_grid(512, 8.0);
    const std::vector<cplx> psi = gaussian_profile(g);
    const double d = 0.37;
    const std::vector<cplx> shifted = grid_shift(g, psi, d);
    double err = 0.0;
    for (int j = 0; j < g.n; ++j)
        err = std::max(err, std::abs(shifted[static_cast<std::size_t>(j)] -
                                     cplx(hg_mode(0, g.point(j) - d), 0.0)));
    CHECK(err < 1e-9);

    // norm is preserved exactly by a pure phase multiply
    double norm = 0.0;
    for (const cplx& v : shifted) norm += std::norm(v) * g.step;
    CHECK(norm == Catch::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(grid_shift(g, psi, 2.5), domain_error);  // beyond a quarter half-width
    CHECK_THROWS_AS(grid_shift(g, std::vector<cplx>(100), 0.1), domain_error);
}

TEST_CASE("zeroth-order transfer of the nested network") {
    const ValidatedNetwork vn = validate(parse_network(load_preset("nested_aligned")));
    const TransferTable tt = compile_transfer(vn);

    const auto amp = [&](const char* arm) {
        return tt.arm_end[static_cast<std::size_t>(vn.arm_of(arm))];
    };
    const double s3 = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(amp("C") - cplx(s3, 0.0)) < 1e-15);
    CHECK(std::abs(amp("E") - cplx(0.0, std::sqrt(2.0 / 3.0))) < 1e-15);
    CHECK(std::abs(amp("A") - cplx(0.0, s3)) < 1e-15);
    CHECK(std::abs(amp("B") - cplx(-s3, 0.0)) < 1e-15);
    // the inner output toward the final splitter is dark by exact cancellation
    CHECK(amp("F") == cplx(0.0, 0.0));
    CHECK(std::abs(amp("X") - cplx(-std::sqrt(2.0 / 3.0), 0.0)) < 1e-15);

    const cplx d0 = tt.detector_amp.at("D");
    CHECK(std::abs(d0 - cplx(0.0, 1.0 / std::sqrt(6.0))) < 1e-15);
    CHECK(std::norm(d0) == Catch::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(tt.max_conservation_defect < 1e-12);
    CHECK(tt.absorbed_power == 0.0);
}

TEST_CASE("transfer through a balanced interferometer has an exact dark port") {
    const ValidatedNetwork vn = validate(parse_network(load_preset("simple_mzi")));
    const TransferTable tt = compile_transfer(vn);
    CHECK(tt.detector_amp.at("dark") == cplx(0.0, 0.0));
    CHECK(std::norm(tt.detector_amp.at("bright")) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blocks absorb power and conservation still balances") {
    const ValidatedNetwork vn = validate(parse_network(load_preset("nested_blocked")));
    const TransferTable tt = compile_transfer(vn);
    CHECK(tt.absorbed_power == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(tt.max_conservation_defect < 1e-12);
}
