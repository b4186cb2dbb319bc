#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tvme/armodel.hpp"
#include "tvme/series.hpp"

#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace tvme;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("automatic bandwidth formula at reference lengths") {
    CHECK(nw_auto_bandwidth(100) == 4);
    CHECK(nw_auto_bandwidth(608) == 5);
    CHECK(nw_auto_bandwidth(10) == 2);
    REQUIRE_THROWS_AS(nw_auto_bandwidth(9), std::invalid_argument);
}

TEST_CASE("noise-free AR(1) recursion is recovered exactly") {
    std::vector<double> x(30);
    x[0] = 1.0;
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.5 * x[t - 1];
    ARFit fit = fit_ar_ols(x, 1, 0);
    CHECK_THAT(fit.coeffs[0], WithinAbs(0.5, 1e-10));
    CHECK_THAT(fit.intercept, WithinAbs(0.0, 1e-12));
    for (double e : fit.residuals) CHECK_THAT(e, WithinAbs(0.0, 1e-12));
}

TEST_CASE("AR(1) point estimates match a closed-form two-parameter solve") {
    auto x = testsup::simulate_ar(std::vector<double>{0.4}, 0.1, 1.0, 120, 99);
    ARFit fit = fit_ar_ols(x, 1);
    std::vector<double> lag(x.begin(), x.end() - 1);
    std::vector<double> cur(x.begin() + 1, x.end());
    auto line = oracle::ols_line(lag, cur);
    CHECK_THAT(fit.intercept, WithinAbs(line.a, 1e-12));
    CHECK_THAT(fit.coeffs[0], WithinAbs(line.b, 1e-12));
}

TEST_CASE("normal equations hold and slopes ignore level shifts") {
    ReturnSeries r = load_return_csv("data/fixture_returns.csv");
    ARFit fit = fit_ar_ols(r, 2);
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(fit.residuals.data(),
                                                          static_cast<Eigen::Index>(fit.residuals.size()));
    Eigen::VectorXd xte = fit.design.transpose() * e;
    const double scale = std::sqrt(static_cast<double>(fit.n_used)) * std::sqrt(fit.sigma2);
    CHECK(xte.cwiseAbs().maxCoeff() / scale < 1e-10);

    std::vector<double> shifted = r.values;
    for (double& v : shifted) v += 0.37;
    ARFit fit2 = fit_ar_ols(shifted, 2);
    CHECK_THAT(fit2.coeffs[0], WithinAbs(fit.coeffs[0], 1e-10));
    CHECK_THAT(fit2.coeffs[1], WithinAbs(fit.coeffs[1], 1e-10));
    CHECK(std::abs(fit2.intercept - fit.intercept) > 0.01);
}

TEST_CASE("constant series leaves the design singular") {
    std::vector<double> x(50, 3.14);
    REQUIRE_THROWS_WITH(fit_ar_ols(x, 1), ContainsSubstring("singular"));
}

TEST_CASE("HAC covariance with zero bandwidth equals the White form") {
    auto x = testsup::simulate_ar(std::vector<double>{0.3}, 0.0, 1.0, 60, 7);
    ARFit fit = fit_ar_ols(x, 1, 0);
    // White sandwich assembled directly.
    const Eigen::MatrixXd& X = fit.design;
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
    for (Eigen::Index t = 0; t < X.rows(); ++t) {
        const double e2 = fit.residuals[static_cast<std::size_t>(t)] *
                          fit.residuals[static_cast<std::size_t>(t)];
        meat += e2 * X.row(t).transpose() * X.row(t);
    }
    Eigen::MatrixXd bread = (X.transpose() * X).fullPivLu().inverse();
    Eigen::MatrixXd white = bread * meat * bread;
    CHECK((fit.hac_cov - white).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("HAC covariance matches the explicit summation form") {
    // Hand-sized case: six observations, one lag regressor plus intercept.
    std::vector<double> x = {0.7, -0.3, 0.45, 0.1, -0.55, 0.2, 0.05};
    ARFit fit = fit_ar_ols(x, 1, 2);
    Eigen::MatrixXd ref = oracle::nw_cov_explicit(fit.design, fit.residuals, 2);
    CHECK((fit.hac_cov - ref).cwiseAbs().maxCoeff() < 1e-12);
    for (std::size_t j = 0; j < fit.hac_se.size(); ++j) {
        CHECK_THAT(fit.hac_se[j], WithinAbs(std::sqrt(ref(static_cast<Eigen::Index>(j),
                                                          static_cast<Eigen::Index>(j))),
                                            1e-12));
    }
}

TEST_CASE("HAC covariance is close to the OLS covariance under independence") {
    auto x = testsup::simulate_ar(std::vector<double>{0.0}, 0.0, 1.0, 20000, 21);
    ARFit fit = fit_ar_ols(x, 1);
    Eigen::MatrixXd ols_cov =
        fit.sigma2 * (fit.design.transpose() * fit.design).fullPivLu().inverse();
    for (int j = 0; j < 2; ++j) {
        const double ratio = fit.hac_cov(j, j) / ols_cov(j, j);
        CHECK(ratio > 0.9);
        CHECK(ratio < 1.1);
    }
}

TEST_CASE("HAC covariance is symmetric positive semi-definite") {
    ReturnSeries r = load_return_csv("data/fixture_returns.csv");
    ARFit fit = fit_ar_ols(r, 3);
    CHECK((fit.hac_cov - fit.hac_cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.hac_cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("order selection recovers a strong AR(2) almost always") {
    int hits = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        auto x = testsup::simulate_ar(std::vector<double>{0.5, -0.3}, 0.0, 1.0, 5000,
                                      1000 + static_cast<unsigned>(rep));
        if (select_order_sbic(x, 6) == 2) ++hits;
    }
    INFO("hits " << hits << "/" << reps);
    CHECK(hits >= 190);
}

TEST_CASE("order selection is deterministic and ties break small") {
    ReturnSeries r = load_return_csv("data/fixture_returns.csv");
    OrderSelection sel = select_order_sbic_trace(r.values, 6);
    CHECK(sel.order == select_order_sbic(r, 6));
    CHECK(sel.sbic.size() == 6);
    // The reported order must be the first argmin of the criterion trace.
    int arg = 0;
    for (int q = 1; q < 6; ++q) {
        if (sel.sbic[static_cast<std::size_t>(q)] < sel.sbic[static_cast<std::size_t>(arg)]) arg = q;
    }
    CHECK(sel.order == arg + 1);
}

TEST_CASE("fixture AR(1) fit sits in the calibrated coefficient range") {
    ReturnSeries r = load_return_csv("data/fixture_returns.csv");
    ARFit fit = fit_ar_ols(r, 1);
    CHECK(fit.coeffs[0] > 0.15);
    CHECK(fit.coeffs[0] < 0.40);
    CHECK(fit.r2_adj > 0.0);
    CHECK(fit.n_used == 607);
    CHECK(fit.hac_bandwidth == 5);
}

TEST_CASE("short series and bad orders are rejected") {
    std::vector<double> x(7, 0.0);
    x[1] = 1.0;
    x[3] = -0.5;
    REQUIRE_THROWS_AS(fit_ar_ols(x, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_ar_ols(x, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(select_order_sbic(x, 0), std::invalid_argument);
}
