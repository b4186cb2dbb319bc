#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <vector>

#include "tvme/armodel.hpp"
#include "tvme/constancy.hpp"
#include "tvme/simlab.hpp"

#include "support/helpers.hpp"

using namespace tvme;
using Catch::Matchers::WithinAbs;

TEST_CASE("frozen coefficients are recovered by a long OLS fit") {
    SyntheticSpec spec;
    spec.T = 10000;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {0.4};
    spec.sigma_v = 0.0;
    spec.seed = 2;
    auto sim = simulate_tvar(spec);
    ARFit fit = fit_ar_ols(sim.series, 1);
    CHECK_THAT(fit.coeffs[0], WithinAbs(0.4, 0.02));
}

TEST_CASE("noise-free white-noise spec degenerates to a constant series") {
    SyntheticSpec spec;
    spec.T = 50;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {0.0};
    spec.sigma_u = 0.0;
    spec.sigma_v = 0.0;
    spec.intercept = 0.5;
    auto sim = simulate_tvar(spec);
    for (double v : sim.series.values) CHECK(v == 0.5);
}

TEST_CASE("simulation is bit-identical under a fixed seed") {
    SyntheticSpec spec;
    spec.T = 120;
    spec.kind = CoeffPathKind::RandomWalk;
    spec.levels = {0.3};
    spec.sigma_v = 0.02;
    spec.seed = 99;
    auto a = simulate_tvar(spec);
    auto b = simulate_tvar(spec);
    REQUIRE(a.series.values == b.series.values);
    CHECK((a.true_paths - b.true_paths).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthetic dates form a monthly grid") {
    SyntheticSpec spec;
    spec.T = 14;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {0.1};
    spec.seed = 1;
    auto sim = simulate_tvar(spec);
    REQUIRE(sim.series.dates.size() == 14);
    CHECK(sim.series.dates.front() == "1950:01");
    CHECK(sim.series.dates[11] == "1950:12");
    CHECK(sim.series.dates[12] == "1951:01");
    for (std::size_t t = 1; t < sim.series.dates.size(); ++t) {
        CHECK(sim.series.dates[t - 1] < sim.series.dates[t]);
    }
}

TEST_CASE("break and sinusoid shapes appear in the true paths") {
    SyntheticSpec brk;
    brk.T = 100;
    brk.kind = CoeffPathKind::SingleBreak;
    brk.levels = {0.1};
    brk.amplitude = 0.4;
    brk.break_at = 60;
    brk.seed = 3;
    auto bs = simulate_tvar(brk);
    CHECK_THAT(bs.true_paths(0, 0), WithinAbs(0.1, 1e-15));
    CHECK_THAT(bs.true_paths(59, 0), WithinAbs(0.1, 1e-15));
    CHECK_THAT(bs.true_paths(60, 0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(bs.true_paths(99, 0), WithinAbs(0.5, 1e-15));

    SyntheticSpec sin;
    sin.T = 120;
    sin.kind = CoeffPathKind::Sinusoidal;
    sin.levels = {0.2};
    sin.amplitude = 0.3;
    sin.period = 40;
    sin.seed = 4;
    auto ss = simulate_tvar(sin);
    CHECK_THAT(ss.true_paths(0, 0), WithinAbs(0.2, 1e-15));
    CHECK_THAT(ss.true_paths(10, 0), WithinAbs(0.5, 1e-12));
    CHECK_THAT(ss.true_paths(30, 0), WithinAbs(-0.1, 1e-12));
}

TEST_CASE("impossible deterministic paths are refused") {
    SyntheticSpec spec;
    spec.T = 50;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {1.2};
    spec.seed = 5;
    spec.max_retries = 10;
    REQUIRE_THROWS_AS(simulate_tvar(spec), std::runtime_error);
}

TEST_CASE("spec validation rejects malformed requests") {
    SyntheticSpec spec;
    spec.q = 0;
    REQUIRE_THROWS_AS(simulate_tvar(spec), std::invalid_argument);
    spec.q = 1;
    spec.levels = {0.1, 0.2};
    REQUIRE_THROWS_AS(simulate_tvar(spec), std::invalid_argument);
    spec.levels = {0.1};
    spec.sigma_u = -1.0;
    REQUIRE_THROWS_AS(simulate_tvar(spec), std::invalid_argument);
}

TEST_CASE("unused slope slots are padded with zeros") {
    SyntheticSpec spec;
    spec.T = 80;
    spec.q = 3;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {0.3};
    spec.seed = 6;
    auto sim = simulate_tvar(spec);
    REQUIRE(sim.true_paths.cols() == 3);
    CHECK(sim.true_paths.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sim.true_paths.col(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant-parameter simulations pass the stability test at nominal size") {
    const int reps = 300;
    int rejects = 0;
    for (int rep = 0; rep < reps; ++rep) {
        SyntheticSpec spec;
        spec.T = 600;
        spec.kind = CoeffPathKind::Constant;
        spec.levels = {0.35};
        spec.sigma_v = 0.0;
        spec.seed = 150000 + static_cast<unsigned>(rep);
        auto sim = simulate_tvar(spec);
        ConstancyResult res = hansen_lc(fit_ar_ols(sim.series, 1));
        if (res.reject.at(0.05)) ++rejects;
    }
    INFO("rejections " << rejects << "/" << reps);
    CHECK(rejects >= 6);    // 2%
    CHECK(rejects <= 27);   // 9%
}

TEST_CASE("recovery smoke run finishes quickly and reports sane aggregates") {
    SyntheticSpec spec;
    spec.T = 600;
    spec.kind = CoeffPathKind::RandomWalk;
    spec.levels = {0.3};
    spec.sigma_u = 1.0;
    spec.sigma_v = 0.05;
    spec.seed = 77;
    const auto start = std::chrono::steady_clock::now();
    RecoveryReport rep = monte_carlo_recovery(spec, 20);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    INFO("smoke recovery took " << secs << " s");
    CHECK(secs < 60.0);
    CHECK(rep.reps == 20);
    CHECK(rep.failures == 0);
    REQUIRE(rep.rmse.size() == 20);
    CHECK(rep.rmse_median > 0.0);
    CHECK(rep.rmse_median < 0.5);
    CHECK(rep.coverage_median > 0.5);
    CHECK(rep.coverage_median <= 1.0);
    CHECK(rep.rmse_q25 <= rep.rmse_median);
    CHECK(rep.rmse_median <= rep.rmse_q75);
}

TEST_CASE("time-varying fit does not blow up on a constant truth") {
    SyntheticSpec spec;
    spec.T = 400;
    spec.kind = CoeffPathKind::Constant;
    spec.levels = {0.35};
    spec.sigma_v = 0.0;
    spec.seed = 88;
    RecoveryReport tv = monte_carlo_recovery(spec, 20);
    // OLS RMSE benchmark computed directly per replication.
    std::vector<double> ols_rmse;
    for (int rep = 0; rep < 20; ++rep) {
        SyntheticSpec one = spec;
        one.seed = stream_seed(spec.seed, static_cast<std::uint64_t>(rep));
        auto sim = simulate_tvar(one);
        ARFit fit = fit_ar_ols(sim.series, 1);
        ols_rmse.push_back(std::abs(fit.coeffs[0] - 0.35));
    }
    const double tv_med = tv.rmse_median;
    const double ols_med = detail::quantile(ols_rmse, 0.5);
    INFO("tv " << tv_med << " vs ols " << ols_med);
    CHECK(tv_med < 2.0 * std::max(ols_med, 0.02) + 0.02);
    CHECK(tv.failures == 0);
}

TEST_CASE("recovery error shrinks as the sample grows") {
    auto run = [](int T) {
        SyntheticSpec spec;
        spec.T = T;
        spec.kind = CoeffPathKind::RandomWalk;
        spec.levels = {0.3};
        spec.sigma_u = 1.0;
        spec.sigma_v = 0.05;
        spec.seed = 1234;
        return monte_carlo_recovery(spec, 50).rmse_median;
    };
    const double r200 = run(200);
    const double r600 = run(600);
    const double r2000 = run(2000);
    INFO("rmse medians " << r200 << " " << r600 << " " << r2000);
    CHECK(r600 <= r200 * 1.1);
    CHECK(r2000 <= r600 * 1.1);
}
