#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvme/rng.hpp"
#include "tvme/series.hpp"
#include "tvme/tvar.hpp"

namespace tvme {

/// Shape of the true slope-coefficient paths in a synthetic data set.
enum class CoeffPathKind { Constant, RandomWalk, Sinusoidal, SingleBreak };

/// Recipe for one synthetic series from the time-varying AR data-generating
/// process. levels holds the base value of each slope coefficient; the
/// pattern (walk, sine wave, level break) applies on top of the first slope
/// for the deterministic kinds and to every slope for the random walk.
struct SyntheticSpec {
    std::size_t T = 600;
    int q = 1;
    CoeffPathKind kind = CoeffPathKind::Constant;
    std::vector<double> levels = {0.4};
    double amplitude = 0.3;      ///< sine amplitude or break jump on the first slope
    double period = 120.0;       ///< sine period in observations
    std::size_t break_at = 300;  ///< first observation at the post-break level
    double intercept = 0.0;
    double sigma_u = 1.0;        ///< observation noise SD
    double sigma_v = 0.05;       ///< random-walk innovation SD per slope
    std::uint64_t seed = 1;
    int max_retries = 1000;      ///< whole-path resampling attempts
};

/// A simulated series together with the true paths that generated it.
struct SimulatedTVAR {
    ReturnSeries series;
    Eigen::MatrixXd true_paths;  ///< T x q slope coefficients per period
    double intercept = 0.0;
};

namespace detail {

inline std::string synthetic_date(std::size_t index) {
    const std::size_t month0 = index % 12;
    const std::size_t year = 1950 + index / 12;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04zu:%02zu", year, month0 + 1);
    return buf;
}

inline bool path_is_stationary(const Eigen::MatrixXd& paths) {
    for (Eigen::Index t = 0; t < paths.rows(); ++t) {
        if (!(std::abs(paths.row(t).sum()) < 1.0)) return false;
    }
    return true;
}

}  // namespace detail

/// Simulates the time-varying AR process a SyntheticSpec describes.
///
/// The slope paths are drawn first (resampling whole paths until
/// |sum of slopes| < 1 at every period, within max_retries), then the series
/// is generated with i.i.d. Gaussian noise and a 200-period burn-in using the
/// first period's coefficients. Path and noise draws come from separate RNG
/// streams, so resampling paths does not disturb the noise sequence.
inline SimulatedTVAR simulate_tvar(const SyntheticSpec& spec) {
    if (spec.q < 1) throw std::invalid_argument("simulate_tvar: order must be at least 1");
    if (spec.T < 10) throw std::invalid_argument("simulate_tvar: series too short");
    if (spec.levels.size() > static_cast<std::size_t>(spec.q)) {
        throw std::invalid_argument("simulate_tvar: more levels than coefficients");
    }
    if (!(spec.sigma_u >= 0.0) || !(spec.sigma_v >= 0.0)) {
        throw std::invalid_argument("simulate_tvar: noise SDs must be non-negative");
    }
    if (spec.kind == CoeffPathKind::Sinusoidal && !(spec.period > 0.0)) {
        throw std::invalid_argument("simulate_tvar: period must be positive");
    }
    if (spec.kind == CoeffPathKind::SingleBreak && spec.break_at >= spec.T) {
        throw std::invalid_argument("simulate_tvar: break date outside the sample");
    }
    if (spec.max_retries < 1) throw std::invalid_argument("simulate_tvar: max_retries must be positive");

    std::vector<double> base(static_cast<std::size_t>(spec.q), 0.0);
    for (std::size_t l = 0; l < spec.levels.size(); ++l) base[l] = spec.levels[l];

    const auto T = static_cast<Eigen::Index>(spec.T);
    const auto q = static_cast<Eigen::Index>(spec.q);
    Rng path_rng = make_stream_rng(spec.seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd paths(T, q);
    bool ok = false;
    for (int attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
        for (Eigen::Index l = 0; l < q; ++l) {
            paths.col(l).setConstant(base[static_cast<std::size_t>(l)]);
        }
        switch (spec.kind) {
            case CoeffPathKind::Constant:
                break;
            case CoeffPathKind::RandomWalk: {
                for (Eigen::Index l = 0; l < q; ++l) {
                    double level = base[static_cast<std::size_t>(l)];
                    for (Eigen::Index t = 1; t < T; ++t) {
                        level += spec.sigma_v * gauss(path_rng);
                        paths(t, l) = level;
                    }
                }
                break;
            }
            case CoeffPathKind::Sinusoidal: {
                constexpr double two_pi = 6.283185307179586;
                for (Eigen::Index t = 0; t < T; ++t) {
                    paths(t, 0) += spec.amplitude *
                                   std::sin(two_pi * static_cast<double>(t) / spec.period);
                }
                break;
            }
            case CoeffPathKind::SingleBreak: {
                for (Eigen::Index t = static_cast<Eigen::Index>(spec.break_at); t < T; ++t) {
                    paths(t, 0) += spec.amplitude;
                }
                break;
            }
        }
        ok = detail::path_is_stationary(paths);
    }
    if (!ok) throw std::runtime_error("simulate_tvar: stationarity resampling exhausted");

    constexpr Eigen::Index burn = 200;
    Rng noise_rng = make_stream_rng(spec.seed, 1);
    std::vector<double> x(static_cast<std::size_t>(burn + T), 0.0);
    for (Eigen::Index t = 0; t < burn + T; ++t) {
        const Eigen::Index pt = t < burn ? 0 : t - burn;
        double v = spec.intercept;
        for (Eigen::Index l = 1; l <= q; ++l) {
            if (t - l >= 0) v += paths(pt, l - 1) * x[static_cast<std::size_t>(t - l)];
        }
        v += spec.sigma_u * gauss(noise_rng);
        x[static_cast<std::size_t>(t)] = v;
    }

    SimulatedTVAR out;
    out.intercept = spec.intercept;
    out.true_paths = paths;
    out.series.values.assign(x.begin() + burn, x.end());
    out.series.dates.resize(spec.T);
    for (std::size_t t = 0; t < spec.T; ++t) out.series.dates[t] = detail::synthetic_date(t);
    return out;
}

namespace detail {

/// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace detail

/// Aggregated results of the estimator-recovery experiment.
struct RecoveryReport {
    int reps = 0;
    int failures = 0;
    std::vector<double> rmse;      ///< per successful replication
    std::vector<double> coverage;  ///< pointwise 95% band coverage per replication
    std::vector<double> selected_variance_ratio;
    double rmse_median = 0.0;
    double rmse_q25 = 0.0;
    double rmse_q75 = 0.0;
    double coverage_median = 0.0;
    double coverage_mean = 0.0;
    double variance_ratio_median = 0.0;
};

/// Repeatedly simulates from the given SyntheticSpec, selects the smoothness by maximum
/// likelihood, re-estimates the paths, and scores path RMSE and 95% band
/// coverage against the truth. Estimation failures are counted and excluded
/// from the aggregates. Replications use index-keyed RNG streams and run
/// independently, so the report does not depend on scheduling.
inline RecoveryReport monte_carlo_recovery(const SyntheticSpec& spec, int reps) {
    if (reps < 20) throw std::invalid_argument("monte_carlo_recovery: need at least 20 replications");

    std::vector<double> rmse(static_cast<std::size_t>(reps),
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<double> coverage = rmse;
    std::vector<double> chosen = rmse;

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t i) {
        SyntheticSpec rep_spec = spec;
        rep_spec.seed = stream_seed(spec.seed, i);
        try {
            const SimulatedTVAR sim = simulate_tvar(rep_spec);
            const SmoothingChoice choice = select_smoothing(sim.series, spec.q);
            const TVARPath fit = estimate_tvar_kalman(sim.series, spec.q, choice.config);
            const CoefficientBands bands = coefficient_bands(fit, 0.95);

            const Eigen::Index n = fit.coeff_paths.rows();
            const Eigen::Index q = fit.coeff_paths.cols();
            double sq_sum = 0.0;
            double covered = 0.0;
            for (Eigen::Index t = 0; t < n; ++t) {
                for (Eigen::Index l = 0; l < q; ++l) {
                    const double truth = sim.true_paths(t + spec.q, l);
                    const double err = fit.coeff_paths(t, l) - truth;
                    sq_sum += err * err;
                    if (bands.lower(t, l) <= truth && truth <= bands.upper(t, l)) covered += 1.0;
                }
            }
            const double cells = static_cast<double>(n) * static_cast<double>(q);
            rmse[i] = std::sqrt(sq_sum / cells);
            coverage[i] = covered / cells;
            chosen[i] = choice.config.variance_ratio;
        } catch (const std::exception&) {
            // leave NaN; tallied as a failure below
        }
    });

    RecoveryReport out;
    out.reps = reps;
    for (int i = 0; i < reps; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (std::isfinite(rmse[ui])) {
            out.rmse.push_back(rmse[ui]);
            out.coverage.push_back(coverage[ui]);
            out.selected_variance_ratio.push_back(chosen[ui]);
        } else {
            ++out.failures;
        }
    }
    out.rmse_median = detail::quantile(out.rmse, 0.5);
    out.rmse_q25 = detail::quantile(out.rmse, 0.25);
    out.rmse_q75 = detail::quantile(out.rmse, 0.75);
    out.coverage_median = detail::quantile(out.coverage, 0.5);
    out.variance_ratio_median = detail::quantile(out.selected_variance_ratio, 0.5);
    double csum = 0.0;
    for (double c : out.coverage) csum += c;
    out.coverage_mean = out.coverage.empty() ? 0.0 : csum / static_cast<double>(out.coverage.size());
    return out;
}

}  // namespace tvme
