#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tvme/detail/normal.hpp"
#include "tvme/rng.hpp"
#include "tvme/series.hpp"
#include "tvme/tvar.hpp"

namespace tvme {

/// Spectral radius of the companion matrix of an AR coefficient vector.
inline double companion_spectral_radius(std::span<const double> alpha) {
    const int q = static_cast<int>(alpha.size());
    if (q == 0) return 0.0;
    if (q == 1) return std::abs(alpha[0]);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(q, q);
    for (int j = 0; j < q; ++j) C(0, j) = alpha[static_cast<std::size_t>(j)];
    for (int i = 1; i < q; ++i) C(i, i - 1) = 1.0;
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues();
    double r = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev(i)));
    return r;
}

/// Per-period local stationarity: true iff all companion eigenvalues of the
/// period's frozen coefficient vector lie strictly inside the unit circle.
inline std::vector<bool> local_stationarity(const TVARPath& path) {
    const Eigen::Index n = path.coeff_paths.rows();
    const Eigen::Index q = path.coeff_paths.cols();
    std::vector<bool> out(static_cast<std::size_t>(n));
    std::vector<double> a(static_cast<std::size_t>(q));
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index l = 0; l < q; ++l) a[static_cast<std::size_t>(l)] = path.coeff_paths(t, l);
        out[static_cast<std::size_t>(t)] = companion_spectral_radius(a) < 1.0;
    }
    return out;
}

/// Time-varying moving-average coefficients up to a fixed horizon.
struct ImpulseSurface {
    int horizons = 0;                ///< largest horizon K
    Eigen::MatrixXd values;          ///< (T - q) x (K + 1), first column identically 1
    std::vector<std::string> dates;  ///< copied from the coefficient path
};

/// Per-period impulse responses by recursive inversion of the frozen AR
/// polynomial: beta_0 = 1, beta_k = sum_{j=1}^{min(k,q)} beta_{k-j} alpha_j.
inline ImpulseSurface impulse_surface(const TVARPath& path, int K) {
    if (K < 1) throw std::invalid_argument("impulse_surface: horizon must be at least 1");
    const Eigen::Index n = path.coeff_paths.rows();
    const Eigen::Index q = path.coeff_paths.cols();

    ImpulseSurface out;
    out.horizons = K;
    out.dates = path.dates;
    out.values.resize(n, K + 1);
    for (Eigen::Index t = 0; t < n; ++t) {
        out.values(t, 0) = 1.0;
        for (int k = 1; k <= K; ++k) {
            double b = 0.0;
            const int jmax = std::min<int>(k, static_cast<int>(q));
            for (int j = 1; j <= jmax; ++j) {
                b += out.values(t, k - j) * path.coeff_paths(t, j - 1);
            }
            out.values(t, k) = b;
        }
    }
    return out;
}

/// Delta-method standard error of the long-run multiplier 1/(1 - sum alpha).
/// All partial derivatives equal 1/(1 - sum alpha)^2, so the variance is that
/// factor squared times the total sum of the covariance entries. Returns
/// nothing when the period is not locally stationary.
inline std::optional<double> delta_method_se(std::span<const double> alpha,
                                             const Eigen::MatrixXd& cov) {
    const int q = static_cast<int>(alpha.size());
    if (cov.rows() != q || cov.cols() != q) {
        throw std::invalid_argument("delta_method_se: covariance dimension mismatch");
    }
    if (!(companion_spectral_radius(alpha) < 1.0)) return std::nullopt;
    double s = 0.0;
    for (double a : alpha) s += a;
    const double g = 1.0 / ((1.0 - s) * (1.0 - s));
    const double total = cov.sum();
    return g * std::sqrt(std::max(total, 0.0));
}

/// Long-run multiplier paths with delta-method uncertainty.
///
/// phi_inf, se, deviation and the band edges hold NaN at periods that are not
/// locally stationary; consumers should treat those as gaps.
struct EfficiencyPath {
    std::vector<std::string> dates;
    std::vector<double> phi_inf;
    std::vector<double> se;
    std::vector<bool> locally_stationary;
    std::vector<double> deviation;  ///< |phi_inf - 1|
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> bands;
};

/// Computes phi_inf = 1/(1 - sum alpha) per period where locally stationary,
/// with delta-method standard errors and normal bands at the given levels.
inline EfficiencyPath long_run_multipliers(const TVARPath& path,
                                           const std::vector<double>& levels = {0.95}) {
    const Eigen::Index n = path.coeff_paths.rows();
    const Eigen::Index q = path.coeff_paths.cols();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    EfficiencyPath out;
    out.dates = path.dates;
    out.phi_inf.assign(static_cast<std::size_t>(n), nan);
    out.se.assign(static_cast<std::size_t>(n), nan);
    out.deviation.assign(static_cast<std::size_t>(n), nan);
    out.locally_stationary = local_stationarity(path);

    std::vector<double> a(static_cast<std::size_t>(q));
    for (Eigen::Index t = 0; t < n; ++t) {
        if (!out.locally_stationary[static_cast<std::size_t>(t)]) continue;
        double s = 0.0;
        for (Eigen::Index l = 0; l < q; ++l) {
            a[static_cast<std::size_t>(l)] = path.coeff_paths(t, l);
            s += path.coeff_paths(t, l);
        }
        const double phi = 1.0 / (1.0 - s);
        out.phi_inf[static_cast<std::size_t>(t)] = phi;
        out.deviation[static_cast<std::size_t>(t)] = std::abs(phi - 1.0);
        const auto se = delta_method_se(a, path.cov_blocks[static_cast<std::size_t>(t)]);
        if (se) out.se[static_cast<std::size_t>(t)] = *se;
    }

    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw std::invalid_argument("long_run_multipliers: level must be in (0, 1)");
        }
        const double z = detail::two_sided_z(level);
        std::vector<double> lo(static_cast<std::size_t>(n), nan);
        std::vector<double> hi(static_cast<std::size_t>(n), nan);
        for (std::size_t t = 0; t < static_cast<std::size_t>(n); ++t) {
            if (std::isfinite(out.phi_inf[t]) && std::isfinite(out.se[t])) {
                lo[t] = out.phi_inf[t] - z * out.se[t];
                hi[t] = out.phi_inf[t] + z * out.se[t];
            }
        }
        out.bands.emplace(level, std::make_pair(std::move(lo), std::move(hi)));
    }
    return out;
}

/// Outcome of the residual-bootstrap test of all slope paths being zero.
struct BootstrapResult {
    double p_sup = 1.0;         ///< p-value for the sup-norm statistic (primary)
    double p_mean = 1.0;        ///< p-value for the mean-norm variant
    double stat_sup = 0.0;      ///< observed sup_t of the slope vector 2-norm
    double stat_mean = 0.0;     ///< observed mean over t of the slope vector 2-norm
    int reps_requested = 0;
    int reps_used = 0;
    int reps_dropped = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::pair<double, double> path_norm_stats(const TVARPath& path) {
    const Eigen::Index n = path.coeff_paths.rows();
    double sup = 0.0;
    double mean = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double norm = path.coeff_paths.row(t).norm();
        sup = std::max(sup, norm);
        mean += norm;
    }
    return {sup, mean / static_cast<double>(n)};
}

}  // namespace detail

/// Residual bootstrap of the null that every slope path is identically zero.
///
/// Under the null the returns are i.i.d. around their mean, so bootstrap
/// series are built by resampling the demeaned observations with replacement
/// and adding the mean back. Each replicate repeats the full estimation
/// procedure: a configuration produced by likelihood selection is re-selected
/// on the replicate's own series (otherwise the observed statistic, whose
/// smoothing chased the sample's noise, is compared against replicates that
/// were never allowed to chase theirs, and the test over-rejects), while a
/// fixed configuration is reused as given. The sup-norm and mean-norm
/// statistics of the slope paths are compared against their bootstrap
/// distributions. p-values use the (1 + exceedances) / (reps + 1) convention.
/// Replicates that fail to estimate are dropped and counted; more than 5%
/// drops abort. Replicates draw from independent, index-keyed RNG streams,
/// so results do not depend on thread scheduling.
inline BootstrapResult bootstrap_joint_zero_test(std::span<const double> x, int q,
                                                 const SmoothingConfig& cfg, int reps,
                                                 std::uint64_t seed) {
    if (reps < 99) {
        throw std::invalid_argument("bootstrap_joint_zero_test: need at least 99 replicates");
    }
    const std::size_t N = x.size();
    const TVARPath observed = estimate_tvar_kalman(x, q, cfg);
    const auto [stat_sup, stat_mean] = detail::path_norm_stats(observed);

    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(N);
    std::vector<double> centered(N);
    for (std::size_t t = 0; t < N; ++t) centered[t] = x[t] - xbar;

    std::vector<double> boot_sup(static_cast<std::size_t>(reps),
                                 std::numeric_limits<double>::quiet_NaN());
    std::vector<double> boot_mean(static_cast<std::size_t>(reps),
                                  std::numeric_limits<double>::quiet_NaN());
    std::atomic<int> dropped{0};

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t i) {
        Rng rng = make_stream_rng(seed, i);
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        std::vector<double> xb(N);
        for (std::size_t t = 0; t < N; ++t) xb[t] = xbar + centered[pick(rng)];
        try {
            SmoothingConfig rep_cfg = cfg;
            if (cfg.selection == SmoothingSelection::MaxLikelihood) {
                rep_cfg = select_smoothing(std::span<const double>(xb), q).config;
            }
            const TVARPath fit = estimate_tvar_kalman(xb, q, rep_cfg);
            const auto [s, m] = detail::path_norm_stats(fit);
            boot_sup[i] = s;
            boot_mean[i] = m;
        } catch (const std::exception&) {
            dropped.fetch_add(1);
        }
    });

    BootstrapResult out;
    out.stat_sup = stat_sup;
    out.stat_mean = stat_mean;
    out.reps_requested = reps;
    out.reps_dropped = dropped.load();
    out.reps_used = reps - out.reps_dropped;
    out.seed = seed;
    if (out.reps_dropped * 20 > reps) {
        throw std::runtime_error("bootstrap_joint_zero_test: more than 5% of replicates failed");
    }

    int exceed_sup = 0;
    int exceed_mean = 0;
    for (int i = 0; i < reps; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (std::isfinite(boot_sup[ui]) && boot_sup[ui] >= stat_sup) ++exceed_sup;
        if (std::isfinite(boot_mean[ui]) && boot_mean[ui] >= stat_mean) ++exceed_mean;
    }
    out.p_sup = (1.0 + exceed_sup) / (out.reps_used + 1.0);
    out.p_mean = (1.0 + exceed_mean) / (out.reps_used + 1.0);
    return out;
}

inline BootstrapResult bootstrap_joint_zero_test(const ReturnSeries& r, int q,
                                                 const SmoothingConfig& cfg, int reps,
                                                 std::uint64_t seed) {
    return bootstrap_joint_zero_test(std::span<const double>(r.values), q, cfg, reps, seed);
}

}  // namespace tvme
