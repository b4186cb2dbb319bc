#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvme/series.hpp"

namespace tvme {

/// Deterministic component removed before the unit-root regression.
enum class TrendModel { Constant, ConstantTrend };

/// Information criterion used to pick the lag augmentation order.
enum class LagCriterion { MBIC, MAIC };

namespace detail {
#include "tvme/detail/ur_critical_values.inc"
}  // namespace detail

/// Default local-to-unity drift parameter for GLS detrending.
inline double default_c_bar(TrendModel trend) {
    return trend == TrendModel::Constant ? -7.0 : -13.5;
}

/// Schwert rule of thumb for the maximum lag order: floor(12 * (T/100)^(1/4)).
inline int schwert_max_lag(std::size_t T) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

/// Critical value of the GLS-detrended unit-root t statistic.
/// Supported levels: 0.01, 0.05, 0.10. Throws std::invalid_argument otherwise.
inline double ur_critical_value(TrendModel trend, double level) {
    const int row = trend == TrendModel::Constant ? 0 : 1;
    const double levels[3] = {0.01, 0.05, 0.10};
    for (int j = 0; j < 3; ++j) {
        if (std::abs(level - levels[j]) < 1e-12) {
            return detail::kUrCriticalValues[row][j];
        }
    }
    throw std::invalid_argument("ur_critical_value: unsupported level " + std::to_string(level));
}

/// Removes the deterministic component by quasi-differenced (GLS) regression.
///
/// The series is quasi-differenced at a_bar = 1 + c_bar/T, regressed on the
/// equally quasi-differenced deterministics (constant, or constant and linear
/// trend), and the fitted deterministic part is subtracted from the original
/// levels. Throws std::invalid_argument for fewer than 10 observations or a
/// non-negative c_bar.
inline std::vector<double> gls_detrend(std::span<const double> y, TrendModel trend,
                                       double c_bar) {
    const std::size_t T = y.size();
    if (T < 10) {
        throw std::invalid_argument("gls_detrend: need at least 10 observations");
    }
    if (!(c_bar < 0.0)) {
        throw std::invalid_argument("gls_detrend: c_bar must be negative");
    }
    const double abar = 1.0 + c_bar / static_cast<double>(T);
    const int p = trend == TrendModel::Constant ? 1 : 2;

    Eigen::MatrixXd zq(T, p);
    Eigen::VectorXd yq(T);
    yq(0) = y[0];
    zq(0, 0) = 1.0;
    if (p == 2) zq(0, 1) = 1.0;
    for (std::size_t t = 1; t < T; ++t) {
        yq(static_cast<Eigen::Index>(t)) = y[t] - abar * y[t - 1];
        zq(static_cast<Eigen::Index>(t), 0) = 1.0 - abar;
        if (p == 2) {
            const double tt = static_cast<double>(t + 1);
            zq(static_cast<Eigen::Index>(t), 1) = tt - abar * (tt - 1.0);
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(zq);
    if (qr.rank() < p) {
        throw std::runtime_error("gls_detrend: degenerate regressor matrix");
    }
    const Eigen::VectorXd delta = qr.solve(yq);

    std::vector<double> out(T);
    for (std::size_t t = 0; t < T; ++t) {
        double det = delta(0);
        if (p == 2) det += delta(1) * static_cast<double>(t + 1);
        out[t] = y[t] - det;
    }
    return out;
}

/// Result of the GLS-detrended augmented Dickey-Fuller test.
struct UnitRootResult {
    double statistic = 0.0;       ///< t ratio on the lagged level in the test regression
    int lag = 0;                  ///< selected lag augmentation order
    double phi_hat = 0.0;         ///< implied AR(1) root, 1 + df_slope
    double df_slope = 0.0;        ///< raw coefficient on the lagged level
    TrendModel trend = TrendModel::Constant;
    LagCriterion criterion = LagCriterion::MBIC;
    int max_lag = 0;              ///< largest lag order considered
    double c_bar = 0.0;           ///< local-to-unity drift used for detrending
    std::size_t n_obs = 0;        ///< observations in the final test regression
    std::map<double, double> critical_values;  ///< level -> critical value
    std::map<double, bool> reject;             ///< level -> statistic below critical value
};

namespace detail {

/// Test regression on a detrended series: the first difference is regressed
/// on the lagged level and k lagged differences, with no deterministic terms.
struct DfRegression {
    double slope = 0.0;       ///< coefficient on the lagged level
    double tstat = 0.0;       ///< slope over its OLS standard error
    double rss = 0.0;
    double sum_ylag_sq = 0.0; ///< sum of squared lagged levels over the sample
    std::size_t n_obs = 0;
};

/// Runs the test regression for lag order k on observations t = start..T-1 of
/// the differenced series (start is an index into the level series and must be
/// at least k + 1).
inline DfRegression df_regression(std::span<const double> y, int k, std::size_t start) {
    const std::size_t T = y.size();
    if (start < static_cast<std::size_t>(k) + 1 || start >= T) {
        throw std::invalid_argument("df_regression: invalid sample start");
    }
    const std::size_t n = T - start;
    const int p = k + 1;
    if (n <= static_cast<std::size_t>(p) + 1) {
        throw std::invalid_argument("df_regression: too few observations for the lag order");
    }

    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = start + i;
        d(static_cast<Eigen::Index>(i)) = y[t] - y[t - 1];
        X(static_cast<Eigen::Index>(i), 0) = y[t - 1];
        for (int j = 1; j <= k; ++j) {
            X(static_cast<Eigen::Index>(i), j) = y[t - j] - y[t - j - 1];
        }
    }

    const Eigen::MatrixXd G = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw std::runtime_error("df_regression: singular regressor matrix");
    }
    const Eigen::VectorXd Xd = X.transpose() * d;
    const Eigen::VectorXd beta = ldlt.solve(Xd);
    const Eigen::VectorXd resid = d - X * beta;

    DfRegression out;
    out.slope = beta(0);
    out.rss = resid.squaredNorm();
    out.sum_ylag_sq = X.col(0).squaredNorm();
    out.n_obs = n;
    const double dof = static_cast<double>(n) - static_cast<double>(p);
    const double sigma2 = out.rss / dof;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(p);
    e0(0) = 1.0;
    const double v00 = ldlt.solve(e0)(0);
    if (!(v00 > 0.0)) {
        throw std::runtime_error("df_regression: non-positive variance estimate");
    }
    out.tstat = out.slope / std::sqrt(sigma2 * v00);
    return out;
}

}  // namespace detail

/// GLS-detrended augmented Dickey-Fuller test with information-criterion lag
/// selection.
///
/// The series is GLS-detrended at c_bar (default -7 with a constant, -13.5
/// with constant and trend), the lag order is selected on a common sample
/// t = max_lag+1..T-1 by a modified information criterion that adds the
/// scaled squared t-signal of the lagged level to the lag count, and the test
/// regression is then re-run with the selected order on the full usable
/// sample. A negative max_lag requests the Schwert default.
inline UnitRootResult adf_gls(std::span<const double> y, TrendModel trend,
                              int max_lag = -1,
                              LagCriterion criterion = LagCriterion::MBIC,
                              double c_bar = 0.0) {
    const std::size_t T = y.size();
    if (c_bar == 0.0) c_bar = default_c_bar(trend);
    if (max_lag < 0) max_lag = schwert_max_lag(T);
    if (T < static_cast<std::size_t>(max_lag) * 2 + 12) {
        throw std::invalid_argument("adf_gls: series too short for the requested max lag");
    }

    const std::vector<double> yd = gls_detrend(y, trend, c_bar);
    const std::size_t start = static_cast<std::size_t>(max_lag) + 1;
    const double Tstar = static_cast<double>(T - start);

    int best_k = 0;
    double best_ic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_lag; ++k) {
        const detail::DfRegression reg = detail::df_regression(yd, k, start);
        const double sigma2 = reg.rss / Tstar;
        const double tau = reg.slope * reg.slope * reg.sum_ylag_sq / sigma2;
        const double penalty = criterion == LagCriterion::MBIC ? std::log(Tstar) : 2.0;
        const double ic = std::log(sigma2) + penalty * (tau + static_cast<double>(k)) / Tstar;
        if (ic < best_ic) {
            best_ic = ic;
            best_k = k;
        }
    }

    const detail::DfRegression fin =
        detail::df_regression(yd, best_k, static_cast<std::size_t>(best_k) + 1);

    UnitRootResult out;
    out.statistic = fin.tstat;
    out.lag = best_k;
    out.df_slope = fin.slope;
    out.phi_hat = 1.0 + fin.slope;
    out.trend = trend;
    out.criterion = criterion;
    out.max_lag = max_lag;
    out.c_bar = c_bar;
    out.n_obs = fin.n_obs;
    for (double level : {0.01, 0.05, 0.10}) {
        const double cv = ur_critical_value(trend, level);
        out.critical_values[level] = cv;
        out.reject[level] = out.statistic < cv;
    }
    return out;
}

inline UnitRootResult adf_gls(const ReturnSeries& r, TrendModel trend,
                              int max_lag = -1,
                              LagCriterion criterion = LagCriterion::MBIC,
                              double c_bar = 0.0) {
    return adf_gls(std::span<const double>(r.values), trend, max_lag, criterion, c_bar);
}

}  // namespace tvme
