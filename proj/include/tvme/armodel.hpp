#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tvme/series.hpp"

namespace tvme {

/// Fixed-coefficient AR(q) fit: x_t = a0 + a1 x_{t-1} + ... + aq x_{t-q} + u_t,
/// estimated by OLS with a Newey-West HAC covariance attached.
struct ARFit {
    int order = 0;                   // q
    double intercept = 0.0;          // a0
    std::vector<double> coeffs;      // a1..aq
    std::vector<double> residuals;   // length n_used
    double sigma2 = 0.0;             // RSS / (n_used - q - 1)
    double sigma2_ml = 0.0;          // RSS / n_used (used by SBIC and Hansen scores)
    Eigen::MatrixXd hac_cov;         // (q+1) x (q+1), intercept first
    std::vector<double> hac_se;      // sqrt of hac_cov diagonal
    int hac_bandwidth = 0;
    double r2_adj = 0.0;
    double sbic = 0.0;
    std::size_t n_used = 0;
    Eigen::MatrixXd design;          // n_used x (q+1): [1, x_{t-1}, ..., x_{t-q}]
    Eigen::VectorXd response;        // x_t over the estimation sample
};

/// Newey-West automatic bandwidth, floor(4 (T/100)^{2/9}).
inline int nw_auto_bandwidth(std::size_t T) {
    if (T < 10) throw std::invalid_argument("nw_auto_bandwidth: need T >= 10");
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
}

/// Bartlett-kernel HAC covariance of OLS coefficients:
/// (X'X)^{-1} [ S_0 + sum_{j=1}^{L} w_j (S_j + S_j') ] (X'X)^{-1}
/// with S_j = sum_t e_t e_{t-j} x_t x_{t-j}' and w_j = 1 - j/(L+1).
/// Bandwidth 0 collapses to the White heteroskedasticity-robust form.
inline Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& X, std::span<const double> e,
                                      int bandwidth) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto k = X.cols();
    if (n != e.size()) throw std::invalid_argument("newey_west_cov: rows(X) != len(e)");
    if (bandwidth < 0) throw std::invalid_argument("newey_west_cov: bandwidth must be >= 0");

    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw std::runtime_error("newey_west_cov: singular X'X");
    }

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t t = 0; t < n; ++t) {
        s.noalias() += (e[t] * e[t]) * X.row(t).transpose() * X.row(t);
    }
    for (int j = 1; j <= bandwidth; ++j) {
        const double w = 1.0 - static_cast<double>(j) / (bandwidth + 1.0);
        Eigen::MatrixXd sj = Eigen::MatrixXd::Zero(k, k);
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) {
            sj.noalias() += (e[t] * e[t - j]) * X.row(t).transpose() * X.row(t - j);
        }
        s.noalias() += w * (sj + sj.transpose());
    }

    Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    return bread * s * bread;
}

namespace detail {

/// OLS AR(q) fit using observations t = t0..N-1 (t0 >= q). Keeping t0 fixed
/// across candidate orders gives the common estimation sample required for
/// order selection.
inline ARFit fit_ar_window(std::span<const double> x, int q, int t0, int bandwidth = -1) {
    const auto N = x.size();
    if (q < 1) throw std::invalid_argument("fit_ar_ols: order must be >= 1");
    if (t0 < q) throw std::invalid_argument("fit_ar_ols: window start before q-th lag");
    if (N <= static_cast<std::size_t>(3 * (q + 1)) || static_cast<std::size_t>(t0) >= N) {
        throw std::invalid_argument("fit_ar_ols: series too short for order " + std::to_string(q));
    }
    const std::size_t n = N - static_cast<std::size_t>(t0);
    const int k = q + 1;
    if (n <= static_cast<std::size_t>(k + 1)) {
        throw std::invalid_argument("fit_ar_ols: too few observations in estimation window");
    }

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = static_cast<std::size_t>(t0) + i;
        y(i) = x[t];
        X(i, 0) = 1.0;
        for (int j = 1; j <= q; ++j) X(i, j) = x[t - static_cast<std::size_t>(j)];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        throw std::runtime_error("fit_ar_ols: singular design matrix");
    }
    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - X * beta;
    const double rss = resid.squaredNorm();
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();

    ARFit fit;
    fit.order = q;
    fit.intercept = beta(0);
    fit.coeffs.assign(beta.data() + 1, beta.data() + k);
    fit.residuals.assign(resid.data(), resid.data() + n);
    fit.n_used = n;
    fit.sigma2 = rss / static_cast<double>(n - static_cast<std::size_t>(k));
    fit.sigma2_ml = rss / static_cast<double>(n);
    fit.r2_adj = 1.0 - (rss / static_cast<double>(n - static_cast<std::size_t>(k))) /
                           (tss / static_cast<double>(n - 1));
    fit.sbic = std::log(fit.sigma2_ml) +
               static_cast<double>(k) * std::log(static_cast<double>(n)) / static_cast<double>(n);
    fit.hac_bandwidth = bandwidth >= 0 ? bandwidth : nw_auto_bandwidth(n);
    fit.hac_cov = newey_west_cov(X, fit.residuals, fit.hac_bandwidth);
    fit.hac_se.resize(k);
    for (int j = 0; j < k; ++j) fit.hac_se[j] = std::sqrt(fit.hac_cov(j, j));
    fit.design = std::move(X);
    fit.response = std::move(y);
    return fit;
}

}  // namespace detail

inline ARFit fit_ar_ols(std::span<const double> x, int q, int bandwidth = -1) {
    return detail::fit_ar_window(x, q, q, bandwidth);
}

inline ARFit fit_ar_ols(const ReturnSeries& r, int q, int bandwidth = -1) {
    return fit_ar_ols(std::span<const double>(r.values), q, bandwidth);
}

/// Order selection outcome with the criterion value per candidate order.
struct OrderSelection {
    int order = 1;
    std::vector<double> sbic;  ///< index i holds the SBIC of order i + 1
};

/// SBIC order selection over q = 1..q_max. All candidates are estimated on
/// the common sample that drops the first q_max observations; ties break
/// toward the smaller order.
inline OrderSelection select_order_sbic_trace(std::span<const double> x, int q_max) {
    if (q_max < 1) throw std::invalid_argument("select_order_sbic: q_max must be >= 1");
    OrderSelection out;
    double best_sbic = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= q_max; ++q) {
        ARFit fit = detail::fit_ar_window(x, q, q_max, 0);
        out.sbic.push_back(fit.sbic);
        if (fit.sbic < best_sbic) {
            best_sbic = fit.sbic;
            out.order = q;
        }
    }
    return out;
}

inline int select_order_sbic(std::span<const double> x, int q_max) {
    return select_order_sbic_trace(x, q_max).order;
}

inline int select_order_sbic(const ReturnSeries& r, int q_max) {
    return select_order_sbic(std::span<const double>(r.values), q_max);
}

}  // namespace tvme
