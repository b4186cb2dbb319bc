#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvme/armodel.hpp"

namespace tvme {

namespace detail {
#include "tvme/detail/lc_critical_values.inc"
}  // namespace detail

/// Critical value of the cumulative-score stability statistic for joint
/// dimension m (1..20). Supported levels: 0.01, 0.05, 0.10.
inline double lc_critical_value(int m, double level) {
    if (m < 1 || m > 20) {
        throw std::invalid_argument("lc_critical_value: dimension must be in 1..20");
    }
    const double levels[3] = {0.01, 0.05, 0.10};
    for (int j = 0; j < 3; ++j) {
        if (std::abs(level - levels[j]) < 1e-12) {
            return detail::kLcCriticalValues[m - 1][j];
        }
    }
    throw std::invalid_argument("lc_critical_value: unsupported level " + std::to_string(level));
}

/// Result of the cumulative-score parameter-constancy test.
struct ConstancyResult {
    double statistic = 0.0;                 ///< joint stability statistic
    std::vector<double> individual;         ///< per-component statistics
    std::vector<std::string> component_names;
    int m = 0;                              ///< joint dimension
    bool include_variance = true;
    std::map<double, double> critical_values;  ///< level -> critical value
    std::map<double, bool> reject;             ///< level -> statistic above critical value
};

/// Cumulative-score test of parameter constancy for a fitted AR model.
///
/// Scores are x_it * e_t for each regression coefficient and e_t^2 - sigma2
/// for the innovation variance, where sigma2 is the maximum-likelihood
/// estimate so each score series sums to zero. With S_t the cumulative score
/// sums and V the outer-product matrix of the scores, the joint statistic is
/// (1/n) sum_t S_t' V^{-1} S_t and each individual statistic is
/// (1/(n V_ii)) sum_t S_it^2. Large values indicate instability; the limiting
/// null distribution is the integrated squared m-dimensional Brownian bridge.
inline ConstancyResult hansen_lc(const ARFit& fit, bool include_variance = true) {
    const std::size_t n = fit.residuals.size();
    const int ncoef = fit.order + 1;
    const int m = include_variance ? ncoef + 1 : ncoef;
    if (n == 0 || fit.design.rows() != static_cast<Eigen::Index>(n)) {
        throw std::invalid_argument("hansen_lc: fit carries no usable residuals");
    }
    if (n < static_cast<std::size_t>(m) + 2) {
        throw std::invalid_argument("hansen_lc: too few observations for the score dimension");
    }
    if (m > 20) {
        throw std::invalid_argument("hansen_lc: score dimension above tabulated range");
    }
    // Residuals at rounding-noise level mean every score is numerical dust;
    // the statistic would be a ratio of that dust.
    const double response_scale = fit.response.squaredNorm() / static_cast<double>(n);
    if (!(fit.sigma2_ml > 1e-26 * response_scale)) {
        throw std::runtime_error("hansen_lc: residuals vanish, scores carry no information");
    }

    Eigen::MatrixXd F(n, m);
    for (std::size_t t = 0; t < n; ++t) {
        const double e = fit.residuals[t];
        for (int i = 0; i < ncoef; ++i) {
            F(static_cast<Eigen::Index>(t), i) = fit.design(static_cast<Eigen::Index>(t), i) * e;
        }
        if (include_variance) {
            F(static_cast<Eigen::Index>(t), ncoef) = e * e - fit.sigma2_ml;
        }
    }

    const Eigen::MatrixXd V = F.transpose() * F;
    // Least-squares orthogonality makes each coefficient score sum to zero
    // over the full sample; a violation means the fit and design disagree.
    const Eigen::VectorXd colsum = F.colwise().sum();
    for (int i = 0; i < ncoef; ++i) {
        const double scale = std::sqrt(V(i, i)) + 1.0;
        if (std::abs(colsum(i)) > 1e-7 * scale * std::sqrt(static_cast<double>(n))) {
            throw std::logic_error("hansen_lc: coefficient scores do not sum to zero");
        }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw std::runtime_error("hansen_lc: singular score covariance");
    }

    Eigen::MatrixXd Ssum = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd S = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(m);
    for (std::size_t t = 0; t < n; ++t) {
        S += F.row(static_cast<Eigen::Index>(t)).transpose();
        Ssum.selfadjointView<Eigen::Lower>().rankUpdate(S);
        s2.array() += S.array().square();
    }
    Ssum = Ssum.selfadjointView<Eigen::Lower>();

    ConstancyResult out;
    out.statistic = (ldlt.solve(Ssum)).trace() / static_cast<double>(n);
    out.m = m;
    out.include_variance = include_variance;
    out.individual.resize(m);
    out.component_names.resize(m);
    for (int i = 0; i < m; ++i) {
        const double vii = V(i, i);
        if (!(vii > 0.0)) {
            throw std::runtime_error("hansen_lc: degenerate score component");
        }
        out.individual[i] = s2(i) / (static_cast<double>(n) * vii);
        if (i == 0) {
            out.component_names[i] = "intercept";
        } else if (i <= fit.order) {
            out.component_names[i] = "lag" + std::to_string(i);
        } else {
            out.component_names[i] = "variance";
        }
    }
    for (double level : {0.01, 0.05, 0.10}) {
        const double cv = lc_critical_value(m, level);
        out.critical_values[level] = cv;
        out.reject[level] = out.statistic > cv;
    }
    return out;
}

}  // namespace tvme
