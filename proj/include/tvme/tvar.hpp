#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "tvme/armodel.hpp"
#include "tvme/detail/normal.hpp"
#include "tvme/series.hpp"

namespace tvme {

/// How the smoothness parameter was chosen.
enum class SmoothingSelection { Fixed, MaxLikelihood };

/// Smoothness configuration of the time-varying AR estimator.
///
/// variance_ratio is delta^2, the variance of the per-period coefficient
/// innovations relative to the observation variance. sigma_u2 and sigma_v2
/// are filled in by estimation; init_variance is the prior variance of the
/// first-period state, also relative to the observation variance.
struct SmoothingConfig {
    double variance_ratio = 1e-4;
    SmoothingSelection selection = SmoothingSelection::Fixed;
    double sigma_u2 = 0.0;
    double sigma_v2 = 0.0;
    double init_variance = 1e6;
};

/// Smoothed coefficient paths of a time-varying AR model with random-walk
/// slopes and a time-invariant intercept.
///
/// Row s of coeff_paths holds (alpha_1,...,alpha_q) for observation q+s of
/// the input series; dates align with those rows. cov_blocks hold the
/// per-period covariance of the smoothed slope vector. residuals are the
/// one-step residuals at the smoothed coefficients. edf is the trace of the
/// smoother's hat matrix, a measure of the effective parameter count.
struct TVARPath {
    int order = 0;
    double alpha0 = 0.0;
    double alpha0_se = 0.0;
    std::vector<std::string> dates;
    Eigen::MatrixXd coeff_paths;
    std::vector<Eigen::MatrixXd> cov_blocks;
    std::vector<double> residuals;
    double loglik = 0.0;
    double edf = 0.0;
    std::vector<double> hac_scale;  ///< per-coefficient long-run se inflation factors
    SmoothingConfig config;
};

namespace detail {

/// Posterior summaries in scaled units (observation variance 1).
struct ScaledPosterior {
    Eigen::MatrixXd mean;                 ///< (q+1) x n smoothed states, intercept last
    std::vector<Eigen::MatrixXd> cov;     ///< per-period (q+1) x (q+1) covariance
    double ssr = 0.0;                     ///< sum of squared scaled prediction errors
    double sum_lnF = 0.0;                 ///< sum of log scaled prediction variances
    double edf = 0.0;
};

inline void check_tvar_inputs(std::span<const double> x, int q, const SmoothingConfig& cfg) {
    if (q < 1) throw std::invalid_argument("tvar: order must be at least 1");
    if (x.size() <= static_cast<std::size_t>(5 * q)) {
        throw std::invalid_argument("tvar: series too short for the requested order");
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("tvar: non-finite values in input series");
    }
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mn == *mx) {
        throw std::invalid_argument("tvar: constant series leaves the system singular");
    }
    if (!(cfg.variance_ratio > 0.0)) {
        throw std::invalid_argument("tvar: variance ratio must be positive");
    }
    if (!(cfg.init_variance > 0.0)) {
        throw std::invalid_argument("tvar: initial variance must be positive");
    }
}

/// Builds the observation rows: column s is (x_{t-1},...,x_{t-q}, 1) and
/// y(s) = x_t for t = q + s.
inline void build_tvar_design(std::span<const double> x, int q, Eigen::MatrixXd& Z,
                              Eigen::VectorXd& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size()) - q;
    Z.resize(q + 1, n);
    y.resize(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const std::size_t t = static_cast<std::size_t>(q + s);
        y(s) = x[t];
        for (int l = 1; l <= q; ++l) {
            Z(l - 1, s) = x[t - static_cast<std::size_t>(l)];
        }
        Z(q, s) = 1.0;
    }
}

/// Forward filter in scaled units. Returns (ssr, sum_lnF); optionally stores
/// the filtered means and covariances for smoothing.
inline std::pair<double, double> kalman_filter_scaled(
    const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double delta2, double kappa,
    Eigen::MatrixXd* a_filt, std::vector<Eigen::MatrixXd>* P_filt) {
    const Eigen::Index d = Z.rows();
    const Eigen::Index n = Z.cols();
    const Eigen::Index q = d - 1;

    Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd P = kappa * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);

    double ssr = 0.0;
    double sum_lnF = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::VectorXd z = Z.col(s);
        const Eigen::VectorXd Pz = P.selfadjointView<Eigen::Lower>() * z;
        const double F = z.dot(Pz) + 1.0;
        if (!(F > 0.0) || !std::isfinite(F)) {
            throw std::runtime_error("tvar: prediction variance collapsed in the filter");
        }
        const double nu = y(s) - z.dot(a);
        ssr += nu * nu / F;
        sum_lnF += std::log(F);

        const Eigen::VectorXd K = Pz / F;
        a += K * nu;
        const Eigen::MatrixXd M = I - K * z.transpose();
        P = M * P.selfadjointView<Eigen::Lower>() * M.transpose() + K * K.transpose();
        P = 0.5 * (P + P.transpose()).eval();

        if (a_filt) {
            a_filt->col(s) = a;
            (*P_filt)[static_cast<std::size_t>(s)] = P;
        }
        if (s + 1 < n) {
            for (Eigen::Index i = 0; i < q; ++i) P(i, i) += delta2;
        }
    }
    return {ssr, sum_lnF};
}

/// Fixed-interval smoother in scaled units.
inline ScaledPosterior kalman_smooth_scaled(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                            double delta2, double kappa) {
    const Eigen::Index d = Z.rows();
    const Eigen::Index n = Z.cols();
    const Eigen::Index q = d - 1;

    Eigen::MatrixXd a_filt(d, n);
    std::vector<Eigen::MatrixXd> P_filt(static_cast<std::size_t>(n));
    const auto [ssr, sum_lnF] = kalman_filter_scaled(Z, y, delta2, kappa, &a_filt, &P_filt);

    ScaledPosterior out;
    out.ssr = ssr;
    out.sum_lnF = sum_lnF;
    out.mean.resize(d, n);
    out.cov.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
    out.mean.col(n - 1) = a_filt.col(n - 1);
    out.cov[static_cast<std::size_t>(n - 1)] = P_filt[static_cast<std::size_t>(n - 1)];

    for (Eigen::Index s = n - 2; s >= 0; --s) {
        const auto us = static_cast<std::size_t>(s);
        Eigen::MatrixXd Ppred = P_filt[us];
        for (Eigen::Index i = 0; i < q; ++i) Ppred(i, i) += delta2;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Ppred);
        if (ldlt.info() != Eigen::Success) {
            throw std::runtime_error("tvar: singular predictive covariance in the smoother");
        }
        const Eigen::MatrixXd C = ldlt.solve(P_filt[us]).transpose();
        out.mean.col(s) = a_filt.col(s) + C * (out.mean.col(s + 1) - a_filt.col(s));
        Eigen::MatrixXd Psm = P_filt[us] + C * (out.cov[us + 1] - Ppred) * C.transpose();
        out.cov[us] = 0.5 * (Psm + Psm.transpose());
    }

    for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::VectorXd z = Z.col(s);
        out.edf += z.dot(out.cov[static_cast<std::size_t>(s)] * z);
    }
    return out;
}

/// Solves the stacked penalized least-squares system in scaled units.
///
/// Unknowns are the per-period slope vectors followed by the global
/// intercept. Observation rows contribute their outer products, smoothness
/// rows couple consecutive slope blocks with weight 1/delta2, and the prior
/// adds 1/kappa to the first block and the intercept. The same quadratic
/// form underlies the filter, which gives the exact correspondences used for
/// the likelihood: the minimized objective equals the filter's weighted sum
/// of squared prediction errors, and log det of the system matrix minus log
/// det of the prior precision equals the filter's sum of log prediction
/// variances.
inline ScaledPosterior stacked_smooth_scaled(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                             double delta2, double kappa) {
    const Eigen::Index d = Z.rows();
    const Eigen::Index n = Z.cols();
    const Eigen::Index q = d - 1;
    const Eigen::Index m = n * q + 1;
    const double w = 1.0 / delta2;
    const double prior = 1.0 / kappa;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n * (q * q + 2 * q + 1) + 4 * q * (n - 1) + d));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::VectorXd z = Z.col(s);
        const Eigen::Index base = s * q;
        for (Eigen::Index i = 0; i < q; ++i) {
            for (Eigen::Index j = 0; j < q; ++j) {
                trips.emplace_back(base + i, base + j, z(i) * z(j));
            }
            trips.emplace_back(base + i, m - 1, z(i));
            trips.emplace_back(m - 1, base + i, z(i));
            b(base + i) += z(i) * y(s);
        }
        trips.emplace_back(m - 1, m - 1, 1.0);
        b(m - 1) += y(s);
    }
    for (Eigen::Index s = 1; s < n; ++s) {
        for (Eigen::Index i = 0; i < q; ++i) {
            const Eigen::Index cur = s * q + i;
            const Eigen::Index prev = (s - 1) * q + i;
            trips.emplace_back(cur, cur, w);
            trips.emplace_back(prev, prev, w);
            trips.emplace_back(cur, prev, -w);
            trips.emplace_back(prev, cur, -w);
        }
    }
    for (Eigen::Index i = 0; i < q; ++i) trips.emplace_back(i, i, prior);
    trips.emplace_back(m - 1, m - 1, prior);

    Eigen::SparseMatrix<double> G(m, m);
    G.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(G);
    if (solver.info() != Eigen::Success || !(solver.vectorD().minCoeff() > 0.0)) {
        throw std::runtime_error("tvar: singular stacked system");
    }

    Eigen::VectorXd theta = solver.solve(b);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd r = b - G * theta;
        theta += solver.solve(r);
    }

    double J = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) {
        double fitted = theta(m - 1);
        for (Eigen::Index i = 0; i < q; ++i) fitted += Z(i, s) * theta(s * q + i);
        const double e = y(s) - fitted;
        J += e * e;
    }
    for (Eigen::Index s = 1; s < n; ++s) {
        for (Eigen::Index i = 0; i < q; ++i) {
            const double step = theta(s * q + i) - theta((s - 1) * q + i);
            J += w * step * step;
        }
    }
    for (Eigen::Index i = 0; i < q; ++i) J += prior * theta(i) * theta(i);
    J += prior * theta(m - 1) * theta(m - 1);

    ScaledPosterior out;
    out.ssr = J;
    const double logdetG = solver.vectorD().array().log().sum();
    const double logdet_prior_precision =
        -static_cast<double>(d) * std::log(kappa) -
        static_cast<double>(q) * static_cast<double>(n - 1) * std::log(delta2);
    out.sum_lnF = logdetG - logdet_prior_precision;

    out.mean.resize(d, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index i = 0; i < q; ++i) out.mean(i, s) = theta(s * q + i);
        out.mean(q, s) = theta(m - 1);
    }

    // Diagonal blocks of the inverse system matrix, extracted by solving for
    // unit columns in chunks. The intercept column supplies all cross terms.
    out.cov.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(d, d));
    Eigen::VectorXd e_last = Eigen::VectorXd::Zero(m);
    e_last(m - 1) = 1.0;
    const Eigen::VectorXd col_last = solver.solve(e_last);
    const double var_alpha0 = col_last(m - 1);

    const Eigen::Index chunk = 256;
    Eigen::MatrixXd E;
    for (Eigen::Index start = 0; start < n * q; start += chunk) {
        const Eigen::Index cols = std::min(chunk, n * q - start);
        E.setZero(m, cols);
        for (Eigen::Index j = 0; j < cols; ++j) E(start + j, j) = 1.0;
        const Eigen::MatrixXd X = solver.solve(E);
        for (Eigen::Index j = 0; j < cols; ++j) {
            const Eigen::Index idx = start + j;
            const Eigen::Index s = idx / q;
            const Eigen::Index i = idx % q;
            for (Eigen::Index rrow = 0; rrow < q; ++rrow) {
                out.cov[static_cast<std::size_t>(s)](rrow, i) = X(s * q + rrow, j);
            }
        }
    }
    for (Eigen::Index s = 0; s < n; ++s) {
        auto& B = out.cov[static_cast<std::size_t>(s)];
        for (Eigen::Index i = 0; i < q; ++i) {
            B(i, q) = col_last(s * q + i);
            B(q, i) = B(i, q);
        }
        B(q, q) = var_alpha0;
        B.topLeftCorner(q, q) = (0.5 * (B.topLeftCorner(q, q) +
                                        B.topLeftCorner(q, q).transpose())).eval();
    }

    for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::VectorXd z = Z.col(s);
        out.edf += z.dot(out.cov[static_cast<std::size_t>(s)] * z);
    }
    return out;
}

/// Per-coefficient long-run inflation of the band width: ratio of the
/// Bartlett long-run variance of the observation scores x_{t-l} * u_t to
/// their short-run variance, as a square root, floored at zero.
inline std::vector<double> hac_scale_factors(const Eigen::MatrixXd& Z,
                                             const std::vector<double>& resid) {
    const Eigen::Index q = Z.rows() - 1;
    const Eigen::Index n = Z.cols();
    std::vector<double> out(static_cast<std::size_t>(q), 1.0);
    if (n < 10) return out;
    const int L = nw_auto_bandwidth(static_cast<std::size_t>(n));
    for (Eigen::Index l = 0; l < q; ++l) {
        std::vector<double> s(static_cast<std::size_t>(n));
        double mean = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            s[static_cast<std::size_t>(t)] = Z(l, t) * resid[static_cast<std::size_t>(t)];
            mean += s[static_cast<std::size_t>(t)];
        }
        mean /= static_cast<double>(n);
        double gamma0 = 0.0;
        for (double v : s) gamma0 += (v - mean) * (v - mean);
        gamma0 /= static_cast<double>(n);
        if (!(gamma0 > 0.0)) continue;
        double lrv = gamma0;
        for (int j = 1; j <= L; ++j) {
            double gj = 0.0;
            for (Eigen::Index t = j; t < n; ++t) {
                gj += (s[static_cast<std::size_t>(t)] - mean) *
                      (s[static_cast<std::size_t>(t - j)] - mean);
            }
            gj /= static_cast<double>(n);
            lrv += 2.0 * (1.0 - static_cast<double>(j) / (L + 1.0)) * gj;
        }
        out[static_cast<std::size_t>(l)] = std::sqrt(std::max(lrv, 0.0) / gamma0);
    }
    return out;
}

inline TVARPath make_tvar_path(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                               const std::vector<std::string>& all_dates, int q,
                               const ScaledPosterior& post, SmoothingConfig cfg) {
    const Eigen::Index n = post.mean.cols();
    const double sigma_u2 = post.ssr / static_cast<double>(n);
    if (!(sigma_u2 > 0.0) || !std::isfinite(sigma_u2)) {
        throw std::runtime_error("tvar: degenerate innovation variance");
    }

    TVARPath path;
    path.order = q;
    path.alpha0 = post.mean(q, 0);
    path.alpha0_se = std::sqrt(sigma_u2 * post.cov[0](q, q));
    path.coeff_paths = post.mean.topRows(q).transpose();
    if (!path.coeff_paths.allFinite()) {
        throw std::runtime_error("tvar: non-finite coefficient path");
    }
    path.cov_blocks.reserve(static_cast<std::size_t>(n));
    path.residuals.resize(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
        path.cov_blocks.push_back(sigma_u2 *
                                  post.cov[static_cast<std::size_t>(s)].topLeftCorner(q, q));
        path.residuals[static_cast<std::size_t>(s)] = y(s) - Z.col(s).dot(post.mean.col(s));
    }
    const double nn = static_cast<double>(n);
    path.loglik = -0.5 * (nn * std::log(2.0 * std::numbers::pi) + nn * std::log(sigma_u2) +
                          post.sum_lnF + nn);
    path.edf = post.edf;
    path.hac_scale = hac_scale_factors(Z, path.residuals);
    if (!all_dates.empty()) {
        path.dates.assign(all_dates.begin() + q, all_dates.end());
    }
    cfg.sigma_u2 = sigma_u2;
    cfg.sigma_v2 = cfg.variance_ratio * sigma_u2;
    path.config = cfg;
    return path;
}

}  // namespace detail

/// Estimates the time-varying AR model by solving the stacked penalized
/// least-squares system with a sparse factorization. Covariance blocks come
/// from the diagonal blocks of the inverse system matrix scaled by the
/// estimated observation variance.
inline TVARPath estimate_tvar_stacked(std::span<const double> x, int q, SmoothingConfig cfg,
                                      const std::vector<std::string>& dates = {}) {
    detail::check_tvar_inputs(x, q, cfg);
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;
    detail::build_tvar_design(x, q, Z, y);
    const auto post = detail::stacked_smooth_scaled(Z, y, cfg.variance_ratio, cfg.init_variance);
    return detail::make_tvar_path(Z, y, dates, q, post, cfg);
}

inline TVARPath estimate_tvar_stacked(const ReturnSeries& r, int q, SmoothingConfig cfg) {
    return estimate_tvar_stacked(std::span<const double>(r.values), q, cfg, r.dates);
}

/// Estimates the same model by Kalman filtering and fixed-interval smoothing
/// of the state-space form: state (alpha_1,...,alpha_q, alpha_0) with
/// identity transition, innovation variance delta^2 on the slopes and zero
/// on the intercept, observation row (x_{t-1},...,x_{t-q}, 1).
inline TVARPath estimate_tvar_kalman(std::span<const double> x, int q, SmoothingConfig cfg,
                                     const std::vector<std::string>& dates = {}) {
    detail::check_tvar_inputs(x, q, cfg);
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;
    detail::build_tvar_design(x, q, Z, y);
    const auto post = detail::kalman_smooth_scaled(Z, y, cfg.variance_ratio, cfg.init_variance);
    return detail::make_tvar_path(Z, y, dates, q, post, cfg);
}

inline TVARPath estimate_tvar_kalman(const ReturnSeries& r, int q, SmoothingConfig cfg) {
    return estimate_tvar_kalman(std::span<const double>(r.values), q, cfg, r.dates);
}

/// Profile log-likelihood of the model at a given variance ratio, with the
/// observation variance concentrated out at its maximizer.
inline double tvar_profile_loglik(std::span<const double> x, int q, double delta2,
                                  double init_variance = 1e6) {
    SmoothingConfig probe;
    probe.variance_ratio = delta2;
    probe.init_variance = init_variance;
    detail::check_tvar_inputs(x, q, probe);
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;
    detail::build_tvar_design(x, q, Z, y);
    const auto [ssr, sum_lnF] =
        detail::kalman_filter_scaled(Z, y, delta2, init_variance, nullptr, nullptr);
    const double n = static_cast<double>(y.size());
    const double sigma_u2 = ssr / n;
    return -0.5 * (n * std::log(2.0 * std::numbers::pi) + n * std::log(sigma_u2) + sum_lnF + n);
}

/// Outcome of data-driven smoothness selection.
struct SmoothingChoice {
    SmoothingConfig config;
    std::vector<std::pair<double, double>> profile;  ///< (variance ratio, log-likelihood) scan
    bool hit_lower_bound = false;  ///< argmax at the scan's lower edge (no detectable variation)
    bool flat_likelihood = false;  ///< profile flat; default variance ratio used instead
};

/// Maximum-likelihood selection of the variance ratio.
///
/// Scans ln delta^2 over [-20, 5] in steps of 0.5, keeps the first argmax,
/// then refines by golden-section search within one grid step. A flat
/// profile falls back to delta^2 = 0.01 and sets flat_likelihood; an argmax
/// at the lower scan edge sets hit_lower_bound.
inline SmoothingChoice select_smoothing(std::span<const double> x, int q) {
    SmoothingConfig probe;
    detail::check_tvar_inputs(x, q, probe);
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;
    detail::build_tvar_design(x, q, Z, y);
    const double kappa = probe.init_variance;
    const double n = static_cast<double>(y.size());

    const auto loglik_at = [&](double ln_d2) {
        const auto [ssr, sum_lnF] =
            detail::kalman_filter_scaled(Z, y, std::exp(ln_d2), kappa, nullptr, nullptr);
        const double sigma_u2 = ssr / n;
        return -0.5 * (n * std::log(2.0 * std::numbers::pi) + n * std::log(sigma_u2) + sum_lnF + n);
    };

    SmoothingChoice out;
    constexpr double lo_edge = -20.0;
    constexpr double hi_edge = 5.0;
    constexpr double step = 0.5;
    const int npts = static_cast<int>(std::lround((hi_edge - lo_edge) / step)) + 1;
    int best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    double min_ll = std::numeric_limits<double>::infinity();
    out.profile.reserve(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) {
        const double g = lo_edge + step * i;
        const double ll = loglik_at(g);
        out.profile.emplace_back(std::exp(g), ll);
        if (ll > best_ll) {
            best_ll = ll;
            best = i;
        }
        min_ll = std::min(min_ll, ll);
    }

    if (best_ll - min_ll < 1e-9 * std::max(1.0, std::abs(best_ll))) {
        out.flat_likelihood = true;
        out.config.variance_ratio = 0.01;
    } else {
        double a = lo_edge + step * std::max(0, best - 1);
        double b = lo_edge + step * std::min(npts - 1, best + 1);
        constexpr double invphi = 0.6180339887498949;
        double c = b - invphi * (b - a);
        double d = a + invphi * (b - a);
        double fc = loglik_at(c);
        double fd = loglik_at(d);
        while (b - a > 1e-10) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = loglik_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = loglik_at(d);
            }
        }
        out.config.variance_ratio = std::exp(0.5 * (a + b));
        out.hit_lower_bound = best == 0;
    }

    out.config.selection = SmoothingSelection::MaxLikelihood;
    out.config.init_variance = kappa;
    const auto [ssr, sum_lnF] = detail::kalman_filter_scaled(
        Z, y, out.config.variance_ratio, kappa, nullptr, nullptr);
    (void)sum_lnF;
    out.config.sigma_u2 = ssr / n;
    out.config.sigma_v2 = out.config.variance_ratio * out.config.sigma_u2;
    return out;
}

inline SmoothingChoice select_smoothing(const ReturnSeries& r, int q) {
    return select_smoothing(std::span<const double>(r.values), q);
}

/// Per-period normal confidence bands for the coefficient paths.
struct CoefficientBands {
    double level = 0.95;
    bool hac = false;
    Eigen::MatrixXd se;     ///< (T - q) x q standard errors used
    Eigen::MatrixXd lower;  ///< coeff - z * se
    Eigen::MatrixXd upper;  ///< coeff + z * se
};

/// Builds per-period intervals alpha +- z * se with se from the covariance
/// blocks. With hac = true, each coefficient's se is inflated by the stored
/// long-run factor from the Bartlett-weighted observation scores.
inline CoefficientBands coefficient_bands(const TVARPath& path, double level, bool hac = false) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("coefficient_bands: level must be in (0, 1)");
    }
    const Eigen::Index n = path.coeff_paths.rows();
    const Eigen::Index q = path.coeff_paths.cols();
    const double z = detail::two_sided_z(level);

    CoefficientBands out;
    out.level = level;
    out.hac = hac;
    out.se.resize(n, q);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index l = 0; l < q; ++l) {
            double se = std::sqrt(std::max(path.cov_blocks[static_cast<std::size_t>(t)](l, l), 0.0));
            if (hac) se *= path.hac_scale[static_cast<std::size_t>(l)];
            out.se(t, l) = se;
        }
    }
    out.lower = path.coeff_paths - z * out.se;
    out.upper = path.coeff_paths + z * out.se;
    return out;
}

}  // namespace tvme
