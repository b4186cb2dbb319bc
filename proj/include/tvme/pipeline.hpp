#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tvme/armodel.hpp"
#include "tvme/constancy.hpp"
#include "tvme/efficiency.hpp"
#include "tvme/series.hpp"
#include "tvme/stationarity.hpp"
#include "tvme/tvar.hpp"
#include "tvme/version.hpp"

namespace tvme {

/// Which estimation backend the pipeline runs.
enum class Backend { Stacked, Kalman, Both };

/// Full configuration of a pipeline run.
struct PipelineConfig {
    std::string input_path;
    ColumnSpec columns;
    ValueKind value_kind = ValueKind::Prices;
    TrendModel trend = TrendModel::ConstantTrend;
    int q_max = 6;
    bool delta2_auto = true;
    double delta2_fixed = 0.01;
    int horizons = 60;
    int boot_reps = 999;
    std::uint64_t seed = 12345;
    double level = 0.95;
    std::string out_dir = ".";
    Backend backend = Backend::Both;
    bool force = false;
};

/// A labeled historical event, either a point date or a date range.
struct Event {
    std::string label;
    std::string start;
    std::string end;  ///< empty for point events
};

/// Event overlay annotations for plots; ships with a bundled default set of
/// major market events.
struct EventAnnotations {
    std::vector<Event> events;
    static EventAnnotations defaults();
};

inline EventAnnotations EventAnnotations::defaults() {
    EventAnnotations a;
    a.events = {
        {"1973 Oil Crisis", "1973:10", ""},
        {"1979 Oil Crisis", "1979:01", ""},
        {"Asset Price Bubble", "1986:12", "1991:02"},
        {"Black Monday", "1987:10", ""},
        {"Dot-com Bubble", "1995:08", "2000:03"},
        {"Asia Financial Crisis", "1997:07", ""},
        {"Financial Big Bang", "1998:04", "2002:03"},
        {"Lehman Brothers Collapse", "2008:10", ""},
    };
    return a;
}

/// Everything a pipeline run produced, including the rendered JSON report.
struct PipelineResult {
    PipelineConfig config;
    ReturnSeries returns;
    DescriptiveStats stats;
    UnitRootResult unit_root;
    OrderSelection order_selection;
    ARFit ar_fit;
    ConstancyResult constancy;
    SmoothingChoice smoothing;
    TVARPath tvar;
    double backend_divergence = 0.0;
    ImpulseSurface surface;
    EfficiencyPath efficiency;
    BootstrapResult bootstrap;
    std::vector<Event> overlay;
    std::vector<std::string> warnings;
    nlohmann::ordered_json report;
};

namespace detail {

inline void validate_pipeline_config(const PipelineConfig& cfg) {
    if (cfg.input_path.empty()) throw std::invalid_argument("config: input path required");
    if (cfg.q_max < 1) throw std::invalid_argument("config: q_max must be at least 1");
    if (cfg.horizons < 1) throw std::invalid_argument("config: horizons must be at least 1");
    if (cfg.boot_reps < 99) throw std::invalid_argument("config: boot_reps must be at least 99");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw std::invalid_argument("config: level must be in (0, 1)");
    }
    if (!cfg.delta2_auto && !(cfg.delta2_fixed > 0.0)) {
        throw std::invalid_argument("config: fixed delta2 must be positive");
    }
    if (cfg.out_dir.empty()) throw std::invalid_argument("config: output directory required");
}

inline void validate_events(const EventAnnotations& events) {
    for (const Event& e : events.events) {
        if (e.label.empty()) throw std::invalid_argument("event: empty label");
        if (e.start.empty()) throw std::invalid_argument("event: empty start date");
        if (!e.end.empty() && e.end < e.start) {
            throw std::invalid_argument("event '" + e.label + "': end date before start date");
        }
    }
}

template <typename F>
auto pipeline_stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
}

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    if (!out.good()) throw std::runtime_error("cannot write file " + path.string());
}

inline std::string render_descriptive_csv(const DescriptiveStats& s) {
    std::string csv = "stat,value\n";
    csv += "mean," + fmt12(s.mean) + "\n";
    csv += "sd," + fmt12(s.sd) + "\n";
    csv += "min," + fmt12(s.min) + "\n";
    csv += "max," + fmt12(s.max) + "\n";
    csv += "n," + std::to_string(s.n) + "\n";
    return csv;
}

inline std::string render_tvar_csv(const TVARPath& path) {
    const Eigen::Index n = path.coeff_paths.rows();
    const Eigen::Index q = path.coeff_paths.cols();
    std::string csv = "date";
    for (Eigen::Index l = 1; l <= q; ++l) csv += ",alpha" + std::to_string(l);
    for (Eigen::Index l = 1; l <= q; ++l) csv += ",se" + std::to_string(l);
    csv += "\n";
    for (Eigen::Index t = 0; t < n; ++t) {
        csv += path.dates[static_cast<std::size_t>(t)];
        for (Eigen::Index l = 0; l < q; ++l) csv += "," + fmt12(path.coeff_paths(t, l));
        for (Eigen::Index l = 0; l < q; ++l) {
            const double var = path.cov_blocks[static_cast<std::size_t>(t)](l, l);
            csv += "," + fmt12(std::sqrt(std::max(var, 0.0)));
        }
        csv += "\n";
    }
    return csv;
}

inline std::string render_impulse_csv(const ImpulseSurface& s) {
    std::string csv = "date,horizon,beta\n";
    for (Eigen::Index t = 0; t < s.values.rows(); ++t) {
        for (int k = 0; k <= s.horizons; ++k) {
            csv += s.dates[static_cast<std::size_t>(t)] + "," + std::to_string(k) + "," +
                   fmt12(s.values(t, k)) + "\n";
        }
    }
    return csv;
}

inline std::string render_efficiency_csv(const EfficiencyPath& e, double level) {
    const auto& [lo, hi] = e.bands.at(level);
    std::string csv = "date,phi,se,lo,hi,stationary_flag,deviation\n";
    for (std::size_t t = 0; t < e.phi_inf.size(); ++t) {
        csv += e.dates[t] + "," + fmt12(e.phi_inf[t]) + "," + fmt12(e.se[t]) + "," +
               fmt12(lo[t]) + "," + fmt12(hi[t]) + "," +
               (e.locally_stationary[t] ? "1" : "0") + "," + fmt12(e.deviation[t]) + "\n";
    }
    return csv;
}

inline std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Stacked: return "stacked";
        case Backend::Kalman: return "kalman";
        default: return "both";
    }
}

}  // namespace detail

/// Renders the single JSON report from the completed stage results.
inline nlohmann::ordered_json emit_report(const PipelineResult& r) {
    using json = nlohmann::ordered_json;
    const PipelineConfig& cfg = r.config;
    json j;
    j["tool"] = {{"name", "tvme"}, {"version", version_string}};
    j["config"] = {
        {"input", cfg.input_path},
        {"date_col", cfg.columns.date_col},
        {"value_col", cfg.columns.value_col},
        {"value_kind", cfg.value_kind == ValueKind::Prices ? "prices" : "returns"},
        {"trend", cfg.trend == TrendModel::Constant ? "c" : "ct"},
        {"q_max", cfg.q_max},
        {"delta2_auto", cfg.delta2_auto},
        {"delta2_fixed", cfg.delta2_fixed},
        {"horizons", cfg.horizons},
        {"boot_reps", cfg.boot_reps},
        {"seed", cfg.seed},
        {"level", cfg.level},
        {"out_dir", cfg.out_dir},
        {"backend", detail::backend_name(cfg.backend)},
        {"force", cfg.force},
    };
    j["input"] = {
        {"returns_n", r.returns.values.size()},
        {"date_start", r.returns.dates.empty() ? "" : r.returns.dates.front()},
        {"date_end", r.returns.dates.empty() ? "" : r.returns.dates.back()},
    };
    j["descriptive"] = {
        {"mean", r.stats.mean}, {"sd", r.stats.sd}, {"min", r.stats.min},
        {"max", r.stats.max},   {"n", r.stats.n},
    };

    json cv = json::object();
    json rej = json::object();
    for (const auto& [level, value] : r.unit_root.critical_values) cv[detail::fmt12(level)] = value;
    for (const auto& [level, flag] : r.unit_root.reject) rej[detail::fmt12(level)] = flag;
    j["unit_root"] = {
        {"statistic", r.unit_root.statistic},
        {"lag", r.unit_root.lag},
        {"phi_hat", r.unit_root.phi_hat},
        {"df_slope", r.unit_root.df_slope},
        {"trend", r.unit_root.trend == TrendModel::Constant ? "c" : "ct"},
        {"criterion", r.unit_root.criterion == LagCriterion::MBIC ? "mbic" : "maic"},
        {"max_lag", r.unit_root.max_lag},
        {"c_bar", r.unit_root.c_bar},
        {"n_obs", r.unit_root.n_obs},
        {"critical_values", cv},
        {"reject", rej},
    };

    j["order_selection"] = {
        {"q_max", cfg.q_max},
        {"sbic", r.order_selection.sbic},
        {"selected", r.order_selection.order},
    };
    j["ar_fit"] = {
        {"order", r.ar_fit.order},
        {"intercept", r.ar_fit.intercept},
        {"coefficients", r.ar_fit.coeffs},
        {"intercept_se", r.ar_fit.hac_se.empty() ? 0.0 : r.ar_fit.hac_se.front()},
        {"coefficient_se",
         std::vector<double>(r.ar_fit.hac_se.begin() + 1, r.ar_fit.hac_se.end())},
        {"hac_bandwidth", r.ar_fit.hac_bandwidth},
        {"r2_adj", r.ar_fit.r2_adj},
        {"sbic", r.ar_fit.sbic},
        {"sigma2", r.ar_fit.sigma2},
        {"sigma2_ml", r.ar_fit.sigma2_ml},
        {"n_used", r.ar_fit.n_used},
    };

    json individual = json::object();
    for (std::size_t i = 0; i < r.constancy.individual.size(); ++i) {
        individual[r.constancy.component_names[i]] = r.constancy.individual[i];
    }
    json ccv = json::object();
    json crej = json::object();
    for (const auto& [level, value] : r.constancy.critical_values) ccv[detail::fmt12(level)] = value;
    for (const auto& [level, flag] : r.constancy.reject) crej[detail::fmt12(level)] = flag;
    j["constancy"] = {
        {"statistic", r.constancy.statistic},
        {"m", r.constancy.m},
        {"include_variance", r.constancy.include_variance},
        {"individual", individual},
        {"critical_values", ccv},
        {"reject", crej},
    };

    json profile = json::array();
    for (const auto& [vr, ll] : r.smoothing.profile) profile.push_back({vr, ll});
    j["smoothing"] = {
        {"selection",
         r.tvar.config.selection == SmoothingSelection::MaxLikelihood ? "max_likelihood" : "fixed"},
        {"variance_ratio", r.tvar.config.variance_ratio},
        {"sigma_u2", r.tvar.config.sigma_u2},
        {"sigma_v2", r.tvar.config.sigma_v2},
        {"init_variance", r.tvar.config.init_variance},
        {"hit_lower_bound", r.smoothing.hit_lower_bound},
        {"flat_likelihood", r.smoothing.flat_likelihood},
        {"profile", profile},
    };

    const Eigen::Index q = r.tvar.coeff_paths.cols();
    std::vector<double> path_sd(static_cast<std::size_t>(q), 0.0);
    std::vector<double> mean_se(static_cast<std::size_t>(q), 0.0);
    const Eigen::Index n = r.tvar.coeff_paths.rows();
    for (Eigen::Index l = 0; l < q; ++l) {
        const double mean = r.tvar.coeff_paths.col(l).mean();
        double acc = 0.0;
        double se_acc = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double d = r.tvar.coeff_paths(t, l) - mean;
            acc += d * d;
            se_acc += std::sqrt(std::max(r.tvar.cov_blocks[static_cast<std::size_t>(t)](l, l), 0.0));
        }
        path_sd[static_cast<std::size_t>(l)] = std::sqrt(acc / static_cast<double>(n));
        mean_se[static_cast<std::size_t>(l)] = se_acc / static_cast<double>(n);
    }
    j["tvar"] = {
        {"order", r.tvar.order},
        {"alpha0", r.tvar.alpha0},
        {"alpha0_se", r.tvar.alpha0_se},
        {"loglik", r.tvar.loglik},
        {"edf", r.tvar.edf},
        {"backend", detail::backend_name(cfg.backend)},
        {"backend_divergence", r.backend_divergence},
        {"coeff_path_sd", path_sd},
        {"coeff_mean_se", mean_se},
        {"hac_scale", r.tvar.hac_scale},
    };

    std::size_t nonstat = 0;
    double phi_sum = 0.0;
    double dev_sum = 0.0;
    double phi_min = std::numeric_limits<double>::infinity();
    double phi_max = -std::numeric_limits<double>::infinity();
    std::size_t finite = 0;
    for (std::size_t t = 0; t < r.efficiency.phi_inf.size(); ++t) {
        if (!r.efficiency.locally_stationary[t]) ++nonstat;
        const double phi = r.efficiency.phi_inf[t];
        if (std::isfinite(phi)) {
            ++finite;
            phi_sum += phi;
            dev_sum += r.efficiency.deviation[t];
            phi_min = std::min(phi_min, phi);
            phi_max = std::max(phi_max, phi);
        }
    }
    j["efficiency"] = {
        {"periods", r.efficiency.phi_inf.size()},
        {"nonstationary_periods", nonstat},
        {"phi_mean", finite ? phi_sum / static_cast<double>(finite) : 0.0},
        {"phi_min", finite ? phi_min : 0.0},
        {"phi_max", finite ? phi_max : 0.0},
        {"deviation_mean", finite ? dev_sum / static_cast<double>(finite) : 0.0},
    };

    j["bootstrap"] = {
        {"reps_requested", r.bootstrap.reps_requested},
        {"reps_used", r.bootstrap.reps_used},
        {"reps_dropped", r.bootstrap.reps_dropped},
        {"stat_sup", r.bootstrap.stat_sup},
        {"stat_mean", r.bootstrap.stat_mean},
        {"p_sup", r.bootstrap.p_sup},
        {"p_mean", r.bootstrap.p_mean},
        {"seed", r.bootstrap.seed},
    };

    json events = json::array();
    for (const Event& e : r.overlay) {
        json je = {{"label", e.label}, {"start", e.start}};
        if (e.end.empty()) {
            je["end"] = nullptr;
        } else {
            je["end"] = e.end;
        }
        events.push_back(je);
    }
    j["events"] = events;
    j["warnings"] = r.warnings;
    return j;
}

/// Runs the full analysis pipeline and writes report.json plus the four CSV
/// artifacts into the configured output directory.
///
/// Stage order: ingest, descriptive stats, unit-root test, AR order
/// selection and fit, parameter-constancy test, smoothness selection,
/// time-varying AR estimation (both backends by default, agreement asserted
/// to 1e-6 with the stacked result as the canonical one), local
/// stationarity, impulse surface, long-run multipliers, residual bootstrap.
/// A unit-root non-rejection at the 5% level stops the run unless force is
/// set, in which case it becomes a prominent warning.
inline PipelineResult run_pipeline(const PipelineConfig& cfg,
                                   const EventAnnotations& events = EventAnnotations::defaults()) {
    detail::validate_pipeline_config(cfg);
    detail::validate_events(events);

    PipelineResult r;
    r.config = cfg;

    r.returns = detail::pipeline_stage("ingest", [&] {
        if (cfg.value_kind == ValueKind::Prices) {
            return to_log_returns(load_price_csv(cfg.input_path, cfg.columns));
        }
        return load_return_csv(cfg.input_path, cfg.columns);
    });

    r.stats = detail::pipeline_stage("describe", [&] { return describe(r.returns); });

    r.unit_root = detail::pipeline_stage("unit_root", [&] { return adf_gls(r.returns, cfg.trend); });
    if (!r.unit_root.reject.at(0.05)) {
        const std::string msg =
            "unit-root test fails to reject nonstationarity of the returns at the 5% level";
        if (!cfg.force) {
            throw std::runtime_error("stage unit_root: " + msg + "; rerun with --force to proceed");
        }
        r.warnings.push_back(msg + " (continuing because force is set)");
    }

    r.order_selection = detail::pipeline_stage("order_selection", [&] {
        return select_order_sbic_trace(std::span<const double>(r.returns.values), cfg.q_max);
    });
    const int q = r.order_selection.order;

    r.ar_fit = detail::pipeline_stage("ar_fit", [&] { return fit_ar_ols(r.returns, q); });
    r.constancy = detail::pipeline_stage("constancy", [&] { return hansen_lc(r.ar_fit, true); });

    r.smoothing = detail::pipeline_stage("smoothing", [&] {
        if (cfg.delta2_auto) return select_smoothing(r.returns, q);
        SmoothingChoice fixed;
        fixed.config.variance_ratio = cfg.delta2_fixed;
        fixed.config.selection = SmoothingSelection::Fixed;
        return fixed;
    });

    r.tvar = detail::pipeline_stage("tvar", [&] {
        if (cfg.backend == Backend::Kalman) {
            return estimate_tvar_kalman(r.returns, q, r.smoothing.config);
        }
        TVARPath stacked = estimate_tvar_stacked(r.returns, q, r.smoothing.config);
        if (cfg.backend == Backend::Both) {
            const TVARPath kalman = estimate_tvar_kalman(r.returns, q, r.smoothing.config);
            double div = (stacked.coeff_paths - kalman.coeff_paths).cwiseAbs().maxCoeff();
            div = std::max(div, std::abs(stacked.alpha0 - kalman.alpha0));
            r.backend_divergence = div;
            if (!(div <= 1e-6)) {
                throw std::runtime_error("backend divergence " + detail::fmt12(div) +
                                         " exceeds 1e-6");
            }
        }
        return stacked;
    });

    r.surface = detail::pipeline_stage("impulse_surface",
                                       [&] { return impulse_surface(r.tvar, cfg.horizons); });
    r.efficiency = detail::pipeline_stage("long_run_multipliers", [&] {
        return long_run_multipliers(r.tvar, std::vector<double>{cfg.level});
    });

    r.bootstrap = detail::pipeline_stage("bootstrap", [&] {
        return bootstrap_joint_zero_test(r.returns, q, r.tvar.config, cfg.boot_reps, cfg.seed);
    });

    const std::string lo = r.returns.dates.front();
    const std::string hi = r.returns.dates.back();
    for (const Event& e : events.events) {
        const bool in_range = e.end.empty() ? (e.start >= lo && e.start <= hi)
                                            : (e.start <= hi && e.end >= lo);
        if (in_range) r.overlay.push_back(e);
    }

    r.report = emit_report(r);

    detail::pipeline_stage("write_outputs", [&] {
        namespace fs = std::filesystem;
        const fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        detail::write_text_file(dir / "report.json", r.report.dump(2) + "\n");
        detail::write_text_file(dir / "descriptive.csv", detail::render_descriptive_csv(r.stats));
        detail::write_text_file(dir / "tvar_coefficients.csv", detail::render_tvar_csv(r.tvar));
        detail::write_text_file(dir / "impulse_surface.csv", detail::render_impulse_csv(r.surface));
        detail::write_text_file(dir / "efficiency.csv",
                                detail::render_efficiency_csv(r.efficiency, cfg.level));
        return 0;
    });

    return r;
}

}  // namespace tvme
