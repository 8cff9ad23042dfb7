#pragma once

// Commands behind the `esr` executable. Each command reads its inputs,
// writes CSV (and optionally SVG) into an output directory, and prints a
// short summary; errors surface as esr::Error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "esr/functionals.hpp"
#include "esr/io.hpp"
#include "esr/mc.hpp"
#include "esr/report.hpp"

namespace esr::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// estimate

/// One real per line; blank lines are skipped.
inline std::vector<double> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("data", "cannot open '" + path + "'");
    std::vector<double> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(first, last - first + 1);
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
            throw InvalidParameter("data", path + " line " + std::to_string(lineno) + ": '" + tok + "' is not a finite number");
        out.push_back(v);
    }
    if (out.empty()) throw PreconditionError(path + ": no data");
    return out;
}

/// Prints the estimate; for the truncated estimator also the clamp interval.
inline void cmd_estimate(std::span<const double> data, double alpha, const estim::EstimatorConfig& cfg, std::ostream& out,
                         std::ostream& warn) {
    const RiskLevel level(alpha);
    estim::validate(cfg);
    for (const auto& w : estim::config_warnings(cfg)) warn << "warning: " << w << '\n';
    estim::Workspace ws;
    const auto e = estim::estimate(cfg, data, level, ws);
    out << "estimate " << report::fmt(e.value) << '\n';
    if (e.has_interval) out << "lower " << report::fmt(e.lower) << '\n' << "upper " << report::fmt(e.upper) << '\n';
}

// ---------------------------------------------------------------------------
// table1

inline std::string cmd_table1(const std::vector<double>& alphas, const std::string& out_dir) {
    const std::string csv = report::table1_csv(functionals::table1_rows(alphas));
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        report::write_file((fs::path(out_dir) / "table1.csv").string(), csv);
    }
    return csv;
}

// ---------------------------------------------------------------------------
// Config-driven experiments

inline double resolve_truth(const io::RunConfig& c) {
    if (c.truth) return *c.truth;
    const auto m = dist::marginal(c.process);
    if (functionals::detail::es_is_infinite(m)) throw InfiniteValue("expected shortfall; set \"truth\" explicitly");
    return functionals::es_exact(m, RiskLevel(c.alpha));
}

inline mc::ExperimentSpec experiment_of(const io::RunConfig& c) {
    mc::ExperimentSpec s;
    s.process = c.process;
    s.estimator = c.estimators.front();
    s.alpha = c.alpha;
    s.sample_sizes = c.sample_sizes;
    s.delta = c.deltas.front();
    s.trials = c.trials;
    s.master_seed = c.seed;
    s.corruption = c.corruption;
    s.truth = resolve_truth(c);
    mc::validate(s);
    return s;
}

/// File-name stems per estimator: the kind, suffixed when a kind repeats.
inline std::vector<std::string> estimator_labels(const std::vector<estim::EstimatorConfig>& estimators) {
    std::map<std::string, int> seen;
    std::vector<std::string> out;
    for (const auto& e : estimators) {
        const std::string k = estim::kind_name(e);
        const int n = ++seen[k];
        out.push_back(n == 1 ? k : k + "_" + std::to_string(n));
    }
    return out;
}

inline void write_metadata(const io::RunConfig& c, const std::string& command, const std::string& out_dir) {
    io::json meta = {{"command", command},
                     {"name", c.name},
                     {"seed", c.seed},
                     {"spec_hash", io::spec_hash(c)},
                     {"trials", c.trials},
                     {"config", io::to_json(c)}};
    report::write_file((fs::path(out_dir) / "metadata.json").string(), meta.dump(2) + "\n");
}

struct CurveOutput {
    std::vector<std::string> labels;
    std::vector<double> deltas;
    std::vector<std::vector<mc::DeviationCurve>> curves; // [estimator][delta]
};

inline CurveOutput run_curves(const io::RunConfig& c, unsigned workers) {
    const auto spec = experiment_of(c);
    CurveOutput out{estimator_labels(c.estimators), c.deltas, {}};
    out.curves = mc::deviation_curves(spec, c.estimators, c.deltas, workers);
    return out;
}

inline CurveOutput cmd_curve(const io::RunConfig& c, const std::string& out_dir, unsigned workers, bool svg,
                             std::ostream& log) {
    const auto res = run_curves(c, workers);
    fs::create_directories(out_dir);
    const bool many = res.deltas.size() > 1;
    for (std::size_t k = 0; k < res.deltas.size(); ++k) {
        const std::string suffix = many ? "_delta" + report::fmt(res.deltas[k]) : "";
        std::vector<report::Series> series;
        for (std::size_t e = 0; e < res.labels.size(); ++e) {
            const std::string path = (fs::path(out_dir) / ("curve_" + res.labels[e] + suffix + ".csv")).string();
            report::write_file(path, report::curve_csv(res.curves[e][k]));
            log << "wrote " << path << '\n';
            series.push_back({res.labels[e], res.curves[e][k]});
        }
        if (svg) {
            const std::string path = (fs::path(out_dir) / ("curve" + suffix + ".svg")).string();
            report::write_file(path, report::curves_svg(c.name + " (delta=" + report::fmt(res.deltas[k]) + ")", series));
        }
    }
    write_metadata(c, "curve", out_dir);
    return res;
}

inline std::size_t histogram_size(const io::RunConfig& c) {
    return c.histogram_n.value_or(c.sample_sizes.back());
}

inline std::vector<mc::HistogramResult> cmd_hist(const io::RunConfig& c, const std::string& out_dir, unsigned workers,
                                                 bool svg, std::ostream& log) {
    const auto spec = experiment_of(c);
    const std::size_t n = histogram_size(c);
    const auto det = mc::run_trials_detail(spec, c.estimators, n, workers);
    const auto labels = estimator_labels(c.estimators);
    fs::create_directories(out_dir);
    std::vector<mc::HistogramResult> out;
    for (std::size_t e = 0; e < labels.size(); ++e) {
        std::vector<double> v(det[e].size());
        std::transform(det[e].begin(), det[e].end(), v.begin(), [](const auto& x) { return x.value; });
        auto h = mc::histogram(v, c.bins);
        const std::string path = (fs::path(out_dir) / ("hist_" + labels[e] + ".csv")).string();
        report::write_file(path, report::histogram_csv(h));
        if (svg)
            report::write_file((fs::path(out_dir) / ("hist_" + labels[e] + ".svg")).string(),
                               report::histogram_svg(c.name + ": " + labels[e] + ", N=" + std::to_string(n), h));
        log << labels[e] << ": min " << report::fmt(h.min) << ", max " << report::fmt(h.max) << '\n';
        out.push_back(std::move(h));
    }
    write_metadata(c, "hist", out_dir);
    return out;
}

struct CorruptDemoRow {
    std::string label;
    mc::HistogramResult clean;
    mc::HistogramResult corrupted;
    double tv = 0.0;
    std::size_t clamp_violations = 0; // estimates outside their own clamp interval
};

inline std::vector<CorruptDemoRow> run_corrupt_demo(const io::RunConfig& c, unsigned workers) {
    auto spec = experiment_of(c);
    const std::size_t n = histogram_size(c);
    const auto dirty = mc::run_trials_detail(spec, c.estimators, n, workers);
    spec.corruption = corrupt::None{};
    const auto clean = mc::run_trials_detail(spec, c.estimators, n, workers);
    const auto labels = estimator_labels(c.estimators);

    std::vector<CorruptDemoRow> rows;
    for (std::size_t e = 0; e < labels.size(); ++e) {
        std::vector<double> a(clean[e].size()), b(dirty[e].size());
        std::transform(clean[e].begin(), clean[e].end(), a.begin(), [](const auto& x) { return x.value; });
        std::transform(dirty[e].begin(), dirty[e].end(), b.begin(), [](const auto& x) { return x.value; });
        double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
        double hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
        if (!(lo < hi)) lo -= 0.5, hi += 0.5;
        CorruptDemoRow row{labels[e], mc::histogram_range(a, c.bins, lo, hi), mc::histogram_range(b, c.bins, lo, hi)};
        row.tv = mc::total_variation(row.clean, row.corrupted);
        for (const auto* set : {&clean[e], &dirty[e]})
            for (const auto& x : *set)
                if (x.has_interval && (x.value < x.lower || x.value > x.upper)) ++row.clamp_violations;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<CorruptDemoRow> cmd_corrupt_demo(const io::RunConfig& c, const std::string& out_dir, unsigned workers,
                                                    bool svg, std::ostream& log) {
    const auto rows = run_corrupt_demo(c, workers);
    fs::create_directories(out_dir);
    std::string summary = "estimator,tv,clamp_violations\n";
    for (const auto& r : rows) {
        for (const auto& [tag, h] : {std::pair{"clean", &r.clean}, std::pair{"corrupted", &r.corrupted}}) {
            const std::string stem = "hist_" + r.label + "_" + tag;
            report::write_file((fs::path(out_dir) / (stem + ".csv")).string(), report::histogram_csv(*h));
            if (svg)
                report::write_file((fs::path(out_dir) / (stem + ".svg")).string(),
                                   report::histogram_svg(c.name + ": " + r.label + " (" + tag + ")", *h));
        }
        summary += r.label + ',' + report::fmt(r.tv) + ',' + report::fmt(r.clamp_violations) + '\n';
        log << r.label << ": total variation " << report::fmt(r.tv) << ", clamp violations " << r.clamp_violations << '\n';
    }
    report::write_file((fs::path(out_dir) / "corrupt_summary.csv").string(), summary);
    write_metadata(c, "corrupt-demo", out_dir);
    return rows;
}

struct MixingOutput {
    struct Row {
        std::size_t n;
        std::string label;
        double median_abs_error;
    };
    std::vector<Row> rows;
    std::optional<mc::LongRunResult> longrun;
};

inline double median_abs_error(const std::vector<estim::Estimate>& est, double truth) {
    std::vector<double> err(est.size());
    std::transform(est.begin(), est.end(), err.begin(), [&](const auto& x) { return std::fabs(x.value - truth); });
    return estim::interp_quantile(err, 0.5);
}

inline MixingOutput run_mixing(const io::RunConfig& c, unsigned workers) {
    const auto spec = experiment_of(c);
    const auto labels = estimator_labels(c.estimators);
    MixingOutput out;
    for (std::size_t n : c.sample_sizes) {
        const auto det = mc::run_trials_detail(spec, c.estimators, n, workers);
        for (std::size_t e = 0; e < labels.size(); ++e) out.rows.push_back({n, labels[e], median_abs_error(det[e], spec.truth)});
    }
    if (c.longrun)
        out.longrun = mc::longrun_sigma_oracle(c.process, RiskLevel(c.alpha), c.longrun->block_size, c.longrun->blocks,
                                               c.longrun->seed);
    return out;
}

inline MixingOutput cmd_mixing(const io::RunConfig& c, const std::string& out_dir, unsigned workers, std::ostream& log) {
    const auto res = run_mixing(c, workers);
    fs::create_directories(out_dir);
    std::string csv = "N,estimator,median_abs_error\n";
    for (const auto& r : res.rows) {
        csv += report::fmt(r.n) + ',' + r.label + ',' + report::fmt(r.median_abs_error) + '\n';
        log << "N=" << r.n << ' ' << r.label << ": median |error| " << report::fmt(r.median_abs_error) << '\n';
    }
    report::write_file((fs::path(out_dir) / "mixing.csv").string(), csv);
    if (res.longrun) {
        report::write_file((fs::path(out_dir) / "longrun.csv").string(),
                           "sigma2,stderr\n" + report::fmt(res.longrun->value) + ',' + report::fmt(res.longrun->std_error) + '\n');
        log << "long-run variance " << report::fmt(res.longrun->value) << " (stderr " << report::fmt(res.longrun->std_error)
            << ")\n";
    }
    write_metadata(c, "mixing", out_dir);
    return res;
}

} // namespace esr::cli
