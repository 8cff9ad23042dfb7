#pragma once

// JSON forms of the configuration types, and the experiment file format
// consumed by the command-line front end.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "esr/corrupt.hpp"
#include "esr/dist.hpp"
#include "esr/error.hpp"
#include "esr/estim.hpp"

namespace esr::io {

using json = nlohmann::json;

namespace detail {

inline double number(const json& obj, const char* field) {
    const auto it = obj.find(field);
    if (it == obj.end()) throw InvalidParameter(field, "missing");
    if (!it->is_number()) throw InvalidParameter(field, "must be a number");
    return it->get<double>();
}

inline double number_or(const json& obj, const char* field, double fallback) {
    return obj.contains(field) ? number(obj, field) : fallback;
}

/// Integers arrive signed or unsigned depending on how the JSON was built.
inline std::optional<std::uint64_t> as_count(const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    return std::nullopt;
}

inline std::uint64_t count_or(const json& obj, const char* field, std::uint64_t fallback) {
    const auto it = obj.find(field);
    if (it == obj.end()) return fallback;
    if (const auto v = as_count(*it)) return *v;
    throw InvalidParameter(field, "must be a non-negative integer");
}

inline std::string text(const json& obj, const char* field) {
    const auto it = obj.find(field);
    if (it == obj.end()) throw InvalidParameter(field, "missing");
    if (!it->is_string()) throw InvalidParameter(field, "must be a string");
    return it->get<std::string>();
}

inline void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw InvalidParameter(what, "must be a JSON object");
}

/// Reads exactly the named parameters; anything else is rejected.
inline std::map<std::string, double> params(const json& j, std::initializer_list<const char*> names) {
    require_object(j, "params");
    std::map<std::string, double> out;
    for (const char* n : names) out[n] = number(j, n);
    for (const auto& [key, _] : j.items())
        if (!out.count(key)) throw InvalidParameter(key, "unknown parameter");
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Distributions: {"family": name, "params": {name: number}}

inline json to_json(const dist::DistributionSpec& spec) {
    struct V {
        json operator()(const dist::Normal& d) const { return {{"mu", d.mu}, {"sigma", d.sigma}}; }
        json operator()(const dist::StudentT& d) const { return {{"nu", d.nu}}; }
        json operator()(const dist::Logistic& d) const { return {{"location", d.location}, {"scale", d.scale}}; }
        json operator()(const dist::Lognormal& d) const { return {{"mu", d.mu}, {"sigma", d.sigma}}; }
        json operator()(const dist::Pareto& d) const { return {{"x0", d.x0}, {"lambda", d.lambda}}; }
        json operator()(const dist::Exponential& d) const { return {{"rate", d.rate}}; }
        json operator()(const dist::ScaledBernoulli& d) const { return {{"p", d.p}, {"x", d.x}}; }
        json operator()(const dist::AtomMix& d) const { return {{"x0", d.x0}, {"alpha", d.alpha}, {"delta", d.delta}}; }
    };
    return {{"family", dist::family_name(spec)}, {"params", std::visit(V{}, spec)}};
}

inline dist::DistributionSpec distribution_from_json(const json& j) {
    detail::require_object(j, "distribution");
    const std::string family = detail::text(j, "family");
    const json p = j.value("params", json::object());
    dist::DistributionSpec spec;
    if (family == "normal") {
        auto v = detail::params(p, {"mu", "sigma"});
        spec = dist::Normal{v["mu"], v["sigma"]};
    } else if (family == "student_t") {
        spec = dist::StudentT{detail::params(p, {"nu"})["nu"]};
    } else if (family == "logistic") {
        auto v = detail::params(p, {"location", "scale"});
        spec = dist::Logistic{v["location"], v["scale"]};
    } else if (family == "lognormal") {
        auto v = detail::params(p, {"mu", "sigma"});
        spec = dist::Lognormal{v["mu"], v["sigma"]};
    } else if (family == "pareto") {
        auto v = detail::params(p, {"x0", "lambda"});
        spec = dist::Pareto{v["x0"], v["lambda"]};
    } else if (family == "exponential") {
        spec = dist::Exponential{detail::params(p, {"rate"})["rate"]};
    } else if (family == "scaled_bernoulli") {
        auto v = detail::params(p, {"p", "x"});
        spec = dist::ScaledBernoulli{v["p"], v["x"]};
    } else if (family == "atom_mix") {
        auto v = detail::params(p, {"x0", "alpha", "delta"});
        spec = dist::AtomMix{v["x0"], v["alpha"], v["delta"]};
    } else {
        throw InvalidParameter("family", "unknown family '" + family + "'");
    }
    dist::validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Processes: {"kind": "iid", "distribution": {...}} or {"kind": "ar1", "rho": r}

inline json to_json(const dist::ProcessSpec& process) {
    if (const auto* iid = std::get_if<dist::IID>(&process)) return {{"kind", "iid"}, {"distribution", to_json(iid->dist)}};
    return {{"kind", "ar1"}, {"rho", std::get<dist::AR1>(process).rho}};
}

inline dist::ProcessSpec process_from_json(const json& j) {
    detail::require_object(j, "process");
    const std::string kind = detail::text(j, "kind");
    dist::ProcessSpec out;
    if (kind == "iid") {
        if (!j.contains("distribution")) throw InvalidParameter("distribution", "missing");
        out = dist::IID{distribution_from_json(j.at("distribution"))};
    } else if (kind == "ar1") {
        out = dist::AR1{detail::number(j, "rho")};
    } else {
        throw InvalidParameter("kind", "unknown process '" + kind + "'");
    }
    dist::validate(out);
    return out;
}

// ---------------------------------------------------------------------------
// Estimators: {"kind", "m", "beta1", "beta2", "gap", "trim_c", "trim_exp"}

inline json to_json(const estim::EstimatorConfig& cfg) {
    json j = {{"kind", estim::kind_name(cfg)}};
    if (const auto* t = std::get_if<estim::Truncated>(&cfg)) {
        j["m"] = t->m;
        j["beta1"] = t->beta1;
        j["beta2"] = t->beta2;
        j["gap"] = t->gap;
    } else if (const auto* b = std::get_if<estim::MedianOfBlocks>(&cfg)) {
        j["m"] = b->m;
        j["gap"] = b->gap;
    } else if (const auto* tr = std::get_if<estim::Trimmed>(&cfg)) {
        j["trim_c"] = tr->c;
        j["trim_exp"] = tr->exponent;
    }
    return j;
}

inline estim::EstimatorConfig estimator_from_json(const json& j) {
    detail::require_object(j, "estimator");
    const std::string kind = detail::text(j, "kind");
    estim::EstimatorConfig cfg;
    if (kind == "plugin") {
        cfg = estim::PlugIn{};
    } else if (kind == "truncated") {
        estim::Truncated t;
        t.m = detail::count_or(j, "m", t.m);
        t.beta1 = detail::number_or(j, "beta1", t.beta1);
        t.beta2 = detail::number_or(j, "beta2", t.beta2);
        t.gap = detail::count_or(j, "gap", t.gap);
        cfg = t;
    } else if (kind == "median_of_blocks") {
        estim::MedianOfBlocks b;
        b.m = detail::count_or(j, "m", b.m);
        b.gap = detail::count_or(j, "gap", b.gap);
        cfg = b;
    } else if (kind == "trimmed") {
        estim::Trimmed t;
        t.c = detail::number_or(j, "trim_c", t.c);
        t.exponent = detail::number_or(j, "trim_exp", t.exponent);
        cfg = t;
    } else {
        throw InvalidParameter("kind", "unknown estimator '" + kind + "'");
    }
    estim::validate(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Corruption: {"kind", "k", "mu", "sigma", "value", "indices"}

inline json to_json(const corrupt::CorruptionModel& model) {
    struct V {
        json operator()(const corrupt::None&) const { return {{"kind", "none"}}; }
        json operator()(const corrupt::MaxShiftGaussian& g) const {
            return {{"kind", "max_shift_gaussian"}, {"k", g.k}, {"mu", g.mu}, {"sigma", g.sigma}};
        }
        json operator()(const corrupt::ReplaceLargest& r) const {
            return {{"kind", "replace_largest"}, {"k", r.k}, {"value", r.value}};
        }
        json operator()(const corrupt::ReplaceIndices& r) const {
            return {{"kind", "replace_indices"}, {"indices", r.indices}, {"value", r.value}};
        }
    };
    return std::visit(V{}, model);
}

inline corrupt::CorruptionModel corruption_from_json(const json& j) {
    detail::require_object(j, "corruption");
    const std::string kind = detail::text(j, "kind");
    corrupt::CorruptionModel model;
    if (kind == "none") {
        model = corrupt::None{};
    } else if (kind == "max_shift_gaussian") {
        corrupt::MaxShiftGaussian g;
        g.k = detail::count_or(j, "k", g.k);
        g.mu = detail::number_or(j, "mu", g.mu);
        g.sigma = detail::number_or(j, "sigma", g.sigma);
        model = g;
    } else if (kind == "replace_largest") {
        corrupt::ReplaceLargest r;
        r.k = detail::count_or(j, "k", r.k);
        r.value = detail::number(j, "value");
        model = r;
    } else if (kind == "replace_indices") {
        corrupt::ReplaceIndices r;
        const auto it = j.find("indices");
        if (it == j.end() || !it->is_array()) throw InvalidParameter("indices", "must be an array of positions");
        for (const auto& v : *it) {
            const auto pos = detail::as_count(v);
            if (!pos) throw InvalidParameter("indices", "positions must be non-negative integers");
            r.indices.push_back(*pos);
        }
        r.value = detail::number(j, "value");
        model = r;
    } else {
        throw InvalidParameter("kind", "unknown corruption '" + kind + "'");
    }
    corrupt::validate(model);
    return model;
}

// ---------------------------------------------------------------------------
// Experiment files

struct LongRunSpec {
    std::size_t block_size = 10000;
    std::size_t blocks = 500;
    std::uint64_t seed = 0;
};

struct RunConfig {
    std::string name = "experiment";
    dist::ProcessSpec process = dist::IID{dist::Pareto{1.0, 2.2}};
    double alpha = 0.1;
    std::vector<estim::EstimatorConfig> estimators;
    std::vector<std::size_t> sample_sizes;
    std::vector<double> deltas{1.0};
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    corrupt::CorruptionModel corruption = corrupt::None{};
    std::optional<double> truth; // defaults to the exact ES of the marginal
    std::size_t bins = 50;
    std::optional<std::size_t> histogram_n; // defaults to the largest sample size
    std::optional<LongRunSpec> longrun;
    unsigned workers = 0;
    bool svg = false;
};

inline json to_json(const RunConfig& c) {
    json j;
    j["version"] = 1;
    j["name"] = c.name;
    j["process"] = to_json(c.process);
    j["alpha"] = c.alpha;
    j["estimators"] = json::array();
    for (const auto& e : c.estimators) j["estimators"].push_back(to_json(e));
    j["sample_sizes"] = c.sample_sizes;
    j["delta"] = c.deltas;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["corruption"] = to_json(c.corruption);
    if (c.truth) j["truth"] = *c.truth;
    j["bins"] = c.bins;
    if (c.histogram_n) j["histogram_n"] = *c.histogram_n;
    if (c.longrun)
        j["longrun"] = {{"block_size", c.longrun->block_size}, {"blocks", c.longrun->blocks}, {"seed", c.longrun->seed}};
    j["workers"] = c.workers;
    j["svg"] = c.svg;
    return j;
}

inline RunConfig run_config_from_json(const json& j) {
    detail::require_object(j, "config");
    if (detail::count_or(j, "version", 0) != 1) throw InvalidParameter("version", "must be 1");
    RunConfig c;
    if (j.contains("name")) c.name = detail::text(j, "name");
    if (!j.contains("process")) throw InvalidParameter("process", "missing");
    c.process = process_from_json(j.at("process"));
    c.alpha = detail::number(j, "alpha");
    (void)RiskLevel(c.alpha);

    const auto est = j.find("estimators");
    if (est == j.end() || !est->is_array() || est->empty())
        throw InvalidParameter("estimators", "must be a non-empty array");
    for (const auto& e : *est) c.estimators.push_back(estimator_from_json(e));

    const auto ns = j.find("sample_sizes");
    if (ns == j.end() || !ns->is_array() || ns->empty())
        throw InvalidParameter("sample_sizes", "must be a non-empty array");
    for (const auto& v : *ns) {
        const auto n = detail::as_count(v);
        if (!n || *n < 1) throw InvalidParameter("sample_sizes", "entries must be positive integers");
        c.sample_sizes.push_back(*n);
    }

    if (const auto d = j.find("delta"); d != j.end()) {
        c.deltas.clear();
        if (d->is_number()) {
            c.deltas.push_back(d->get<double>());
        } else if (d->is_array() && !d->empty()) {
            for (const auto& v : *d) {
                if (!v.is_number()) throw InvalidParameter("delta", "entries must be numbers");
                c.deltas.push_back(v.get<double>());
            }
        } else {
            throw InvalidParameter("delta", "must be a number or a non-empty array");
        }
        for (double v : c.deltas)
            if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("delta", "must be finite and positive");
    }

    c.trials = detail::count_or(j, "trials", c.trials);
    if (c.trials < 1) throw InvalidParameter("trials", "must be >= 1");
    c.seed = detail::count_or(j, "seed", c.seed);
    if (j.contains("corruption")) c.corruption = corruption_from_json(j.at("corruption"));
    if (j.contains("truth")) c.truth = detail::number(j, "truth");
    c.bins = detail::count_or(j, "bins", c.bins);
    if (c.bins < 1) throw InvalidParameter("bins", "must be >= 1");
    if (j.contains("histogram_n")) c.histogram_n = detail::count_or(j, "histogram_n", 0);
    if (const auto lr = j.find("longrun"); lr != j.end()) {
        detail::require_object(*lr, "longrun");
        LongRunSpec s;
        s.block_size = detail::count_or(*lr, "block_size", s.block_size);
        s.blocks = detail::count_or(*lr, "blocks", s.blocks);
        s.seed = detail::count_or(*lr, "seed", s.seed);
        c.longrun = s;
    }
    c.workers = static_cast<unsigned>(detail::count_or(j, "workers", 0));
    if (const auto s = j.find("svg"); s != j.end()) {
        if (!s->is_boolean()) throw InvalidParameter("svg", "must be true or false");
        c.svg = s->get<bool>();
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("config", "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidParameter("config", path + ": " + e.what());
    }
    return run_config_from_json(j);
}

/// 64-bit FNV-1a over the canonical (sorted-key, compact) form of the
/// normalized config, rendered as 16 hex digits.
inline std::string spec_hash(const RunConfig& c) {
    const std::string canonical = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

} // namespace esr::io
