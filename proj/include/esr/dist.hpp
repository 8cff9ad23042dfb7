#pragma once

// Loss-distribution catalog and the stationary AR(1) process.
//
// Every family exposes cdf, survival (1 - cdf, computed directly for tail
// accuracy), the generalized inverse quantile(u) = inf{t : F(t) >= u}, its
// upper-tail form upper_quantile(v) = quantile(1 - v), and the density where
// one exists. Sampling is inverse-transform from the counter-based stream in
// rng.hpp, so identical (spec, n, seed) triples give identical draws.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "esr/error.hpp"
#include "esr/rng.hpp"
#include "esr/special.hpp"

namespace esr::dist {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(field, "must be a finite positive number");
}

inline void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw InvalidParameter(field, "must be finite");
}

inline void require_probability(double v, const char* field) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter(field, "must lie in [0, 1]");
}

inline void check_level(double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("u", "quantile level must lie in [0, 1]");
}

} // namespace detail

struct Normal {
    double mu = 0.0;
    double sigma = 1.0;

    static constexpr std::string_view name = "normal";
    void validate() const {
        detail::require_finite(mu, "mu");
        detail::require_positive(sigma, "sigma");
    }
    double cdf(double t) const { return special::normal_cdf((t - mu) / sigma); }
    double sf(double t) const { return special::normal_sf((t - mu) / sigma); }
    double quantile(double u) const {
        if (u == 0.0) throw UndefinedQuantile(std::string(name));
        return mu + sigma * special::normal_quantile(u);
    }
    double upper_quantile(double v) const { return mu + sigma * special::normal_upper_quantile(v); }
    double density(double t) const { return special::normal_pdf((t - mu) / sigma) / sigma; }
};

/// Location 0, scale 1; only the degrees of freedom vary.
struct StudentT {
    double nu = 5.0;

    static constexpr std::string_view name = "student_t";
    void validate() const { detail::require_positive(nu, "nu"); }
    double cdf(double t) const { return special::student_t_cdf(t, nu); }
    double sf(double t) const { return special::student_t_sf(t, nu); }
    double quantile(double u) const {
        if (u == 0.0) throw UndefinedQuantile(std::string(name));
        return special::student_t_quantile(u, nu);
    }
    double upper_quantile(double v) const {
        if (v <= 0.0) return kInf;
        if (v >= 1.0) return -kInf;
        if (v == 0.5) return 0.0;
        return v < 0.5 ? special::student_t_upper_tail_root(v, nu) : -special::student_t_upper_tail_root(1.0 - v, nu);
    }
    double density(double t) const { return special::student_t_pdf(t, nu); }
};

struct Logistic {
    double location = 0.0;
    double scale = 1.0;

    static constexpr std::string_view name = "logistic";
    void validate() const {
        detail::require_finite(location, "location");
        detail::require_positive(scale, "scale");
    }
    double cdf(double t) const { return 1.0 / (1.0 + std::exp(-(t - location) / scale)); }
    double sf(double t) const { return 1.0 / (1.0 + std::exp((t - location) / scale)); }
    double quantile(double u) const {
        if (u == 0.0) throw UndefinedQuantile(std::string(name));
        return location + scale * (std::log(u) - std::log1p(-u));
    }
    double upper_quantile(double v) const { return location + scale * (std::log1p(-v) - std::log(v)); }
    double density(double t) const {
        const double z = std::exp(-std::fabs(t - location) / scale);
        return z / (scale * (1.0 + z) * (1.0 + z));
    }
};

struct Lognormal {
    double mu = 0.0;
    double sigma = 1.0;

    static constexpr std::string_view name = "lognormal";
    void validate() const {
        detail::require_finite(mu, "mu");
        detail::require_positive(sigma, "sigma");
    }
    double cdf(double t) const { return t <= 0.0 ? 0.0 : special::normal_cdf((std::log(t) - mu) / sigma); }
    double sf(double t) const { return t <= 0.0 ? 1.0 : special::normal_sf((std::log(t) - mu) / sigma); }
    double quantile(double u) const {
        if (u == 0.0) return 0.0;
        return std::exp(mu + sigma * special::normal_quantile(u));
    }
    double upper_quantile(double v) const {
        if (v >= 1.0) return 0.0;
        return std::exp(mu + sigma * special::normal_upper_quantile(v));
    }
    double density(double t) const {
        if (t <= 0.0) return 0.0;
        return special::normal_pdf((std::log(t) - mu) / sigma) / (sigma * t);
    }
};

/// Support [x0, inf), P(X > t) = (x0 / t)^lambda.
struct Pareto {
    double x0 = 1.0;
    double lambda = 2.0;

    static constexpr std::string_view name = "pareto";
    void validate() const {
        detail::require_positive(x0, "x0");
        detail::require_positive(lambda, "lambda");
    }
    double cdf(double t) const { return t < x0 ? 0.0 : 1.0 - std::pow(x0 / t, lambda); }
    double sf(double t) const { return t < x0 ? 1.0 : std::pow(x0 / t, lambda); }
    double quantile(double u) const { return upper_quantile(1.0 - u); }
    double upper_quantile(double v) const {
        if (v >= 1.0) return x0;
        return x0 * std::pow(v, -1.0 / lambda);
    }
    double density(double t) const { return t < x0 ? 0.0 : lambda * std::pow(x0, lambda) * std::pow(t, -lambda - 1.0); }
};

struct Exponential {
    double rate = 1.0;

    static constexpr std::string_view name = "exponential";
    void validate() const { detail::require_positive(rate, "rate"); }
    double cdf(double t) const { return t <= 0.0 ? 0.0 : -std::expm1(-rate * t); }
    double sf(double t) const { return t <= 0.0 ? 1.0 : std::exp(-rate * t); }
    double quantile(double u) const { return -std::log1p(-u) / rate; }
    double upper_quantile(double v) const {
        if (v >= 1.0) return 0.0;
        return -std::log(v) / rate;
    }
    double density(double t) const { return t < 0.0 ? 0.0 : rate * std::exp(-rate * t); }
};

/// P(X = 0) = 1 - p, P(X = x) = p.
struct ScaledBernoulli {
    double p = 0.5;
    double x = 1.0;

    static constexpr std::string_view name = "scaled_bernoulli";
    void validate() const {
        detail::require_probability(p, "p");
        detail::require_positive(x, "x");
    }
    double cdf(double t) const { return t < 0.0 ? 0.0 : (t < x ? 1.0 - p : 1.0); }
    double sf(double t) const { return t < 0.0 ? 1.0 : (t < x ? p : 0.0); }
    double quantile(double u) const {
        if (u == 0.0) throw UndefinedQuantile(std::string(name));
        return u <= 1.0 - p ? 0.0 : x;
    }
    // u <= 1 - p  <=>  v >= p, compared in v to avoid rounding 1 - v.
    double upper_quantile(double v) const {
        if (v >= 1.0) throw UndefinedQuantile(std::string(name));
        return v >= p ? 0.0 : x;
    }
    double density(double) const { throw NoDensity(std::string(name)); }
};

/// Mass 1 - alpha - delta at x0 < 0, mass alpha at 0, and uniform density
/// delta / |x0| on (x0, 0). Its quantile function is |x0|/delta-Lipschitz.
struct AtomMix {
    double x0 = -0.1;
    double alpha = 0.1;
    double delta = 0.02;

    static constexpr std::string_view name = "atom_mix";
    void validate() const {
        if (!(x0 < 0.0) || !std::isfinite(x0)) throw InvalidParameter("x0", "must be a finite negative number");
        detail::require_probability(alpha, "alpha");
        detail::require_probability(delta, "delta");
        if (!(alpha + delta < 1.0)) throw InvalidParameter("delta", "alpha + delta must be < 1");
    }
    double atom_mass() const { return 1.0 - alpha - delta; }
    double cdf(double t) const {
        if (t < x0) return 0.0;
        if (t < 0.0) return atom_mass() + delta * (t - x0) / -x0;
        return 1.0;
    }
    double sf(double t) const {
        if (t < x0) return 1.0;
        if (t < 0.0) return alpha + delta * (0.0 - t) / -x0;
        return 0.0;
    }
    double quantile(double u) const {
        if (u == 0.0) throw UndefinedQuantile(std::string(name));
        return upper_quantile(1.0 - u);
    }
    double upper_quantile(double v) const {
        if (v >= 1.0) throw UndefinedQuantile(std::string(name));
        if (v >= alpha + delta) return x0;
        if (v >= alpha) return x0 + (-x0) * (alpha + delta - v) / delta;
        return 0.0;
    }
    double density(double t) const {
        if ((t == x0 && atom_mass() > 0.0) || (t == 0.0 && alpha > 0.0)) throw NoDensity(std::string(name));
        return (t > x0 && t < 0.0) ? delta / -x0 : 0.0;
    }
};

using DistributionSpec =
    std::variant<Normal, StudentT, Logistic, Lognormal, Pareto, Exponential, ScaledBernoulli, AtomMix>;

inline std::string family_name(const DistributionSpec& spec) {
    return std::visit([](const auto& d) { return std::string(d.name); }, spec);
}

inline void validate(const DistributionSpec& spec) {
    std::visit([](const auto& d) { d.validate(); }, spec);
}

/// True for the families whose law has no atoms.
inline bool is_continuous(const DistributionSpec& spec) {
    return !std::holds_alternative<ScaledBernoulli>(spec) && !std::holds_alternative<AtomMix>(spec);
}

/// Points where the CDF jumps.
inline std::vector<double> atoms(const DistributionSpec& spec) {
    if (const auto* b = std::get_if<ScaledBernoulli>(&spec)) return {0.0, b->x};
    if (const auto* m = std::get_if<AtomMix>(&spec)) return {m->x0, 0.0};
    return {};
}

inline double cdf(const DistributionSpec& spec, double t) {
    return std::visit([t](const auto& d) { return d.cdf(t); }, spec);
}

/// P(X > t).
inline double survival(const DistributionSpec& spec, double t) {
    return std::visit([t](const auto& d) { return d.sf(t); }, spec);
}

/// inf{t : F(t) >= u}. At u = 0 families bounded below return the support
/// infimum; unbounded or atomic families throw UndefinedQuantile.
inline double quantile(const DistributionSpec& spec, double u) {
    detail::check_level(u);
    return std::visit([u](const auto& d) { return d.quantile(u); }, spec);
}

/// quantile(1 - v), evaluated without forming 1 - v where that loses digits.
inline double upper_quantile(const DistributionSpec& spec, double v) {
    detail::check_level(v);
    return std::visit([v](const auto& d) { return d.upper_quantile(v); }, spec);
}

inline double density(const DistributionSpec& spec, double t) {
    return std::visit([t](const auto& d) { return d.density(t); }, spec);
}

inline void sample_into(const DistributionSpec& spec, std::span<double> out, std::uint64_t seed) {
    std::visit(
        [&](const auto& d) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double u = rng::uniform(seed, i);
                // 1 - u is exact on the 52-bit grid.
                out[i] = d.upper_quantile(1.0 - u);
            }
        },
        spec);
}

inline std::vector<double> sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("n", "must be >= 1");
    validate(spec);
    std::vector<double> out(n);
    sample_into(spec, out, seed);
    return out;
}

// ---------------------------------------------------------------------------
// Processes

struct IID {
    DistributionSpec dist;
};

/// X_t = rho X_{t-1} + sqrt(1 - rho^2) Z_t with standard normal innovations,
/// started from the stationary N(0, 1) marginal.
struct AR1 {
    double rho = 0.0;
};

using ProcessSpec = std::variant<IID, AR1>;

inline void validate(const ProcessSpec& process) {
    if (const auto* iid = std::get_if<IID>(&process)) {
        validate(iid->dist);
    } else {
        const double rho = std::get<AR1>(process).rho;
        if (!(std::fabs(rho) < 1.0)) throw InvalidParameter("rho", "|rho| must be < 1");
    }
}

/// Stationary one-dimensional marginal law.
inline DistributionSpec marginal(const ProcessSpec& process) {
    if (const auto* iid = std::get_if<IID>(&process)) return iid->dist;
    return Normal{0.0, 1.0};
}

inline void ar1_path_into(double rho, std::span<double> out, std::uint64_t seed) {
    if (out.empty()) return;
    const double innovation_scale = std::sqrt(1.0 - rho * rho);
    double x = special::normal_quantile(rng::uniform(seed, 0));
    out[0] = x;
    for (std::size_t i = 1; i < out.size(); ++i) {
        x = rho * x + innovation_scale * special::normal_quantile(rng::uniform(seed, i));
        out[i] = x;
    }
}

inline std::vector<double> ar1_path(double rho, std::size_t n, std::uint64_t seed) {
    if (!(std::fabs(rho) < 1.0)) throw InvalidParameter("rho", "|rho| must be < 1");
    if (n < 1) throw InvalidParameter("n", "must be >= 1");
    std::vector<double> out(n);
    ar1_path_into(rho, out, seed);
    return out;
}

/// Fills `out` with one path (IID draws or an AR(1) stretch).
inline void draw_into(const ProcessSpec& process, std::span<double> out, std::uint64_t seed) {
    if (const auto* iid = std::get_if<IID>(&process))
        sample_into(iid->dist, out, seed);
    else
        ar1_path_into(std::get<AR1>(process).rho, out, seed);
}

} // namespace esr::dist
