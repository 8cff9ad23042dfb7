#pragma once

// Population functionals: expected shortfall, the asymptotic variance of the
// plug-in estimator, and local Lipschitz constants of the quantile function.
//
//   ES_a(X)      = (1/a) int_{1-a}^1 VaR_u(X) du
//   sigma^2_ES   = (1/a^2) int int_{(1-a,1)^2} (min(u,v) - uv) / (f(F^-1(u)) f(F^-1(v))) du dv
//   D(a)         = 1 / f(F^-1(1 - a))
//   L(a)         = max_{b in [a/2, 2a]} D(b)

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "esr/dist.hpp"
#include "esr/error.hpp"
#include "esr/quadrature.hpp"
#include "esr/special.hpp"

namespace esr {

/// Tail level alpha in (0, 1/2).
class RiskLevel {
public:
    explicit RiskLevel(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidParameter("alpha", "must lie in (0, 1/2)");
    }
    double value() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// sigma^2_ES, or +inf when the positive part of X is not square integrable.
struct VarianceResult {
    double value = 0.0;
    double abs_error_bound = 0.0;

    bool is_infinite() const noexcept { return std::isinf(value); }
    double sd() const { return std::sqrt(value); }
};

namespace functionals {

inline constexpr double kDefaultEsTol = 1e-10;
inline constexpr double kDefaultSigmaRelTol = 1e-6;

namespace detail {

/// Tail index for the polynomially tailed families, 0 otherwise.
inline double tail_index(const dist::DistributionSpec& spec) {
    if (const auto* p = std::get_if<dist::Pareto>(&spec)) return p->lambda;
    if (const auto* t = std::get_if<dist::StudentT>(&spec)) return t->nu;
    return 0.0;
}

inline bool es_is_infinite(const dist::DistributionSpec& spec) {
    const double k = tail_index(spec);
    return k != 0.0 && k <= 1.0;
}

inline bool variance_is_infinite(const dist::DistributionSpec& spec) {
    const double k = tail_index(spec);
    return k != 0.0 && k <= 2.0;
}

inline void require_finite_es(const dist::DistributionSpec& spec) {
    if (es_is_infinite(spec)) throw InfiniteValue("ES: tail index <= 1 for " + dist::family_name(spec));
}

/// Exponent of the node-concentrating map v = a * s^kappa. Chosen so that a
/// v^{-1/k} tail becomes a bounded integrand in s.
inline double node_exponent(double tail_index, double power) {
    if (tail_index == 0.0) return 4.0;
    const double margin = 1.0 - power / tail_index;
    return std::clamp(2.0 / margin, 4.0, 64.0);
}

/// Levels v in (0, alpha) where the upper quantile jumps or kinks.
inline std::vector<double> quantile_breaks(const dist::DistributionSpec& spec, double alpha) {
    std::vector<double> br;
    if (const auto* b = std::get_if<dist::ScaledBernoulli>(&spec)) br = {b->p};
    if (const auto* m = std::get_if<dist::AtomMix>(&spec)) br = {m->alpha, m->alpha + m->delta};
    std::erase_if(br, [&](double v) { return !(v > 0.0 && v < alpha); });
    std::sort(br.begin(), br.end());
    return br;
}

/// Exact int_{lo}^{1} F^-1(u) du for the AtomMix quantile function.
inline double atom_mix_quantile_integral(const dist::AtomMix& m, double lo) {
    const double p0 = m.atom_mass();
    const double lin_hi = 1.0 - m.alpha;
    double total = m.x0 * std::max(0.0, p0 - lo);
    const double a = std::max(lo, p0);
    if (a < lin_hi && m.delta > 0.0) {
        // F^-1(u) = x0 (1 - (u - p0) / delta) on [p0, 1 - alpha]
        const double b = lin_hi;
        total += m.x0 * ((b - a) - ((b - p0) * (b - p0) - (a - p0) * (a - p0)) / (2.0 * m.delta));
    }
    return total;
}

} // namespace detail

/// Closed form ES for every family in the catalog.
inline double es_exact(const dist::DistributionSpec& spec, RiskLevel level) {
    using namespace dist;
    const double a = level.value();
    validate(spec);
    detail::require_finite_es(spec);
    struct Visitor {
        double a;
        double operator()(const Normal& d) const {
            const double z = special::normal_upper_quantile(a);
            return d.mu + d.sigma * special::normal_pdf(z) / a;
        }
        double operator()(const StudentT& d) const {
            const double t = d.upper_quantile(a);
            return (d.nu + t * t) / (d.nu - 1.0) * special::student_t_pdf(t, d.nu) / a;
        }
        double operator()(const Logistic& d) const {
            return d.location + d.scale * (-(1.0 - a) * std::log1p(-a) - a * std::log(a)) / a;
        }
        double operator()(const Lognormal& d) const {
            const double z = special::normal_upper_quantile(a);
            return std::exp(d.mu + 0.5 * d.sigma * d.sigma) * special::normal_cdf(d.sigma - z) / a;
        }
        double operator()(const Pareto& d) const {
            return d.x0 * d.lambda / (std::pow(a, 1.0 / d.lambda) * (d.lambda - 1.0));
        }
        double operator()(const Exponential& d) const { return (1.0 - std::log(a)) / d.rate; }
        double operator()(const ScaledBernoulli& d) const { return d.x * std::min(1.0, d.p / a); }
        double operator()(const AtomMix& d) const { return detail::atom_mix_quantile_integral(d, 1.0 - a) / a; }
    };
    return std::visit(Visitor{a}, spec);
}

/// (1/alpha) int_{1-alpha}^1 VaR_u du by adaptive quadrature after the
/// substitution u = 1 - alpha s^kappa, which tames the u -> 1 blow-up.
inline double es_by_quadrature(const dist::DistributionSpec& spec, RiskLevel level, double tol = kDefaultEsTol) {
    const double a = level.value();
    dist::validate(spec);
    detail::require_finite_es(spec);
    const double kappa = detail::node_exponent(detail::tail_index(spec), 1.0);
    auto integrand = [&](double s) {
        const double sk1 = std::pow(s, kappa - 1.0);
        return dist::upper_quantile(spec, a * sk1 * s) * kappa * sk1;
    };
    std::vector<double> cuts{0.0};
    for (double v : detail::quantile_breaks(spec, a)) cuts.push_back(std::pow(v / a, 1.0 / kappa));
    cuts.push_back(1.0);
    const double per_piece = tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto r = quad::integrate(integrand, cuts[i], cuts[i + 1], {.abs_tol = per_piece, .max_intervals = 20000});
        if (!r.converged)
            throw QuadratureError("ES quadrature did not reach tol for " + dist::family_name(spec));
        total += r.value;
    }
    return total;
}

/// ES through the distortion representation, integrating in t rather than u:
///   ES = int_{-inf}^0 (psi(F(t)) - 1) dt + int_0^inf psi(F(t)) dt,
///   psi(x) = min{(1 - x)/alpha, 1}.
inline double es_by_distortion(const dist::DistributionSpec& spec, RiskLevel level, double tol = kDefaultEsTol) {
    const double a = level.value();
    dist::validate(spec);
    detail::require_finite_es(spec);
    auto psi_of_cdf = [&](double t) { return std::min(dist::survival(spec, t) / a, 1.0); };

    // psi(F(t)) == 1 left of the (1-a)-quantile, so the negative half-line
    // integrand vanishes there.
    const double q = dist::upper_quantile(spec, a);
    std::vector<double> cuts{std::min(q, 0.0), 0.0, q};
    for (double x : dist::atoms(spec)) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::erase_if(cuts, [&](double c) { return c < std::min(q, 0.0); });

    const double per_piece = tol / static_cast<double>(cuts.size() + 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        auto f = [&](double t) { return t < 0.0 ? psi_of_cdf(t) - 1.0 : psi_of_cdf(t); };
        const auto r = quad::integrate(f, lo, hi, {.abs_tol = per_piece, .max_intervals = 20000});
        if (!r.converged) throw QuadratureError("distortion integral failed on a finite piece");
        total += r.value;
    }

    // Right tail [t0, inf) via t = t0 + c (w^-2 - 1), w in (0, 1].
    const double t0 = cuts.back();
    const double c = std::max(1.0, std::fabs(t0));
    auto tail = [&](double w) {
        const double t = t0 + c * (1.0 / (w * w) - 1.0);
        const double s = psi_of_cdf(t);
        if (s == 0.0) return 0.0;
        return s * 2.0 * c / (w * w * w);
    };
    const auto r = quad::integrate(tail, 0.0, 1.0, {.abs_tol = per_piece, .max_intervals = 20000});
    if (!r.converged)
        throw QuadratureError("distortion tail integral above tol beyond the cutoff for " + dist::family_name(spec));
    return total + r.value;
}

namespace detail {

/// sigma^2 in t-space, (2/a^2) int_q^inf F(t) int_t^inf S(s) ds dt, for the
/// AtomMix law whose survival function is piecewise linear below 0.
inline VarianceResult atom_mix_sigma(const dist::AtomMix& m, double a) {
    const double q = m.upper_quantile(a);
    if (q >= 0.0) return {0.0, 0.0};
    auto excess = [&](double t) { // int_t^0 S(s) ds, t in [x0, 0]
        return m.alpha * (-t) + m.delta * t * t / (2.0 * -m.x0);
    };
    auto f = [&](double t) { return m.cdf(t) * excess(t); };
    const auto r = quad::integrate(f, q, 0.0, {.abs_tol = 1e-15});
    return {2.0 / (a * a) * r.value, 2.0 / (a * a) * r.error};
}

} // namespace detail

/// sigma^2_ES. Continuous families use the quantile-space double integral,
/// reduced to the nested form
///   (2/a^2) int_0^a (1 - x) g(x) int_0^x y g(y) dy dx,   g(x) = 1/f(F^-1(1 - x)),
/// with both levels mapped through x = a s^kappa. Divergence is decided from
/// the family parameters, never from quadrature behaviour.
inline VarianceResult sigma_es(const dist::DistributionSpec& spec, RiskLevel level,
                               double rel_tol = kDefaultSigmaRelTol) {
    const double a = level.value();
    dist::validate(spec);
    if (const auto* b = std::get_if<dist::ScaledBernoulli>(&spec)) {
        if (b->p <= a) return {b->x * b->x * (b->p - b->p * b->p) / (a * a), 0.0};
        return {0.0, 0.0};
    }
    if (const auto* m = std::get_if<dist::AtomMix>(&spec)) return detail::atom_mix_sigma(*m, a);
    if (detail::variance_is_infinite(spec)) return {std::numeric_limits<double>::infinity(), 0.0};

    const double k = detail::tail_index(spec);
    const double kappa_inner = detail::node_exponent(k, 1.0);
    const double kappa_outer = detail::node_exponent(k, 2.0);

    auto g = [&](double x) {
        const double dens = dist::density(spec, dist::upper_quantile(spec, x));
        if (!(dens > 0.0)) throw PreconditionError("density vanishes inside the tail of " + dist::family_name(spec));
        return 1.0 / dens;
    };
    double inner_err = 0.0;
    auto inner = [&](double x) { // int_0^x y g(y) dy
        auto f = [&](double w) {
            const double wk1 = std::pow(w, kappa_inner - 1.0);
            const double y = x * wk1 * w;
            return y * g(y) * x * kappa_inner * wk1;
        };
        const auto r = quad::integrate(f, 0.0, 1.0, {.abs_tol = 0.0, .rel_tol = 1e-12, .max_intervals = 2000});
        inner_err = std::max(inner_err, r.error / std::max(std::fabs(r.value), 1e-300));
        return r.value;
    };
    auto outer = [&](double s) {
        const double sk1 = std::pow(s, kappa_outer - 1.0);
        const double x = a * sk1 * s;
        return (1.0 - x) * g(x) * inner(x) * a * kappa_outer * sk1;
    };
    const double outer_tol = std::min(rel_tol, 1e-9);
    const auto r = quad::integrate(outer, 0.0, 1.0, {.abs_tol = 0.0, .rel_tol = outer_tol, .max_intervals = 4000});
    if (!r.converged) throw QuadratureError("sigma_ES quadrature did not converge for " + dist::family_name(spec));
    const double scale = 2.0 / (a * a);
    const double value = scale * r.value;
    return {value, scale * r.error + std::fabs(value) * inner_err};
}

/// D(beta) = 1 / f(F^-1(1 - beta)) for any tail probability beta in (0, 1).
inline double local_lipschitz(const dist::DistributionSpec& spec, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidParameter("beta", "must lie in (0, 1)");
    const double dens = dist::density(spec, dist::upper_quantile(spec, beta));
    if (!(dens > 0.0)) throw PreconditionError("density is not positive at the quantile");
    return 1.0 / dens;
}

inline double lipschitz_D(const dist::DistributionSpec& spec, RiskLevel level) {
    dist::validate(spec);
    return local_lipschitz(spec, level.value());
}

/// max of D over [alpha/2, 2 alpha]: a 129-point grid, then two rounds of
/// 129-point refinement around the running argmax.
inline double lipschitz_L(const dist::DistributionSpec& spec, RiskLevel level) {
    dist::validate(spec);
    constexpr int kGrid = 129;
    double lo = 0.5 * level.value();
    double hi = 2.0 * level.value();
    double best = -1.0;
    double best_beta = lo;
    for (int round = 0; round < 3; ++round) {
        const double step = (hi - lo) / (kGrid - 1);
        for (int i = 0; i < kGrid; ++i) {
            const double beta = lo + step * i;
            const double d = local_lipschitz(spec, beta);
            if (d > best) best = d, best_beta = beta;
        }
        lo = std::max(0.5 * level.value(), best_beta - step);
        hi = std::min(2.0 * level.value(), best_beta + step);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Catalog of reference distributions with their Lipschitz and sigma columns.

struct CatalogEntry {
    std::string family;
    std::string params;
    dist::DistributionSpec spec;
};

inline std::vector<CatalogEntry> table1_catalog() {
    return {
        {"Normal", "mu=0;sigma=1", dist::Normal{0.0, 1.0}},
        {"Student-t", "nu=5", dist::StudentT{5.0}},
        {"Logistic", "location=0;scale=1", dist::Logistic{0.0, 1.0}},
        {"Lognormal", "mu=0;sigma=1", dist::Lognormal{0.0, 1.0}},
        {"Pareto", "x0=1;lambda=2", dist::Pareto{1.0, 2.0}},
        {"Pareto", "x0=1;lambda=4", dist::Pareto{1.0, 4.0}},
        {"Exponential", "rate=1", dist::Exponential{1.0}},
    };
}

struct TableRow {
    std::string family;
    std::string params;
    double alpha = 0.0;
    double D = 0.0;
    double sigma = 0.0; // +inf when infinite
};

inline std::vector<TableRow> table1_rows(const std::vector<double>& alphas) {
    std::vector<TableRow> rows;
    for (double a : alphas) {
        const RiskLevel level(a);
        for (const auto& e : table1_catalog()) {
            TableRow row{e.family, e.params, a, 0.0, 0.0};
            try {
                row.D = lipschitz_D(e.spec, level);
                const auto v = sigma_es(e.spec, level);
                row.sigma = v.is_infinite() ? v.value : v.sd();
            } catch (const Error& err) {
                throw QuadratureError(e.family + " (" + e.params + ") at alpha=" + std::to_string(a) + ": " +
                                      err.what());
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace functionals
} // namespace esr
