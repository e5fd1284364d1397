#include "smd/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smd {

void PackingConstraints::add_row(std::span<const double> coeffs, double rhs) {
    if (coeffs.size() != num_vars_) throw std::invalid_argument("constraint dimension mismatch");
    for (double a : coeffs)
        if (!(a >= 0.0)) throw std::invalid_argument("packing coefficients must be nonnegative");
    coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
    rhs_.push_back(rhs);
}

bool PackingConstraints::satisfied(std::span<const long> x) const {
    for (std::size_t i = 0; i < num_rows(); ++i) {
        const auto r = row(i);
        double lhs = 0.0;
        for (std::size_t j = 0; j < num_vars_; ++j) lhs += r[j] * static_cast<double>(x[j]);
        if (lhs > rhs_[i]) return false;
    }
    return true;
}

double compute_w_b(const PackingConstraints& constraints) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constraints.num_rows(); ++i) {
        for (double a : constraints.row(i)) {
            if (a <= 0.0) continue;
            if (!(constraints.rhs(i) > 0.0))
                throw std::invalid_argument("packing right-hand side must be positive");
            best = std::min(best, constraints.rhs(i) / a);
        }
    }
    if (!std::isfinite(best)) throw std::invalid_argument("packing matrix has no positive entry");
    return best;
}

double compute_m_delta(double delta, std::size_t rows, double w_b) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
    if (rows < 1) throw std::invalid_argument("at least one packing row is required");
    if (!(w_b > 0.0)) throw std::invalid_argument("W_b must be positive");
    const double a = 3.0 * std::log(2.0 * static_cast<double>(rows) / delta) / (2.0 * w_b);
    // 1 + a - sqrt(a^2 + 2a), rewritten as 1 / (1 + a + sqrt(a^2 + 2a)) to
    // avoid cancellation when a is large.
    return 1.0 / (1.0 + a + std::sqrt(a * a + 2.0 * a));
}

double rounding_cost_bound(std::size_t terms, double m_delta, double delta) {
    return (8.0 * static_cast<double>(terms) / m_delta + 4.0) / delta;
}

std::vector<long> round_once(std::span<const double> scaled, Rng& rng) {
    std::vector<long> x(scaled.size());
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        const double lo = std::floor(scaled[j]);
        const double frac = scaled[j] - lo;
        const double u = rng.uniform01();
        x[j] = static_cast<long>(lo) + (u < frac ? 1 : 0);
    }
    return x;
}

RoundingResult randomized_round(std::span<const double> x_bar, const PackingConstraints& constraints,
                                const RoundingParams& params, const IntegerObjective& objective) {
    if (x_bar.size() != constraints.num_vars()) throw std::invalid_argument("point dimension mismatch");
    if (params.retries < 1) throw std::invalid_argument("retry budget must be at least 1");
    RoundingResult out;
    out.m_delta = params.m_delta ? *params.m_delta
                                 : compute_m_delta(params.delta, constraints.num_rows(), compute_w_b(constraints));
    if (!(out.m_delta > 0.0 && out.m_delta <= 1.0)) throw std::invalid_argument("M_delta must be in (0, 1]");

    std::vector<double> scaled(x_bar.size());
    for (std::size_t j = 0; j < x_bar.size(); ++j) scaled[j] = out.m_delta * x_bar[j];

    Rng rng(params.seed);
    for (int attempt = 0; attempt < params.retries; ++attempt) {
        auto x = round_once(scaled, rng);
        for (auto& v : x) v = std::max(v, 1L);
        if (!constraints.satisfied(x)) continue;
        ++out.feasible_attempts;
        const double value = objective(x);
        if (out.x.empty() || value < out.objective) {
            out.x = std::move(x);
            out.objective = value;
        }
    }
    if (!out.x.empty()) {
        out.outcome = RoundingOutcome::Sampled;
        return out;
    }

    std::vector<long> floor_x(scaled.size());
    for (std::size_t j = 0; j < scaled.size(); ++j)
        floor_x[j] = std::max(static_cast<long>(std::floor(scaled[j])), 1L);
    const std::vector<long> ones(scaled.size(), 1L);
    for (const std::vector<long>* candidate : {static_cast<const std::vector<long>*>(&floor_x), &ones}) {
        if (constraints.satisfied(*candidate)) {
            out.x = *candidate;
            out.objective = objective(out.x);
            out.outcome = RoundingOutcome::Fallback;
            return out;
        }
    }
    out.outcome = RoundingOutcome::Unschedulable;
    return out;
}

}  // namespace smd
