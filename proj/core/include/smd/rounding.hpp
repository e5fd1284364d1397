#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smd/random.hpp"

namespace smd {

/// Packing rows A x <= b with nonnegative A, stored row-major.
class PackingConstraints {
public:
    explicit PackingConstraints(std::size_t num_vars) : num_vars_(num_vars) {}

    void add_row(std::span<const double> coeffs, double rhs);

    [[nodiscard]] std::size_t num_vars() const noexcept { return num_vars_; }
    [[nodiscard]] std::size_t num_rows() const noexcept { return rhs_.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {coeffs_.data() + i * num_vars_, num_vars_};
    }
    [[nodiscard]] double rhs(std::size_t i) const noexcept { return rhs_[i]; }

    /// Exact check, no tolerance.
    [[nodiscard]] bool satisfied(std::span<const long> x) const;

private:
    std::size_t num_vars_;
    std::vector<double> coeffs_;
    std::vector<double> rhs_;
};

struct RoundingParams {
    double delta = 1.0;
    int retries = 10;  // F
    std::uint64_t seed = 0;
    /// Replaces the computed M_delta when set.
    std::optional<double> m_delta;
};

enum class RoundingOutcome { Sampled, Fallback, Unschedulable };

struct RoundingResult {
    std::vector<long> x;  // empty when Unschedulable
    RoundingOutcome outcome = RoundingOutcome::Unschedulable;
    double objective = 0.0;
    double m_delta = 1.0;
    int feasible_attempts = 0;
};

using IntegerObjective = std::function<double(std::span<const long>)>;

/// min b_i / A_ij over positive entries. Rows without a positive entry are ignored.
[[nodiscard]] double compute_w_b(const PackingConstraints& constraints);

/// 1 + a - sqrt(a^2 + 2a) with a = 3 ln(2r/delta) / (2 W_b).
[[nodiscard]] double compute_m_delta(double delta, std::size_t rows, double w_b);

/// (8L/M_delta + 4)/delta, the cost factor the rounding stays within with
/// probability at least 1 - delta for L ratio terms.
[[nodiscard]] double rounding_cost_bound(std::size_t terms, double m_delta, double delta);

/// One raw attempt: each coordinate rounds up with probability equal to its
/// fractional part. Up iff u < frac with u = rng.uniform01().
[[nodiscard]] std::vector<long> round_once(std::span<const double> scaled, Rng& rng);

/// Scale x_bar by M_delta, draw F attempts, lift zero coordinates to 1 and
/// keep the feasible attempt with the lowest objective (earliest on ties).
/// With no feasible attempt, tries clamp(floor(x'), >= 1), then all ones,
/// and otherwise reports Unschedulable.
[[nodiscard]] RoundingResult randomized_round(std::span<const double> x_bar,
                                              const PackingConstraints& constraints,
                                              const RoundingParams& params,
                                              const IntegerObjective& objective);

}  // namespace smd
