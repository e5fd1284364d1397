#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace smd {

/// Select items maximizing total utility with sum of demands <= capacity in
/// every dimension.
struct MkpInstance {
    std::vector<double> utilities;
    std::vector<std::vector<double>> demands;  // one vector per item
    std::vector<double> capacity;
    double epsilon = 0.01;

    [[nodiscard]] std::size_t items() const noexcept { return utilities.size(); }
    [[nodiscard]] std::size_t dimensions() const noexcept { return capacity.size(); }
    /// Throws std::invalid_argument on inconsistent dimensions or negative demands.
    void validate() const;
};

struct AdmissionResult {
    std::vector<std::size_t> selected;  // ascending
    double total_utility = 0.0;
    std::vector<double> residual;
};

/// Relaxation with x_i = 1 on S, x_t = 0 on T(S) and the rest in [0, 1].
struct FixedRelaxation {
    std::vector<double> x;  // basic solution over all items
    double value = 0.0;
};

/// Items outside S whose utility exceeds the smallest utility in S.
[[nodiscard]] std::vector<std::size_t> dominated_by(const MkpInstance& instance,
                                                    const std::vector<std::size_t>& fixed);

/// nullopt when S alone exceeds the capacity.
[[nodiscard]] std::optional<FixedRelaxation> lp_relaxation_fixed(const MkpInstance& instance,
                                                                 const std::vector<std::size_t>& fixed);

/// Enumerates every feasible S with |S| <= k, default k = min(I, ceil(R/eps)),
/// rounds each LP(S) solution down and keeps the best. Items with u <= 0 are
/// never selected. Ties go to the lexicographically smallest selection.
[[nodiscard]] AdmissionResult solve_mkp_eps(const MkpInstance& instance,
                                            std::optional<std::size_t> max_fixed = std::nullopt);

/// Branch and bound with an LP-relaxation bound; same tie rule.
[[nodiscard]] AdmissionResult solve_mkp_exact(const MkpInstance& instance, std::size_t size_cap = 20);

/// Sum of demands of `selected` fits the capacity, compared without tolerance.
[[nodiscard]] bool selection_fits(const MkpInstance& instance, const std::vector<std::size_t>& selected);

}  // namespace smd
