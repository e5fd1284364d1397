#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smd/lp.hpp"
#include "smd/model.hpp"
#include "smd/speed.hpp"

namespace smd {

/// One summand (a^T x + q) / (c^T x + d).
struct Ratio {
    std::vector<double> num;
    double num_const = 0.0;
    std::vector<double> den;
    double den_const = 1.0;

    [[nodiscard]] double evaluate(std::span<const double> x) const;
};

/// Minimize sum_j ratio_j(x) over the feasible region of `region`
/// (packing rows A x <= C plus variable bounds; its objective is unused).
struct SumOfRatiosProblem {
    std::vector<Ratio> terms;
    LinearProgram region{0};
    std::vector<std::string> var_names;

    [[nodiscard]] double evaluate(std::span<const double> x) const;
    /// A x <= C and bounds, to `tol` absolute.
    [[nodiscard]] bool feasible(std::span<const double> x, double tol = kLpTolerance) const;
};

struct RatioBounds {
    std::vector<double> lower;  // l_j, min of term j over the region
    std::vector<double> upper;  // phi_j, max of term j over the region
    std::size_t last = 0;       // J: argmax phi_j / l_j, first index on ties
};

/// Geometric grid l_j (1+eps)^n, n = 0..lambda_j, for every term except J.
/// The product set is enumerated lazily in row-major order (last dimension
/// fastest); it is never materialized.
class GridSet {
public:
    GridSet() = default;
    GridSet(std::vector<std::size_t> terms, std::vector<std::vector<double>> points);

    /// Term indices of the grid dimensions, in order.
    [[nodiscard]] std::span<const std::size_t> terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t dimensions() const noexcept { return terms_.size(); }
    [[nodiscard]] std::span<const double> points(std::size_t dim) const { return points_.at(dim); }
    /// lambda_j for grid dimension `dim`.
    [[nodiscard]] std::size_t lambda(std::size_t dim) const { return points_.at(dim).size() - 1; }
    /// |T^eps|, the product of (lambda_j + 1).
    [[nodiscard]] std::size_t size() const noexcept;
    /// The `index`-th grid point in enumeration order.
    [[nodiscard]] std::vector<double> point(std::size_t index) const;

private:
    std::vector<std::size_t> terms_;
    std::vector<std::vector<double>> points_;
};

struct GridCandidate {
    std::vector<double> x;
    double psi = 0.0;  // sum of nu_j + term_J(x)
};

struct SorSolution {
    std::vector<double> x;
    double objective = 0.0;       // L~, the best Psi(nu) found
    double true_objective = 0.0;  // sum of terms evaluated at x
    std::vector<double> nu;       // winning grid point (empty when there is no grid)
    std::size_t grid_size = 0;
    std::size_t subproblems_solved = 0;
};

/// Objective of the job's relaxed inner problem over x = (w, p) with w, p >= 1.
///
/// Sync: (t1 w + t2 p + t3)/1 + t4 w/p + t5/w. Async, numerators sharing the
/// denominator w merged: (t1 w + t2 p + t3)/w + t4/p. Identically zero terms
/// are dropped.
[[nodiscard]] SumOfRatiosProblem build_sor_problem(const JobSpec& job, const Theta& theta);

[[nodiscard]] RatioBounds ratio_bounds(const SumOfRatiosProblem& problem);

/// Accepts eps in (0, 1].
[[nodiscard]] GridSet build_grid(const RatioBounds& bounds, double eps);

/// Minimize term J subject to term_j(x) <= nu_j for every grid dimension j,
/// with denominators cleared. nullopt when the grid point is infeasible.
[[nodiscard]] std::optional<GridCandidate> solve_grid_point(const SumOfRatiosProblem& problem,
                                                            const GridSet& grid, std::size_t last,
                                                            std::span<const double> nu);

/// Grid search over T^eps keeping the smallest Psi(nu); the first winner is
/// kept on ties. Each dimension also gets phi_j as a final level when it lies
/// above the top grid point, so every value in [l_j, phi_j] has a level within
/// a factor (1+eps) above it. Grid points whose lower bound sum(nu) + l_J
/// cannot beat the incumbent strictly are skipped without solving.
[[nodiscard]] SorSolution solve_sor(const SumOfRatiosProblem& problem, double eps);

}  // namespace smd
