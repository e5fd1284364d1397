#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace smd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Feasibility tolerance on constraints and optimality tolerance on reduced costs.
inline constexpr double kLpTolerance = 1e-9;

/// minimize c^T x  subject to  A x <= b,  lower <= x <= upper.
///
/// Lower bounds must be finite; an upper bound of +inf means unbounded above.
class LinearProgram {
public:
    explicit LinearProgram(std::size_t num_vars);

    [[nodiscard]] std::size_t num_vars() const noexcept { return num_vars_; }
    [[nodiscard]] std::size_t num_rows() const noexcept { return rhs_.size(); }

    void set_objective(std::span<const double> c);
    void add_row(std::span<const double> coeffs, double rhs);
    void set_bounds(std::size_t var, double lower, double upper = kInfinity);

    [[nodiscard]] std::span<const double> objective() const noexcept { return objective_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {coeffs_.data() + i * num_vars_, num_vars_};
    }
    [[nodiscard]] double rhs(std::size_t i) const noexcept { return rhs_[i]; }
    [[nodiscard]] double lower(std::size_t var) const noexcept { return lower_[var]; }
    [[nodiscard]] double upper(std::size_t var) const noexcept { return upper_[var]; }

    /// Max constraint violation of `x` (0 when feasible), bounds included.
    [[nodiscard]] double violation(std::span<const double> x) const;

private:
    std::size_t num_vars_;
    std::vector<double> objective_;
    std::vector<double> coeffs_;  // row-major, num_rows x num_vars
    std::vector<double> rhs_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// Two-phase dense-tableau simplex with Bland's rule. Returns a vertex
/// solution; identical inputs give bit-identical outputs.
[[nodiscard]] LpSolution solve_lp(const LinearProgram& lp);

enum class Sense { Minimize, Maximize };

/// (a^T x + q) / (c^T x + d) over the feasible region of `region` (its
/// objective is ignored). The denominator must be positive on the region and
/// all lower bounds must be nonnegative.
struct LinearFractional {
    std::vector<double> num;
    double num_const = 0.0;
    std::vector<double> den;
    double den_const = 1.0;
    Sense sense = Sense::Minimize;
    LinearProgram region;

    [[nodiscard]] double evaluate(std::span<const double> x) const;
};

/// Charnes-Cooper: with y = t*x and t = 1/(c^T x + d), optimize a^T y + q t
/// over A y <= b t, bounds scaled by t, c^T y + d t = 1, y, t >= 0, then
/// recover x = y / t. The returned objective is the ratio evaluated at x.
/// A zero t at the optimum is reported as Unbounded.
[[nodiscard]] LpSolution solve_linear_fractional(const LinearFractional& lf);

}  // namespace smd
