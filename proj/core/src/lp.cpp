#include "smd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smd {

LinearProgram::LinearProgram(std::size_t num_vars)
    : num_vars_(num_vars),
      objective_(num_vars, 0.0),
      lower_(num_vars, 0.0),
      upper_(num_vars, kInfinity) {}

void LinearProgram::set_objective(std::span<const double> c) {
    if (c.size() != num_vars_) throw std::invalid_argument("objective dimension mismatch");
    objective_.assign(c.begin(), c.end());
}

void LinearProgram::add_row(std::span<const double> coeffs, double rhs) {
    if (coeffs.size() != num_vars_) throw std::invalid_argument("constraint dimension mismatch");
    if (!std::isfinite(rhs)) throw std::invalid_argument("constraint right-hand side must be finite");
    coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
    rhs_.push_back(rhs);
}

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
    if (var >= num_vars_) throw std::invalid_argument("variable index out of range");
    if (!std::isfinite(lower)) throw std::invalid_argument("lower bound must be finite");
    lower_[var] = lower;
    upper_[var] = upper;
}

double LinearProgram::violation(std::span<const double> x) const {
    if (x.size() != num_vars_) throw std::invalid_argument("point dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < num_rows(); ++i) {
        double lhs = 0.0;
        const auto r = row(i);
        for (std::size_t j = 0; j < num_vars_; ++j) lhs += r[j] * x[j];
        worst = std::max(worst, lhs - rhs_[i]);
    }
    for (std::size_t j = 0; j < num_vars_; ++j) {
        worst = std::max(worst, lower_[j] - x[j]);
        if (std::isfinite(upper_[j])) worst = std::max(worst, x[j] - upper_[j]);
    }
    return worst;
}

namespace {

constexpr double kPivotTolerance = 1e-12;

// Dense simplex tableau over  T x = rhs, x >= 0, with an explicit basis.
// Row `m` holds reduced costs; its last entry is minus the objective value.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double rhs(std::size_t r) const { return at(r, n_); }
    double& cost(std::size_t c) { return at(m_, c); }
    std::size_t& basis(std::size_t r) { return basis_[r]; }
    std::size_t basis(std::size_t r) const { return basis_[r]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    // Reduced-cost row from a cost vector for the current basis.
    void price(std::span<const double> costs) {
        for (std::size_t c = 0; c < n_; ++c) cost(c) = costs[c];
        at(m_, n_) = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = costs[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(m_, c) -= cb * at(r, c);
        }
    }

    enum class Outcome { Optimal, Unbounded };

    // Bland's rule: lowest-index improving column, lowest-index basic
    // variable among tied ratios. Columns >= `enter_limit` never enter.
    Outcome run(std::size_t enter_limit) {
        for (;;) {
            std::size_t enter = n_;
            for (std::size_t c = 0; c < enter_limit; ++c) {
                if (cost(c) < -kLpTolerance) {
                    enter = c;
                    break;
                }
            }
            if (enter == n_) return Outcome::Optimal;
            std::size_t leave = m_;
            double best = kInfinity;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= kPivotTolerance) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best || (ratio == best && leave != m_ && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave == m_) return Outcome::Unbounded;
            pivot(leave, enter);
        }
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    LpSolution sol;

    // Shift x = lower + z so that z >= 0; finite upper bounds become rows.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const auto r = lp.row(i);
        double shifted = lp.rhs(i);
        for (std::size_t j = 0; j < n; ++j) shifted -= r[j] * lp.lower(j);
        rows.emplace_back(r.begin(), r.end());
        rhs.push_back(shifted);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lp.upper(j))) continue;
        const double span = lp.upper(j) - lp.lower(j);
        if (span < -kLpTolerance) return sol;
        std::vector<double> r(n, 0.0);
        r[j] = 1.0;
        rows.push_back(std::move(r));
        rhs.push_back(std::max(span, 0.0));
    }

    const std::size_t m = rows.size();
    std::size_t artificial_count = 0;
    for (double b : rhs)
        if (b < 0.0) ++artificial_count;
    // Columns: structural z, one slack per row, then artificials.
    const std::size_t slack0 = n;
    const std::size_t art0 = n + m;
    Tableau tab(m, n + m + artificial_count);
    std::size_t next_art = art0;
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * rows[i][j];
        tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * rhs[i];
        if (sign < 0.0) {
            tab.at(i, next_art) = 1.0;
            tab.basis(i) = next_art++;
        } else {
            tab.basis(i) = slack0 + i;
        }
    }

    if (artificial_count > 0) {
        std::vector<double> phase1(tab.cols(), 0.0);
        for (std::size_t c = art0; c < tab.cols(); ++c) phase1[c] = 1.0;
        tab.price(phase1);
        tab.run(tab.cols());
        double infeasibility = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            if (tab.basis(r) >= art0) infeasibility += tab.rhs(r);
        if (infeasibility > kLpTolerance) return sol;
        // Drive zero-level artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis(r) < art0) continue;
            for (std::size_t c = 0; c < art0; ++c) {
                if (std::abs(tab.at(r, c)) > kPivotTolerance) {
                    tab.pivot(r, c);
                    break;
                }
            }
        }
    }

    std::vector<double> phase2(tab.cols(), 0.0);
    const auto c = lp.objective();
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    tab.price(phase2);
    if (tab.run(art0) == Tableau::Outcome::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (tab.basis(r) < n) sol.x[tab.basis(r)] = tab.rhs(r);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sol.x[j] += lp.lower(j);
        sol.objective += c[j] * sol.x[j];
    }
    return sol;
}

double LinearFractional::evaluate(std::span<const double> x) const {
    double top = num_const;
    double bottom = den_const;
    for (std::size_t j = 0; j < x.size(); ++j) {
        top += num[j] * x[j];
        bottom += den[j] * x[j];
    }
    return top / bottom;
}

LpSolution solve_linear_fractional(const LinearFractional& lf) {
    const auto& region = lf.region;
    const std::size_t n = region.num_vars();
    if (lf.num.size() != n || lf.den.size() != n)
        throw std::invalid_argument("fractional objective dimension mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (region.lower(j) < 0.0)
            throw std::invalid_argument("linear-fractional region needs nonnegative variables");

    // Variables (y_1..y_n, t).
    LinearProgram lp(n + 1);
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t i = 0; i < region.num_rows(); ++i) {
        const auto r = region.row(i);
        std::copy(r.begin(), r.end(), row.begin());
        row[n] = -region.rhs(i);
        lp.add_row(row, 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (region.lower(j) > 0.0) {
            std::fill(row.begin(), row.end(), 0.0);
            row[j] = -1.0;
            row[n] = region.lower(j);
            lp.add_row(row, 0.0);
        }
        if (std::isfinite(region.upper(j))) {
            std::fill(row.begin(), row.end(), 0.0);
            row[j] = 1.0;
            row[n] = -region.upper(j);
            lp.add_row(row, 0.0);
        }
    }
    std::copy(lf.den.begin(), lf.den.end(), row.begin());
    row[n] = lf.den_const;
    lp.add_row(row, 1.0);
    for (double& v : row) v = -v;
    lp.add_row(row, -1.0);

    const double sign = lf.sense == Sense::Minimize ? 1.0 : -1.0;
    std::vector<double> obj(n + 1);
    for (std::size_t j = 0; j < n; ++j) obj[j] = sign * lf.num[j];
    obj[n] = sign * lf.num_const;
    lp.set_objective(obj);

    LpSolution transformed = solve_lp(lp);
    LpSolution sol;
    sol.status = transformed.status;
    if (transformed.status != LpStatus::Optimal) return sol;
    const double t = transformed.x[n];
    if (!(t > kLpTolerance)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = transformed.x[j] / t;
    sol.objective = lf.evaluate(sol.x);
    return sol;
}

}  // namespace smd
