#include "smd/sum_of_ratios.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <variant>

namespace smd {

double Ratio::evaluate(std::span<const double> x) const {
    double top = num_const;
    double bottom = den_const;
    for (std::size_t j = 0; j < x.size(); ++j) {
        top += num[j] * x[j];
        bottom += den[j] * x[j];
    }
    return top / bottom;
}

double SumOfRatiosProblem::evaluate(std::span<const double> x) const {
    double total = 0.0;
    for (const auto& t : terms) total += t.evaluate(x);
    return total;
}

bool SumOfRatiosProblem::feasible(std::span<const double> x, double tol) const {
    return region.violation(x) <= tol;
}

GridSet::GridSet(std::vector<std::size_t> terms, std::vector<std::vector<double>> points)
    : terms_(std::move(terms)), points_(std::move(points)) {
    if (terms_.size() != points_.size()) throw std::invalid_argument("grid dimension mismatch");
    for (const auto& p : points_)
        if (p.empty()) throw std::invalid_argument("grid dimension without points");
}

std::size_t GridSet::size() const noexcept {
    std::size_t n = 1;
    for (const auto& p : points_) n *= p.size();
    return n;
}

std::vector<double> GridSet::point(std::size_t index) const {
    std::vector<double> nu(points_.size());
    for (std::size_t d = points_.size(); d-- > 0;) {
        const std::size_t k = points_[d].size();
        nu[d] = points_[d][index % k];
        index /= k;
    }
    return nu;
}

namespace {

Ratio make_ratio(std::vector<double> num, double num_const, std::vector<double> den, double den_const) {
    return Ratio{std::move(num), num_const, std::move(den), den_const};
}

bool identically_zero(const Ratio& r) {
    if (r.num_const != 0.0) return false;
    for (double a : r.num)
        if (a != 0.0) return false;
    return true;
}

LinearFractional fractional(const Ratio& term, const LinearProgram& region, Sense sense) {
    return LinearFractional{term.num, term.num_const, term.den, term.den_const, sense, region};
}

}  // namespace

SumOfRatiosProblem build_sor_problem(const JobSpec& job, const Theta& theta) {
    SumOfRatiosProblem problem;
    problem.var_names = {"w", "p"};
    problem.region = LinearProgram(2);
    for (Resource r : kAllResources) {
        const double coeffs[2] = {job.worker_demand[r], job.ps_demand[r]};
        problem.region.add_row(coeffs, job.resource_limit[r]);
    }
    problem.region.set_bounds(0, 1.0);
    problem.region.set_bounds(1, 1.0);

    std::vector<Ratio> terms;
    if (const auto* s = std::get_if<ThetaSync>(&theta)) {
        terms.push_back(make_ratio({s->t1, s->t2}, s->t3, {0.0, 0.0}, 1.0));
        terms.push_back(make_ratio({s->t4, 0.0}, 0.0, {0.0, 1.0}, 0.0));
        terms.push_back(make_ratio({0.0, 0.0}, s->t5, {1.0, 0.0}, 0.0));
    } else {
        const auto& a = std::get<ThetaAsync>(theta);
        terms.push_back(make_ratio({a.t1, a.t2}, a.t3, {1.0, 0.0}, 0.0));
        terms.push_back(make_ratio({0.0, 0.0}, a.t4, {0.0, 1.0}, 0.0));
    }
    for (auto& t : terms)
        if (!identically_zero(t)) problem.terms.push_back(std::move(t));
    return problem;
}

RatioBounds ratio_bounds(const SumOfRatiosProblem& problem) {
    RatioBounds b;
    double best_spread = -1.0;
    for (std::size_t j = 0; j < problem.terms.size(); ++j) {
        const auto lo = solve_linear_fractional(fractional(problem.terms[j], problem.region, Sense::Minimize));
        const auto hi = solve_linear_fractional(fractional(problem.terms[j], problem.region, Sense::Maximize));
        if (lo.status == LpStatus::Infeasible || hi.status == LpStatus::Infeasible)
            throw std::runtime_error("sum-of-ratios feasible region is empty");
        if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
            throw std::runtime_error("sum-of-ratios term is unbounded over the region");
        if (!(lo.objective > 0.0))
            throw std::runtime_error("sum-of-ratios term is not positive over the region");
        const double upper = std::max(lo.objective, hi.objective);
        b.lower.push_back(lo.objective);
        b.upper.push_back(upper);
        const double spread = upper / lo.objective;
        if (spread > best_spread) {
            best_spread = spread;
            b.last = j;
        }
    }
    return b;
}

GridSet build_grid(const RatioBounds& bounds, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("grid precision must be in (0, 1]");
    std::vector<std::size_t> terms;
    std::vector<std::vector<double>> points;
    const double growth = 1.0 + eps;
    for (std::size_t j = 0; j < bounds.lower.size(); ++j) {
        if (j == bounds.last) continue;
        const double lo = bounds.lower[j];
        const double hi = bounds.upper[j];
        auto level = [&](long n) { return lo * std::pow(growth, static_cast<double>(n)); };
        long lambda = static_cast<long>(std::floor(std::log(hi / lo) / std::log(growth)));
        if (lambda < 0) lambda = 0;
        while (level(lambda + 1) <= hi) ++lambda;
        while (lambda > 0 && level(lambda) > hi) --lambda;
        std::vector<double> q(static_cast<std::size_t>(lambda) + 1);
        for (long n = 0; n <= lambda; ++n) q[static_cast<std::size_t>(n)] = level(n);
        terms.push_back(j);
        points.push_back(std::move(q));
    }
    return GridSet(std::move(terms), std::move(points));
}

std::optional<GridCandidate> solve_grid_point(const SumOfRatiosProblem& problem, const GridSet& grid,
                                              std::size_t last, std::span<const double> nu) {
    if (nu.size() != grid.dimensions()) throw std::invalid_argument("grid point dimension mismatch");
    LinearProgram region = problem.region;
    const std::size_t n = region.num_vars();
    std::vector<double> row(n);
    for (std::size_t d = 0; d < grid.dimensions(); ++d) {
        const auto& t = problem.terms[grid.terms()[d]];
        // term <= nu  <=>  (a - nu c)^T x <= nu d - q, valid since c^T x + d > 0.
        for (std::size_t k = 0; k < n; ++k) row[k] = t.num[k] - nu[d] * t.den[k];
        region.add_row(row, nu[d] * t.den_const - t.num_const);
    }
    const auto sol = solve_linear_fractional(fractional(problem.terms[last], region, Sense::Minimize));
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    GridCandidate c;
    c.psi = std::accumulate(nu.begin(), nu.end(), 0.0) + sol.objective;
    c.x = sol.x;
    return c;
}

SorSolution solve_sor(const SumOfRatiosProblem& problem, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("precision must be in (0, 1)");
    SorSolution out;
    if (problem.terms.empty()) {
        const auto feasible = solve_lp(problem.region);
        if (feasible.status != LpStatus::Optimal) throw std::runtime_error("sum-of-ratios feasible region is empty");
        out.x = feasible.x;
        return out;
    }

    const auto bounds = ratio_bounds(problem);
    const auto grid = build_grid(bounds, eps);
    out.grid_size = grid.size();
    const double floor_last = bounds.lower[bounds.last];
    const std::size_t dims = grid.dimensions();

    double best = kInfinity;
    std::vector<double> nu(dims);
    // Smallest achievable sum of the dimensions after `d`.
    std::vector<double> tail_min(dims + 1, 0.0);
    for (std::size_t d = dims; d-- > 0;) tail_min[d] = tail_min[d + 1] + grid.points(d).front();
    // The grid tops out at or below phi_j, so an optimum with term j in
    // (max grid point, phi_j] would have no covering point; phi_j closes it.
    std::vector<std::vector<double>> levels(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const auto pts = grid.points(d);
        levels[d].assign(pts.begin(), pts.end());
        const double top = bounds.upper[grid.terms()[d]];
        if (top > levels[d].back()) levels[d].push_back(top);
    }

    std::function<void(std::size_t, double)> visit = [&](std::size_t d, double prefix) {
        if (d == dims) {
            ++out.subproblems_solved;
            auto cand = solve_grid_point(problem, grid, bounds.last, nu);
            if (cand && cand->psi < best) {
                best = cand->psi;
                out.x = std::move(cand->x);
                out.nu = nu;
            }
            return;
        }
        for (double v : levels[d]) {
            // Points are ascending, so once the bound fails it fails for the rest.
            if (!(prefix + v + tail_min[d + 1] + floor_last < best)) break;
            nu[d] = v;
            visit(d + 1, prefix + v);
        }
    };
    visit(0, 0.0);

    if (out.x.empty()) throw std::runtime_error("no feasible grid point");
    out.objective = best;
    out.true_objective = problem.evaluate(out.x);
    return out;
}

}  // namespace smd
