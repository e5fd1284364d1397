#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smd/speed.hpp"
#include "smd/sum_of_ratios.hpp"
#include "support.hpp"

namespace smd {
namespace {

LinearProgram box(double lo, double hi) {
    LinearProgram lp(2);
    lp.set_bounds(0, lo, hi);
    lp.set_bounds(1, lo, hi);
    return lp;
}

Ratio coord_ratio(std::size_t top, std::size_t bottom) {
    Ratio r{{0.0, 0.0}, 0.0, {0.0, 0.0}, 0.0};
    r.num[top] = 1.0;
    r.den[bottom] = 1.0;
    return r;
}

SumOfRatiosProblem symmetric_problem() {
    SumOfRatiosProblem p;
    p.terms = {coord_ratio(0, 1), coord_ratio(1, 0)};
    p.region = box(1.0, 2.0);
    p.var_names = {"x1", "x2"};
    return p;
}

void expect_ratio(const Ratio& r, std::vector<double> num, double q, std::vector<double> den, double d) {
    EXPECT_EQ(r.num, num);
    EXPECT_DOUBLE_EQ(r.num_const, q);
    EXPECT_EQ(r.den, den);
    EXPECT_DOUBLE_EQ(r.den_const, d);
}

TEST(BuildSorProblem, SyncTerms) {
    const auto job = testing::toy_job("s");
    const auto p = build_sor_problem(job, ThetaSync{1, 2, 20, 40, 100});
    ASSERT_EQ(p.terms.size(), 3u);
    expect_ratio(p.terms[0], {1, 2}, 20, {0, 0}, 1);
    expect_ratio(p.terms[1], {40, 0}, 0, {0, 1}, 0);
    expect_ratio(p.terms[2], {0, 0}, 100, {1, 0}, 0);
    EXPECT_EQ(p.region.num_rows(), kResourceCount);
    EXPECT_EQ(p.region.lower(0), 1.0);
    EXPECT_EQ(p.region.lower(1), 1.0);
}

TEST(BuildSorProblem, AsyncTermsDropZeroOverheads) {
    const auto job = testing::toy_job("a", SgdMode::Async);
    const auto p = build_sor_problem(job, ThetaAsync{0, 0, 40, 20});
    ASSERT_EQ(p.terms.size(), 2u);
    expect_ratio(p.terms[0], {0, 0}, 40, {1, 0}, 0);
    expect_ratio(p.terms[1], {0, 0}, 20, {0, 1}, 0);
}

TEST(BuildSorProblem, SumMatchesCompletionTime) {
    Rng rng(8);
    for (auto mode : {SgdMode::Sync, SgdMode::Async}) {
        const auto job = testing::toy_job("c", mode);
        const auto eta = job_overlap(job);
        const auto theta = assemble_theta(job, eta);
        const auto p = build_sor_problem(job, theta);
        for (int i = 0; i < 10; ++i) {
            const Allocation a{rng.uniform_int(1, 6), rng.uniform_int(1, 6)};
            const std::vector<double> x{double(a.workers), double(a.ps)};
            const double expect = completion_time(job, eta, a);
            EXPECT_NEAR(p.evaluate(x), expect, 1e-12 * expect);
        }
    }
}

TEST(RatioBounds, CoordinateRatioOverBox) {
    SumOfRatiosProblem p;
    p.terms = {coord_ratio(0, 1)};
    p.region = box(1.0, 2.0);
    const auto b = ratio_bounds(p);
    EXPECT_NEAR(b.lower[0], 0.5, 1e-12);
    EXPECT_NEAR(b.upper[0], 2.0, 1e-12);
}

TEST(RatioBounds, ConstantTerm) {
    SumOfRatiosProblem p;
    p.terms = {Ratio{{0, 0}, 5.0, {0, 0}, 1.0}};
    p.region = box(1.0, 2.0);
    const auto b = ratio_bounds(p);
    EXPECT_DOUBLE_EQ(b.lower[0], 5.0);
    EXPECT_DOUBLE_EQ(b.upper[0], 5.0);
    EXPECT_EQ(b.last, 0u);
}

TEST(RatioBounds, LastIsWidestSpread) {
    SumOfRatiosProblem p;
    // Spreads 4 (x1 over [1,4]) and 2 (x2 over [1,2]).
    p.terms = {Ratio{{1, 0}, 0, {0, 0}, 1}, Ratio{{0, 1}, 0, {0, 0}, 1}};
    p.region = LinearProgram(2);
    p.region.set_bounds(0, 1.0, 4.0);
    p.region.set_bounds(1, 1.0, 2.0);
    EXPECT_EQ(ratio_bounds(p).last, 0u);
    std::swap(p.terms[0], p.terms[1]);
    EXPECT_EQ(ratio_bounds(p).last, 1u);
}

TEST(RatioBounds, TiesKeepFirstIndex) {
    EXPECT_EQ(ratio_bounds(symmetric_problem()).last, 0u);
}

TEST(RatioBounds, EmptyRegionThrows) {
    auto p = symmetric_problem();
    p.region.add_row(std::vector<double>{1.0, 1.0}, 1.0);
    EXPECT_THROW((void)ratio_bounds(p), std::runtime_error);
}

TEST(BuildGrid, PowersOfTwoBelowTen) {
    const auto g = build_grid(RatioBounds{{1.0, 1.0}, {10.0, 10.0}, 1}, 1.0);
    ASSERT_EQ(g.dimensions(), 1u);
    EXPECT_EQ(g.terms()[0], 0u);
    EXPECT_EQ(g.lambda(0), 3u);
    const auto pts = g.points(0);
    EXPECT_EQ(std::vector<double>(pts.begin(), pts.end()), (std::vector<double>{1, 2, 4, 8}));
}

TEST(BuildGrid, DegenerateInterval) {
    const auto g = build_grid(RatioBounds{{3.0, 1.0}, {3.0, 9.0}, 1}, 0.1);
    EXPECT_EQ(g.lambda(0), 0u);
    EXPECT_EQ(g.points(0)[0], 3.0);
}

TEST(BuildGrid, ProductSize) {
    // eps=1: [1,4] gives {1,2,4}, [1,15] gives {1,2,4,8}.
    const auto g = build_grid(RatioBounds{{1.0, 1.0, 1.0}, {4.0, 15.0, 100.0}, 2}, 1.0);
    EXPECT_EQ(g.size(), 12u);
    EXPECT_EQ(g.point(0), (std::vector<double>{1, 1}));
    EXPECT_EQ(g.point(1), (std::vector<double>{1, 2}));
    EXPECT_EQ(g.point(11), (std::vector<double>{4, 8}));
}

TEST(BuildGrid, RejectsPrecisionOutOfRange) {
    const RatioBounds b{{1.0}, {2.0}, 0};
    EXPECT_THROW((void)build_grid(b, 0.0), std::invalid_argument);
    EXPECT_THROW((void)build_grid(b, 1.5), std::invalid_argument);
}

TEST(BuildGridProperty, LambdaBracketsUpperBound) {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const double lo = rng.uniform(0.01, 100);
        const double hi = lo * rng.uniform(1, 1e4);
        const double eps = rng.uniform(0.001, 1);
        const auto g = build_grid(RatioBounds{{lo, 1.0}, {hi, 1.0}, 1}, eps);
        const double top = lo * std::pow(1 + eps, double(g.lambda(0)));
        ASSERT_LE(top, hi);
        ASSERT_GT(top * (1 + eps), hi);
    }
}

TEST(BuildGridProperty, CoversEveryPointFromBelow) {
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        RatioBounds b;
        for (int j = 0; j < 3; ++j) {
            const double lo = rng.uniform(0.1, 10);
            b.lower.push_back(lo);
            b.upper.push_back(lo * rng.uniform(1, 50));
        }
        b.last = 2;
        const double eps = rng.uniform(0.01, 1);
        const auto g = build_grid(b, eps);
        std::vector<double> chi(2);
        for (int j = 0; j < 2; ++j) chi[j] = rng.uniform(b.lower[j], b.upper[j]);
        bool found = false;
        for (std::size_t i = 0; i < g.size() && !found; ++i) {
            const auto nu = g.point(i);
            found = nu[0] <= chi[0] && chi[0] <= (1 + eps) * nu[0] && nu[1] <= chi[1] && chi[1] <= (1 + eps) * nu[1];
        }
        ASSERT_TRUE(found);
    }
}

TEST(SolveGridPoint, SymmetricBox) {
    const auto p = symmetric_problem();
    const GridSet g({0}, {{1.0}});
    const auto c = solve_grid_point(p, g, 1, std::vector<double>{1.0});
    ASSERT_TRUE(c);
    EXPECT_NEAR(c->psi, 2.0, 1e-12);
    EXPECT_NEAR(c->x[0], c->x[1], 1e-9);
    EXPECT_LE(p.terms[0].evaluate(c->x), 1.0 + 1e-9);
}

TEST(SolveGridPoint, BelowLowerBoundIsInfeasible) {
    const auto p = symmetric_problem();
    const GridSet g({0}, {{0.4}});
    EXPECT_FALSE(solve_grid_point(p, g, 1, std::vector<double>{0.4}));
}

TEST(SolveGridPoint, SingleRatioIsPlainMinimization) {
    SumOfRatiosProblem p;
    p.terms = {coord_ratio(0, 1)};
    p.region = box(1.0, 2.0);
    const auto c = solve_grid_point(p, GridSet{}, 0, std::vector<double>{});
    ASSERT_TRUE(c);
    EXPECT_NEAR(c->psi, 0.5, 1e-12);
}

TEST(SolveSor, SymmetricBoxReachesTwo) {
    const auto sol = solve_sor(symmetric_problem(), 0.01);
    EXPECT_LE(sol.objective, 2.0 * 1.01);
    EXPECT_GE(sol.true_objective, 2.0 - 1e-12);
    EXPECT_LE(sol.true_objective, sol.objective + 1e-9);
}

TEST(SolveSor, SinglePointRegion) {
    auto p = symmetric_problem();
    p.region = box(1.5, 1.5);
    const auto sol = solve_sor(p, 0.1);
    EXPECT_DOUBLE_EQ(sol.x[0], 1.5);
    EXPECT_DOUBLE_EQ(sol.x[1], 1.5);
    EXPECT_NEAR(sol.true_objective, 2.0, 1e-12);
}

TEST(SolveSor, RejectsPrecisionOutOfRange) {
    EXPECT_THROW((void)solve_sor(symmetric_problem(), 1.0), std::invalid_argument);
    EXPECT_THROW((void)solve_sor(symmetric_problem(), 0.0), std::invalid_argument);
}

// Minimum of the objective over a uniform n x n lattice of the bounding
// box, keeping only feasible points.
double dense_min(const SumOfRatiosProblem& p, double w_hi, double p_hi, int n) {
    double best = kInfinity;
    std::vector<double> x(2);
    for (int i = 0; i < n; ++i) {
        x[0] = 1.0 + (w_hi - 1.0) * i / (n - 1);
        for (int k = 0; k < n; ++k) {
            x[1] = 1.0 + (p_hi - 1.0) * k / (n - 1);
            if (p.region.violation(x) <= 0.0) best = std::min(best, p.evaluate(x));
        }
    }
    return best;
}

TEST(SolveSor, SyncToyJobAgainstDenseSampling) {
    auto job = testing::toy_job("d");
    job.worker_demand = {0, 1, 0, 0};
    job.ps_demand = {0, 0, 1, 0};
    job.resource_limit = {0, 4, 4, 0};
    const auto p = build_sor_problem(job, assemble_theta(job, job_overlap(job)));
    const double eps = 0.05;
    const auto sol = solve_sor(p, eps);
    EXPECT_LE(sol.objective, (1 + eps) * dense_min(p, 4.0, 4.0, 100));
}

struct RandomInstance {
    SumOfRatiosProblem problem;
    double w_hi = 1.0;
    double p_hi = 1.0;
};

RandomInstance random_instance(Rng& rng, SgdMode mode) {
    RandomInstance out;
    Theta theta;
    if (mode == SgdMode::Sync)
        theta = ThetaSync{rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 50), rng.uniform(0.1, 50),
                          rng.uniform(1, 200)};
    else
        theta = ThetaAsync{rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(1, 100), rng.uniform(1, 100)};
    auto job = testing::toy_job("r", mode);
    job.worker_demand = {0, rng.uniform(0.5, 3), rng.uniform(0.5, 3), 0};
    job.ps_demand = {0, rng.uniform(0.5, 3), rng.uniform(0.5, 3), 0};
    job.resource_limit = {0, rng.uniform(8, 40), rng.uniform(8, 40), 0};
    out.problem = build_sor_problem(job, theta);
    out.w_hi = out.p_hi = kInfinity;
    for (Resource r : {Resource::Cpu, Resource::Memory}) {
        out.w_hi = std::min(out.w_hi, (job.resource_limit[r] - job.ps_demand[r]) / job.worker_demand[r]);
        out.p_hi = std::min(out.p_hi, (job.resource_limit[r] - job.worker_demand[r]) / job.ps_demand[r]);
    }
    return out;
}

TEST(SolveSorProperty, ApproximationAgainstDenseSampling) {
    Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const auto inst = random_instance(rng, trial % 2 ? SgdMode::Async : SgdMode::Sync);
        const double oracle = dense_min(inst.problem, inst.w_hi, inst.p_hi, 1000);
        for (double eps : {0.5, 0.1, 0.01}) {
            const auto sol = solve_sor(inst.problem, eps);
            ASSERT_LE(sol.objective, (1 + eps) * oracle) << "trial " << trial << " eps " << eps;
        }
    }
}

TEST(SolveSorProperty, FeasibleAndSound) {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = random_instance(rng, trial % 2 ? SgdMode::Async : SgdMode::Sync);
        const auto& p = inst.problem;
        const auto sol = solve_sor(p, 0.1);
        ASSERT_TRUE(p.feasible(sol.x));
        ASSERT_LE(sol.true_objective, sol.objective * (1 + 1e-9));
        const auto grid = build_grid(ratio_bounds(p), 0.1);
        ASSERT_EQ(sol.nu.size(), grid.dimensions());
        for (std::size_t d = 0; d < grid.dimensions(); ++d)
            ASSERT_LE(p.terms[grid.terms()[d]].evaluate(sol.x), sol.nu[d] * (1 + 1e-9));
    }
}

TEST(SolveSorProperty, Deterministic) {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_instance(rng, SgdMode::Sync);
        const auto a = solve_sor(inst.problem, 0.05);
        const auto b = solve_sor(inst.problem, 0.05);
        ASSERT_EQ(a.x, b.x);
        ASSERT_EQ(a.objective, b.objective);
    }
}

TEST(RatioOfSumsProperty, BoundedBySumOfRatios) {
    Rng rng(34);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 6));
        std::vector<double> f(n), g(n);
        double ratios = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = rng.uniform(0, 10);
            g[i] = rng.uniform(1, 10);
            ratios += f[i] / g[i];
        }
        const double lhs = std::accumulate(f.begin(), f.end(), 0.0) / std::accumulate(g.begin(), g.end(), 0.0);
        ASSERT_LE(lhs, ratios * (1 + 1e-12));
    }
}

}  // namespace
}  // namespace smd
