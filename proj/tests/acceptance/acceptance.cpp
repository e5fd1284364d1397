// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Optional argument: path to the smd CLI,
// used for the byte-identical experiment check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "smd/experiment.hpp"
#include "smd/knapsack.hpp"
#include "smd/random.hpp"
#include "smd/rounding.hpp"
#include "smd/scheduler.hpp"
#include "smd/speed.hpp"
#include "smd/sum_of_ratios.hpp"
#include "smd/timeline.hpp"
#include "smd/workload.hpp"

namespace {

using namespace smd;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;  // 0 means no runtime limit
    std::function<Outcome()> run;
};

// Integer-valued profile, N <= 50. BP and comm times are positive multiples of
// the slice so the priority closed form is exact at that slice.
struct Profile {
    std::vector<LayerTiming> layers;
    double slice = 1.0;
};

std::vector<Profile> timeline_corpus() {
    Rng rng(20240601);
    std::vector<Profile> out(1000);
    for (auto& p : out) {
        const long n = rng.uniform_int(1, 50);
        const long slice = rng.uniform_int(1, 5);
        p.slice = static_cast<double>(slice);
        p.layers.resize(static_cast<std::size_t>(n));
        for (auto& l : p.layers) {
            l.bp = static_cast<double>(rng.uniform_int(1, 60) * slice);
            l.comm = static_cast<double>(rng.uniform_int(1, 60) * slice);
            l.fp = static_cast<double>(rng.uniform_int(1, 300));
        }
    }
    return out;
}

const std::vector<Profile>& corpus() {
    static const auto c = timeline_corpus();
    return c;
}

Outcome timeline_equivalence() {
    int mismatches = 0;
    for (const auto& p : corpus()) {
        const auto& l = p.layers;
        double sb = 0, sr = 0, sf = 0;
        for (const auto& x : l) {
            sb += x.bp;
            sr += x.comm;
            sf += x.fp;
        }
        if (sequential_time(l) != sb + 2 * sr + sf) ++mismatches;
        if (simulate_timeline_oracle(l, OverlapModel::Sequential, 0.0) != sb + 2 * sr + sf) ++mismatches;
        if (waitfree_timeline(l).total != simulate_timeline_oracle(l, OverlapModel::WaitFree, 0.0)) ++mismatches;
        if (priority_timeline(l, 0.0).total != simulate_timeline_oracle(l, OverlapModel::Priority, 0.0))
            ++mismatches;
        if (priority_timeline(l, p.slice).total != simulate_timeline_oracle(l, OverlapModel::Priority, p.slice))
            ++mismatches;
    }
    return {mismatches == 0, fmt::format("{} profiles, {} mismatches", corpus().size(), mismatches)};
}

Outcome overlap_identity() {
    double worst = 0.0;
    for (const auto& p : corpus()) {
        double sb = 0, sr = 0, sf = 0;
        for (const auto& x : p.layers) {
            sb += x.bp;
            sr += x.comm;
            sf += x.fp;
        }
        for (auto mode : {OverlapModel::Sequential, OverlapModel::WaitFree, OverlapModel::Priority}) {
            for (double phi : {0.0, p.slice}) {
                if (mode != OverlapModel::Priority && phi > 0.0) continue;
                const auto eta = overlap_coefficients(p.layers, mode, phi);
                const double t = model_time(p.layers, mode, phi);
                worst = std::max(worst, std::abs(eta.fp * sf + eta.bp * sb + 2 * eta.comm * sr - t) / t);
            }
        }
    }
    // Communication-dominant wait-free example with four equal layers: only
    // the last layer's BP is exposed, and one transfer is counted twice.
    std::vector<LayerTiming> l{{1, 1, 10}, {1, 1, 10}, {1, 1, 10}, {1, 1, 10}};
    const auto eta = overlap_coefficients(l, OverlapModel::WaitFree, 0.0);
    const double expect_bp = l[3].bp / (l[0].bp + l[1].bp + l[2].bp + l[3].bp);
    const double expect_comm =
        (2 * l[3].comm + l[2].comm + l[1].comm + l[0].comm) / (2 * (l[0].comm + l[1].comm + l[2].comm + l[3].comm));
    const bool example = std::abs(eta.bp - expect_bp) < 1e-12 && std::abs(eta.comm - expect_comm) < 1e-12;
    return {worst <= 1e-9 && example,
            fmt::format("max relative residual {:.3g}; example eta_bp={} eta_comm={}", worst, eta.bp, eta.comm)};
}

Outcome overlap_dominance() {
    int violations = 0;
    for (const auto& p : corpus()) {
        const double seq = sequential_time(p.layers);
        if (waitfree_timeline(p.layers).total > seq) ++violations;
        if (priority_timeline(p.layers, 0.0).total > seq) ++violations;
    }
    return {violations == 0, fmt::format("{} violations", violations)};
}

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

Outcome inner_quality() {
    GeneratorSpec g;
    g.jobs = 200;
    g.seed = 77;
    const auto w = generate_workload(g);
    Rng rng(78);
    int violations = 0;
    double worst = 0.0;
    for (auto job : w.jobs) {
        const double w_hi = static_cast<double>(rng.uniform_int(1, 20));
        const double p_hi = static_cast<double>(rng.uniform_int(1, 20));
        job.worker_demand = {0, 1, 0, 1};
        job.ps_demand = {0, 0, 1, 1};
        job.resource_limit = {0, w_hi, p_hi, std::max(2.0, std::floor(rng.uniform(0.5, 1.0) * (w_hi + p_hi)))};
        const auto problem = build_sor_problem(job, assemble_theta(job, job_overlap(job)));
        const double oracle = dense_min(problem, w_hi, p_hi, 1000);
        for (double eps : {0.5, 0.1, 0.01}) {
            const auto sol = solve_sor(problem, eps);
            worst = std::max(worst, sol.objective / oracle);
            if (!(sol.objective <= (1 + eps) * oracle)) ++violations;
        }
    }
    return {violations == 0,
            fmt::format("{} jobs x 3 precisions, {} violations, worst L/OPT_dense {:.6f}", w.jobs.size(), violations,
                        worst)};
}

Outcome rounding_checks() {
    const double m = compute_m_delta(0.5, 4, 6.0);
    const double x_bar = 4.3;
    const double target = m * x_bar;
    Rng rng(5);
    const std::vector<double> scaled{target};
    constexpr int trials = 100000;
    double sum = 0.0;
    for (int i = 0; i < trials; ++i) sum += static_cast<double>(round_once(scaled, rng)[0]);
    const double frac = target - std::floor(target);
    const double sigma = std::sqrt(frac * (1 - frac) / trials);
    const double mean = sum / trials;
    const bool unbiased = std::abs(mean - target) <= 3 * sigma;

    int infeasible = 0;
    Rng gen(6);
    for (int t = 0; t < 2000; ++t) {
        PackingConstraints c(2);
        for (int i = 0; i < 4; ++i) c.add_row(std::vector<double>{gen.uniform(0, 4), gen.uniform(0, 4)}, gen.uniform(2, 40));
        const std::vector<double> x{gen.uniform(1, 10), gen.uniform(1, 10)};
        const auto r = randomized_round(x, c, {gen.uniform(0.05, 1), 10, gen.next(), {}},
                                        [](std::span<const long> v) { return 1.0 / double(v[0]) + 1.0 / double(v[1]); });
        if (r.outcome == RoundingOutcome::Sampled && (!c.satisfied(r.x) || r.x[0] < 1 || r.x[1] < 1)) ++infeasible;
    }

    bool in_range = true;
    for (double delta : {0.01, 0.1, 0.5, 1.0})
        for (std::size_t rows = 1; rows <= 8; ++rows)
            for (double wb = 1e-3; wb <= 1e6; wb *= 3) {
                const double v = compute_m_delta(delta, rows, wb);
                in_range = in_range && v > 0.0 && v <= 1.0;
            }
    const double ref = compute_m_delta(1.0, 4, 3.0);
    const bool reference = std::abs(ref - 0.26196) <= 1e-4;
    return {unbiased && infeasible == 0 && in_range && reference,
            fmt::format("mean {:.5f} vs {:.5f} (3 sigma {:.5f}); {} infeasible outputs; M range ok={}; M(1,4,3)={:.6f}",
                        mean, target, 3 * sigma, infeasible, in_range, ref)};
}

Outcome mkp_quality() {
    Rng rng(61);
    int violations = 0;
    for (int t = 0; t < 500; ++t) {
        MkpInstance m;
        const long n = rng.uniform_int(1, 15);
        std::vector<double> total(4, 0.0);
        for (long i = 0; i < n; ++i) {
            m.utilities.push_back(rng.uniform(0.1, 100));
            std::vector<double> v(4);
            for (std::size_t k = 0; k < 4; ++k) total[k] += v[k] = rng.uniform(0, 10);
            m.demands.push_back(v);
        }
        for (std::size_t k = 0; k < 4; ++k) m.capacity.push_back(total[k] * rng.uniform(0.2, 0.8));
        m.epsilon = 0.01;
        const auto exact = solve_mkp_exact(m);
        const auto approx = solve_mkp_eps(m);
        if (!selection_fits(m, approx.selected) || approx.total_utility < (1 - m.epsilon) * exact.total_utility - 1e-9)
            ++violations;
    }
    return {violations == 0, fmt::format("500 instances, {} violations", violations)};
}

SmdParams reference_params(std::uint64_t seed) {
    SmdParams p;
    p.seed = seed;
    p.m_delta = 1.0;
    return p;
}

Outcome end_to_end_dominance() {
    int beats_both = 0;
    double sum_smd = 0, sum_esw = 0, sum_opt = 0;
    double worst_shortfall = 0.0;
    constexpr int seeds = 50;
    for (int s = 1; s <= seeds; ++s) {
        GeneratorSpec g;
        g.jobs = 10;
        g.seed = static_cast<std::uint64_t>(s);
        g.capacity_fraction = 0.5;
        const auto w = generate_workload(g);
        const double smd = total_utility(schedule_smd(w, reference_params(g.seed)));
        const double esw = total_utility(schedule_esw(w));
        const double opt = total_utility(schedule_optimus_greedy(w));
        if (smd >= esw && smd >= opt) ++beats_both;
        const double best = std::max(esw, opt);
        if (best > 0.0) worst_shortfall = std::max(worst_shortfall, (best - smd) / best);
        sum_smd += smd;
        sum_esw += esw;
        sum_opt += opt;
    }
    const double share = static_cast<double>(beats_both) / seeds;
    return {share >= 0.9 && sum_smd > sum_esw && sum_smd > sum_opt,
            fmt::format("SMD >= both baselines on {}/{} seeds; mean utility smd {:.4f} esw {:.4f} optimus {:.4f}; "
                        "largest relative shortfall {:.2g}",
                        beats_both, seeds, sum_smd / seeds, sum_esw / seeds, sum_opt / seeds, worst_shortfall)};
}

Outcome empirical_ratio() {
    const BruteforceCaps caps{8, 8, 10};
    int used = 0, below_bound = 0;
    double ratio_sum = 0.0, min_ratio = kInfinity, max_bound = 0.0;
    for (std::uint64_t seed = 1; used < 30 && seed < 1000; ++seed) {
        GeneratorSpec g;
        g.jobs = 10;
        g.seed = seed;
        g.limit_basis = LimitBasis::Footprint;
        g.limit_factor = {1, 4};
        g.capacity_fraction = 0.5;
        const auto w = generate_workload(g);
        Schedule opt;
        try {
            opt = schedule_bruteforce(w, caps);
        } catch (const CapsExceeded&) {
            continue;
        }
        if (!(total_utility(opt) > 0.0)) continue;
        ++used;
        const auto params = reference_params(seed);
        const double ratio = total_utility(schedule_smd(w, params)) / total_utility(opt);
        std::vector<double> tau;
        for (const auto& job : w.jobs) {
            const auto a = bruteforce_allocation(job, caps);
            tau.push_back(a ? completion_time(job, *a) : kInfinity);
        }
        const double bound = approximation_lower_bound(w, tau, params);
        max_bound = std::max(max_bound, bound);
        if (ratio < bound) ++below_bound;
        ratio_sum += ratio;
        min_ratio = std::min(min_ratio, ratio);
    }
    const double mean = used ? ratio_sum / used : 0.0;
    return {used == 30 && below_bound == 0 && mean >= 0.5,
            fmt::format("{} workloads; mean ratio {:.4f}, min {:.4f}; largest bound {:.3g}; {} below bound", used,
                        mean, min_ratio, max_bound, below_bound)};
}

ExperimentConfig report_config() {
    ExperimentConfig c;
    c.generator.jobs = 10;
    c.generator.seed = 100;
    c.generator.capacity_scale = 1.0;
    c.algorithms = {Algorithm::Smd, Algorithm::Esw, Algorithm::Optimus};
    c.repetitions = 5;
    c.params = reference_params(1);
    return c;
}

Outcome resource_report() {
    const auto rows = run_experiment(report_config());
    int over = 0;
    double cpu = 0.0;
    int smd_rows = 0;
    for (const auto& r : rows) {
        for (double v : r.used_ratio)
            if (v > 1.0) ++over;
        if (r.algorithm == "smd") {
            cpu += r.used_ratio[1];
            ++smd_rows;
        }
    }
    return {over == 0 && !rows.empty(),
            fmt::format("{} rows, {} ratios above 1; SMD mean used/specified cpu {:.3f}", rows.size(), over,
                        smd_rows ? cpu / smd_rows : 0.0)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string& cli) {
    const auto config = report_config();
    std::ostringstream a, b;
    write_csv(a, run_experiment(config));
    write_csv(b, run_experiment(config));
    bool same = a.str() == b.str() && !a.str().empty();
    std::string how = "in-process";
    if (!cli.empty()) {
        const auto dir = std::filesystem::temp_directory_path() / "smd_acceptance";
        std::filesystem::create_directories(dir);
        const auto first = dir / "first.csv";
        const auto second = dir / "second.csv";
        const std::string args = " experiment --jobs 10 --seed 100 --reps 3 --algo smd,esw,optimus --m-delta 1 --out ";
        const int rc1 = std::system((cli + args + first.string()).c_str());
        const int rc2 = std::system((cli + args + second.string()).c_str());
        const auto f1 = read_file(first);
        same = same && rc1 == 0 && rc2 == 0 && !f1.empty() && f1 == read_file(second);
        how = "in-process and CLI";
    }
    return {same, fmt::format("{} runs byte-identical: {}", how, same)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<Criterion> criteria{
        {1, "timeline equivalence", 10, timeline_equivalence},
        {2, "overlap identity", 0, overlap_identity},
        {3, "overlap dominance", 0, overlap_dominance},
        {4, "inner solver quality", 60, inner_quality},
        {5, "rounding", 0, rounding_checks},
        {6, "admission quality", 60, mkp_quality},
        {7, "end-to-end dominance", 300, end_to_end_dominance},
        {8, "empirical ratio", 0, empirical_ratio},
        {9, "resource frugality report", 0, resource_report},
        {10, "determinism", 0, [&] { return determinism(cli); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.pass;
        std::string timing = fmt::format("{:.1f} s", secs);
        if (c.budget_s > 0) {
            timing += fmt::format(" of {:.0f} s", c.budget_s);
            pass = pass && secs < c.budget_s;
        }
        if (!pass) ++failed;
        fmt::print("criterion {:>2} {} {}: {} [{}]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail, timing);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
