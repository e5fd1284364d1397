#include "smd/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smd/random.hpp"
#include "smd/speed.hpp"
#include "smd/sum_of_ratios.hpp"

namespace smd {

void SmdParams::validate() const {
    if (!(eps_inner > 0.0 && eps_inner < 1.0)) throw std::invalid_argument("eps1 must be in (0, 1)");
    if (!(eps_outer > 0.0 && eps_outer < 1.0)) throw std::invalid_argument("eps2 must be in (0, 1)");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
    if (retries < 1) throw std::invalid_argument("retries must be >= 1");
    if (m_delta && !(*m_delta > 0.0 && *m_delta <= 1.0)) throw std::invalid_argument("M_delta must be in (0, 1]");
}

namespace {

PackingConstraints job_packing(const JobSpec& job) {
    PackingConstraints packing(2);
    for (Resource r : kAllResources) {
        const double row[2] = {job.worker_demand[r], job.ps_demand[r]};
        packing.add_row(row, job.resource_limit[r]);
    }
    return packing;
}

double job_m_delta(const JobSpec& job, const SmdParams& params) {
    if (params.m_delta) return *params.m_delta;
    const auto packing = job_packing(job);
    return compute_m_delta(params.delta, packing.num_rows(), compute_w_b(packing));
}

}  // namespace

double allocation_utility(const JobSpec& job, const Allocation& alloc) {
    return utility_value(job.utility, completion_time(job, alloc));
}

InnerAllocation inner_allocate(const JobSpec& job, const SmdParams& params, std::uint64_t stream_seed) {
    params.validate();
    InnerAllocation out;
    if (!resource_feasible(job, Allocation{1, 1})) return out;

    const auto eta = job_overlap(job);
    const auto theta = assemble_theta(job, eta);
    const auto problem = build_sor_problem(job, theta);
    const auto relaxed = solve_sor(problem, params.eps_inner);
    out.relaxed_objective = theta_completion_time(theta, relaxed.x[0], relaxed.x[1]);

    const RoundingParams rounding{params.delta, params.retries, stream_seed, params.m_delta};
    const auto objective = [&theta](std::span<const long> x) {
        return theta_completion_time(theta, static_cast<double>(x[0]), static_cast<double>(x[1]));
    };
    const auto rounded = randomized_round(relaxed.x, job_packing(job), rounding, objective);
    out.m_delta = rounded.m_delta;
    out.outcome = rounded.outcome;
    if (rounded.outcome == RoundingOutcome::Unschedulable) return out;

    const Allocation alloc{rounded.x[0], rounded.x[1]};
    out.allocation = alloc;
    out.completion = completion_time(job, eta, alloc);
    out.utility = utility_value(job.utility, out.completion);
    return out;
}

long esw_scale(const JobSpec& job) {
    const auto pair = job.worker_demand + job.ps_demand;
    double ratio = kInfinity;
    for (Resource r : kAllResources)
        if (pair[r] > 0.0) ratio = std::min(ratio, job.resource_limit[r] / pair[r]);
    if (!std::isfinite(ratio)) throw std::invalid_argument("job '" + job.id + "' has zero demand");
    long k = static_cast<long>(std::floor(ratio));
    const auto fits = [&](long c) { return allocation_footprint(job, Allocation{c, c}).fits_within(job.resource_limit); };
    while (fits(k + 1)) ++k;
    while (k > 0 && !fits(k)) --k;
    return k;
}

std::optional<Allocation> optimus_allocation(const JobSpec& job) {
    Allocation cur{1, 1};
    if (!resource_feasible(job, cur)) return std::nullopt;
    double value = allocation_utility(job, cur);
    for (;;) {
        const Allocation more_workers{cur.workers + 1, cur.ps};
        const Allocation more_ps{cur.workers, cur.ps + 1};
        double gain_w = -kInfinity;
        double gain_p = -kInfinity;
        double u_w = 0.0;
        double u_p = 0.0;
        if (resource_feasible(job, more_workers)) {
            u_w = allocation_utility(job, more_workers);
            gain_w = u_w - value;
        }
        if (resource_feasible(job, more_ps)) {
            u_p = allocation_utility(job, more_ps);
            gain_p = u_p - value;
        }
        if (!(gain_w > 0.0) && !(gain_p > 0.0)) return cur;
        if (gain_w >= gain_p) {
            cur = more_workers;
            value = u_w;
        } else {
            cur = more_ps;
            value = u_p;
        }
    }
}

std::optional<Allocation> bruteforce_allocation(const JobSpec& job, const BruteforceCaps& caps) {
    if (!resource_feasible(job, Allocation{1, 1})) return std::nullopt;
    if (resource_feasible(job, Allocation{caps.max_workers + 1, 1}) ||
        resource_feasible(job, Allocation{1, caps.max_ps + 1}))
        throw CapsExceeded("job '" + job.id + "' can grow past the search caps");
    Allocation best{1, 1};
    double best_value = allocation_utility(job, best);
    for (long w = 1; w <= caps.max_workers; ++w) {
        for (long p = 1; p <= caps.max_ps; ++p) {
            const Allocation a{w, p};
            if (!resource_feasible(job, a)) continue;
            const double v = allocation_utility(job, a);
            if (v > best_value) {
                best_value = v;
                best = a;
            }
        }
    }
    return best;
}

Schedule admit(const Workload& workload, const std::vector<std::optional<Allocation>>& allocations,
               const std::vector<double>& utilities, double eps_outer, bool exact, std::string algorithm,
               std::uint64_t seed) {
    const auto& jobs = workload.jobs;
    if (allocations.size() != jobs.size() || utilities.size() != jobs.size())
        throw std::invalid_argument("one candidate per job required");

    MkpInstance mkp;
    mkp.epsilon = eps_outer;
    mkp.capacity.assign(workload.cluster.capacity.values().begin(), workload.cluster.capacity.values().end());
    std::vector<std::size_t> job_of_item;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!allocations[i] || !(utilities[i] > 0.0)) continue;
        mkp.utilities.push_back(utilities[i]);
        const auto& v = jobs[i].resource_limit.values();
        mkp.demands.emplace_back(v.begin(), v.end());
        job_of_item.push_back(i);
    }
    const auto result = exact ? solve_mkp_exact(mkp, std::max<std::size_t>(20, mkp.items()))
                              : solve_mkp_eps(mkp);

    Schedule s;
    s.algorithm = std::move(algorithm);
    s.seed = seed;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        s.jobs.push_back(ScheduledJob{jobs[i].id, false, allocations[i], allocations[i] ? utilities[i] : 0.0});
    for (auto item : result.selected) {
        const std::size_t i = job_of_item[item];
        s.jobs[i].admitted = true;
        s.used += allocation_footprint(jobs[i], *allocations[i]);
        s.specified += jobs[i].resource_limit;
    }
    return s;
}

Schedule schedule_smd(const Workload& workload, const SmdParams& params) {
    params.validate();
    std::vector<std::optional<Allocation>> allocs;
    std::vector<double> utils;
    for (const auto& job : workload.jobs) {
        const auto inner = inner_allocate(job, params, derive_stream_seed(params.seed, job.id));
        allocs.push_back(inner.allocation);
        utils.push_back(inner.utility);
    }
    return admit(workload, allocs, utils, params.eps_outer, false, "smd", params.seed);
}

Schedule schedule_esw(const Workload& workload, double eps_outer) {
    std::vector<std::optional<Allocation>> allocs;
    std::vector<double> utils;
    for (const auto& job : workload.jobs) {
        const long k = esw_scale(job);
        if (k < 1) {
            allocs.emplace_back();
            utils.push_back(0.0);
            continue;
        }
        allocs.emplace_back(Allocation{k, k});
        utils.push_back(allocation_utility(job, Allocation{k, k}));
    }
    return admit(workload, allocs, utils, eps_outer, false, "esw", 0);
}

Schedule schedule_optimus_greedy(const Workload& workload, double eps_outer) {
    std::vector<std::optional<Allocation>> allocs;
    std::vector<double> utils;
    for (const auto& job : workload.jobs) {
        const auto a = optimus_allocation(job);
        allocs.push_back(a);
        utils.push_back(a ? allocation_utility(job, *a) : 0.0);
    }
    return admit(workload, allocs, utils, eps_outer, false, "optimus", 0);
}

Schedule schedule_bruteforce(const Workload& workload, const BruteforceCaps& caps) {
    if (workload.jobs.size() > caps.max_jobs) throw CapsExceeded("workload has more jobs than the search cap");
    std::vector<std::optional<Allocation>> allocs;
    std::vector<double> utils;
    for (const auto& job : workload.jobs) {
        const auto a = bruteforce_allocation(job, caps);
        allocs.push_back(a);
        utils.push_back(a ? allocation_utility(job, *a) : 0.0);
    }
    return admit(workload, allocs, utils, 0.5, true, "bruteforce", 0);
}

double total_utility(const Schedule& schedule) {
    double total = 0.0;
    for (const auto& j : schedule.jobs)
        if (j.admitted) total += j.utility;
    return total;
}

bool schedule_feasible(const Workload& workload, const Schedule& schedule) {
    if (schedule.jobs.size() != workload.jobs.size()) return false;
    ResourceVector specified;
    for (std::size_t i = 0; i < workload.jobs.size(); ++i) {
        const auto& sj = schedule.jobs[i];
        if (!sj.admitted) continue;
        if (!sj.allocation || !resource_feasible(workload.jobs[i], *sj.allocation)) return false;
        specified += workload.jobs[i].resource_limit;
    }
    return specified.fits_within(workload.cluster.capacity);
}

double approximation_lower_bound(const Workload& workload, const std::vector<double>& optimal_completion,
                                 const SmdParams& params) {
    if (optimal_completion.size() != workload.jobs.size())
        throw std::invalid_argument("one optimal completion time per job required");
    double worst = 1.0;
    for (std::size_t i = 0; i < workload.jobs.size(); ++i) {
        const auto& job = workload.jobs[i];
        const double optimum = utility_value(job.utility, optimal_completion[i]);
        if (!(optimum > 0.0)) continue;
        const double factor = (1.0 + params.eps_inner) * (24.0 / job_m_delta(job, params) + 4.0) / params.delta;
        worst = std::min(worst, utility_value(job.utility, optimal_completion[i] * factor) / optimum);
    }
    return worst * (1.0 - params.eps_outer);
}

}  // namespace smd
