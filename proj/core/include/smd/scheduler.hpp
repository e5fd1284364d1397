#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smd/knapsack.hpp"
#include "smd/model.hpp"
#include "smd/rounding.hpp"

namespace smd {

struct SmdParams {
    double eps_inner = 0.01;  // grid precision of the relaxed inner problem
    double eps_outer = 0.01;  // admission precision
    double delta = 1.0;
    int retries = 10;
    std::uint64_t seed = 1;
    /// Replaces the computed rounding scale factor when set.
    std::optional<double> m_delta;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct InnerAllocation {
    std::optional<Allocation> allocation;  // nullopt when the job is unschedulable
    double utility = 0.0;
    double completion = 0.0;
    double relaxed_objective = 0.0;  // continuous completion time at the relaxed optimum
    double m_delta = 1.0;
    RoundingOutcome outcome = RoundingOutcome::Unschedulable;
};

struct BruteforceCaps {
    long max_workers = 10;
    long max_ps = 10;
    std::size_t max_jobs = 12;
};

/// Thrown by schedule_bruteforce when a workload lies outside its caps.
class CapsExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relax, solve the relaxation on the grid, round with the job's own stream.
[[nodiscard]] InnerAllocation inner_allocate(const JobSpec& job, const SmdParams& params,
                                             std::uint64_t stream_seed);

/// Utility of the job at an integral allocation.
[[nodiscard]] double allocation_utility(const JobSpec& job, const Allocation& alloc);

/// Largest k with k*(O+G) <= v; 0 when even k = 1 does not fit.
[[nodiscard]] long esw_scale(const JobSpec& job);

/// Hill-climb from (1,1) by one worker or one PS, taking the larger positive
/// utility gain (worker on ties). nullopt when (1,1) does not fit.
[[nodiscard]] std::optional<Allocation> optimus_allocation(const JobSpec& job);

/// Best (w, p) by enumeration within the caps; nullopt when (1,1) does not fit.
/// Throws CapsExceeded when the job could grow past a cap.
[[nodiscard]] std::optional<Allocation> bruteforce_allocation(const JobSpec& job, const BruteforceCaps& caps);

/// Admission over the per-job candidates, shared by every algorithm. Jobs
/// without an allocation or with zero utility are never admitted.
[[nodiscard]] Schedule admit(const Workload& workload, const std::vector<std::optional<Allocation>>& allocations,
                             const std::vector<double>& utilities, double eps_outer, bool exact,
                             std::string algorithm, std::uint64_t seed);

[[nodiscard]] Schedule schedule_smd(const Workload& workload, const SmdParams& params);
[[nodiscard]] Schedule schedule_esw(const Workload& workload, double eps_outer = 0.01);
[[nodiscard]] Schedule schedule_optimus_greedy(const Workload& workload, double eps_outer = 0.01);
[[nodiscard]] Schedule schedule_bruteforce(const Workload& workload, const BruteforceCaps& caps = {});

[[nodiscard]] double total_utility(const Schedule& schedule);

/// Every admitted allocation fits its job limit and the admitted limits fit the cluster.
[[nodiscard]] bool schedule_feasible(const Workload& workload, const Schedule& schedule);

/// Lower bound on total_utility(SMD) / total_utility(optimum) from the
/// per-job optimal completion times, for the given parameters.
///
/// Each job's utility at the rounded allocation is bounded below by its
/// utility at tau* times the inner factor (1+eps_inner)(24/M_delta + 4)/delta,
/// so the bound is (1 - eps_outer) times the worst per-job utility ratio.
[[nodiscard]] double approximation_lower_bound(const Workload& workload,
                                               const std::vector<double>& optimal_completion,
                                               const SmdParams& params);

}  // namespace smd
