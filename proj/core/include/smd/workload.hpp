#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "smd/model.hpp"

namespace smd {

/// Malformed workload files and workloads that fail validation.
class WorkloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// How a job's resource limit v is derived.
enum class LimitBasis {
    Instance,   // v = theta * instance vector
    Footprint,  // v = theta * (O + G)
};

struct GeneratorSpec {
    std::size_t jobs = 10;
    std::uint64_t seed = 1;
    /// Cluster capacity as a multiple of `cluster_unit`.
    double capacity_scale = 1.0;
    /// When set, capacity is this fraction of the sum of job limits instead.
    std::optional<double> capacity_fraction;
    std::optional<SgdMode> sgd;
    std::optional<OverlapModel> mode;

    Range iterations{50, 200};
    Range model_mb{30, 575};
    Range minibatch{10, 100};
    Range batch_multiplier{1, 100};  // K = multiplier * m
    Range layers{10, 100};
    Range bp_ms{1, 300};
    Range fp_ms{1, 500};
    Range comm_ms{80, 500};
    Range bandwidth_gbps{5, 20};
    Range beta1{3, 4};
    Range beta2{0, 0.01};
    Range alpha{0.01, 1};
    Range gamma1{1, 100};
    Range gamma2{4, 6};
    Range gamma3{1, 15};
    Range limit_factor{1, 20};
    Range slice_ms{1, 50};

    /// Integer ranges for worker and PS demands; PSs use no GPU.
    Range worker_gpu{0, 4};
    Range task_cpu{1, 10};
    Range task_memory_gb{2, 32};
    Range task_storage_gb{5, 10};

    LimitBasis limit_basis = LimitBasis::Instance;
    ResourceVector instance{4, 36, 60, 20};
    ResourceVector cluster_unit{600, 3400, 1400, 1200};

    /// gamma2 and gamma3 are drawn in units of the job's completion time at
    /// (1,1) divided by this, then converted to seconds.
    double utility_time_divisor = 16.0;

    /// Throws std::invalid_argument on empty or inverted ranges.
    void validate() const;
};

/// Deterministic under spec.seed. Every job passes validate_job.
[[nodiscard]] Workload generate_workload(const GeneratorSpec& spec);

[[nodiscard]] nlohmann::json workload_to_json(const Workload& workload);
/// Throws WorkloadError on schema or validation failure.
[[nodiscard]] Workload workload_from_json(const nlohmann::json& doc);

void save_workload(const Workload& workload, const std::filesystem::path& path);
[[nodiscard]] Workload load_workload(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace smd
