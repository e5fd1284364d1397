#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smd {

enum class Resource : std::size_t { Gpu = 0, Cpu = 1, Memory = 2, Storage = 3 };

inline constexpr std::size_t kResourceCount = 4;
inline constexpr std::array<Resource, kResourceCount> kAllResources = {
    Resource::Gpu, Resource::Cpu, Resource::Memory, Resource::Storage};

std::string_view resource_name(Resource r) noexcept;

/// Nonnegative quantities over {GPU, vCPU, memory GB, storage GB}.
///
/// Ordering is component-wise, so `a <= b` is a partial order: two vectors
/// may be incomparable.
class ResourceVector {
public:
    constexpr ResourceVector() = default;
    constexpr ResourceVector(double gpu, double cpu, double memory_gb, double storage_gb)
        : values_{gpu, cpu, memory_gb, storage_gb} {}

    [[nodiscard]] constexpr double operator[](Resource r) const noexcept {
        return values_[static_cast<std::size_t>(r)];
    }
    [[nodiscard]] constexpr double& operator[](Resource r) noexcept {
        return values_[static_cast<std::size_t>(r)];
    }
    [[nodiscard]] constexpr double at(std::size_t i) const { return values_.at(i); }

    [[nodiscard]] constexpr double gpu() const noexcept { return values_[0]; }
    [[nodiscard]] constexpr double cpu() const noexcept { return values_[1]; }
    [[nodiscard]] constexpr double memory() const noexcept { return values_[2]; }
    [[nodiscard]] constexpr double storage() const noexcept { return values_[3]; }

    [[nodiscard]] const std::array<double, kResourceCount>& values() const noexcept {
        return values_;
    }

    [[nodiscard]] bool nonnegative() const noexcept;
    [[nodiscard]] bool all_positive() const noexcept;

    ResourceVector& operator+=(const ResourceVector& o) noexcept;
    ResourceVector& operator-=(const ResourceVector& o) noexcept;
    ResourceVector& operator*=(double k) noexcept;

    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) noexcept {
        return a += b;
    }
    friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) noexcept {
        return a -= b;
    }
    friend ResourceVector operator*(ResourceVector a, double k) noexcept { return a *= k; }
    friend ResourceVector operator*(double k, ResourceVector a) noexcept { return a *= k; }

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

    /// Component-wise `<=`.
    [[nodiscard]] bool fits_within(const ResourceVector& limit) const noexcept;

private:
    std::array<double, kResourceCount> values_{};
};

/// Per-sample timing of one layer. Times in seconds, sizes in bits.
struct LayerProfile {
    double bp_time = 0.0;
    double fp_time = 0.0;
    std::optional<double> comm_time;
    std::optional<double> gradient_bits;

    friend bool operator==(const LayerProfile&, const LayerProfile&) = default;
};

/// Resolved layer times consumed by the timeline models.
struct LayerTiming {
    double bp = 0.0;
    double fp = 0.0;
    double comm = 0.0;
};

enum class SgdMode { Sync, Async };

enum class OverlapModel { Sequential, WaitFree, Priority };

struct TrainingMode {
    OverlapModel model = OverlapModel::Sequential;
    double slice = 0.0;  // seconds; only meaningful for Priority

    friend bool operator==(const TrainingMode&, const TrainingMode&) = default;
};

/// Sigmoid utility gamma1 / (1 + exp(gamma2 * (t - gamma3))), t in seconds.
struct UtilityParams {
    double gamma1 = 1.0;
    double gamma2 = 1.0;  // per second
    double gamma3 = 0.0;  // seconds

    friend bool operator==(const UtilityParams&, const UtilityParams&) = default;
};

struct JobSpec {
    std::string id;
    std::vector<LayerProfile> layers;
    long iterations = 1;
    double global_batch = 1.0;  // K, used by Sync
    double minibatch = 1.0;     // m, used by Async
    double model_bits = 1.0;
    double bandwidth = 1.0;  // bits per second
    double overhead_beta1 = 0.0;
    double overhead_beta2 = 0.0;
    double async_alpha = 1.0;
    TrainingMode training_mode;
    SgdMode sgd_mode = SgdMode::Sync;
    ResourceVector worker_demand;
    ResourceVector ps_demand;
    ResourceVector resource_limit;
    UtilityParams utility;

    /// Layer times with missing comm times derived as gradient_bits / bandwidth.
    [[nodiscard]] std::vector<LayerTiming> layer_timings() const;

    friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

struct ClusterSpec {
    ResourceVector capacity;

    friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

struct Allocation {
    long workers = 1;
    long ps = 1;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Workload {
    std::vector<JobSpec> jobs;
    ClusterSpec cluster;

    friend bool operator==(const Workload&, const Workload&) = default;
};

struct ScheduledJob {
    std::string job_id;
    bool admitted = false;
    std::optional<Allocation> allocation;
    double utility = 0.0;
};

struct Schedule {
    std::string algorithm;
    unsigned long long seed = 0;
    std::vector<ScheduledJob> jobs;
    /// Sum of O*w + G*p over admitted jobs.
    ResourceVector used;
    /// Sum of the user-specified limits v over admitted jobs.
    ResourceVector specified;
};

/// Every violated JobSpec invariant, as human-readable messages. Empty means valid.
[[nodiscard]] std::vector<std::string> validate_job(const JobSpec& job);

/// Errors for the workload as a whole (cluster capacity, duplicate ids) plus
/// every job error prefixed with the job id.
[[nodiscard]] std::vector<std::string> validate_workload(const Workload& workload);

/// Resource footprint O*w + G*p of an allocation.
[[nodiscard]] ResourceVector allocation_footprint(const JobSpec& job, const Allocation& alloc);

/// True iff O^r*w + G^r*p <= v^r for every resource type.
[[nodiscard]] bool resource_feasible(const JobSpec& job, const Allocation& alloc);

}  // namespace smd
