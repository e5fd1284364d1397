#include "smd/model.hpp"

#include <set>
#include <stdexcept>

namespace smd {

std::string_view resource_name(Resource r) noexcept {
    switch (r) {
        case Resource::Gpu: return "gpu";
        case Resource::Cpu: return "cpu";
        case Resource::Memory: return "memory";
        case Resource::Storage: return "storage";
    }
    return "?";
}

bool ResourceVector::nonnegative() const noexcept {
    for (double v : values_)
        if (!(v >= 0.0)) return false;
    return true;
}

bool ResourceVector::all_positive() const noexcept {
    for (double v : values_)
        if (!(v > 0.0)) return false;
    return true;
}

ResourceVector& ResourceVector::operator+=(const ResourceVector& o) noexcept {
    for (std::size_t i = 0; i < kResourceCount; ++i) values_[i] += o.values_[i];
    return *this;
}

ResourceVector& ResourceVector::operator-=(const ResourceVector& o) noexcept {
    for (std::size_t i = 0; i < kResourceCount; ++i) values_[i] -= o.values_[i];
    return *this;
}

ResourceVector& ResourceVector::operator*=(double k) noexcept {
    for (double& v : values_) v *= k;
    return *this;
}

bool ResourceVector::fits_within(const ResourceVector& limit) const noexcept {
    for (std::size_t i = 0; i < kResourceCount; ++i)
        if (values_[i] > limit.values_[i]) return false;
    return true;
}

std::vector<LayerTiming> JobSpec::layer_timings() const {
    std::vector<LayerTiming> out;
    out.reserve(layers.size());
    for (const auto& l : layers) {
        double comm = 0.0;
        if (l.comm_time)
            comm = *l.comm_time;
        else if (l.gradient_bits)
            comm = *l.gradient_bits / bandwidth;
        out.push_back({l.bp_time, l.fp_time, comm});
    }
    return out;
}

namespace {

void check_vector(std::vector<std::string>& errors, const ResourceVector& v, std::string_view what) {
    for (Resource r : kAllResources) {
        if (!(v[r] >= 0.0))
            errors.push_back("negative " + std::string(resource_name(r)) + " in " + std::string(what));
    }
}

}  // namespace

std::vector<std::string> validate_job(const JobSpec& job) {
    std::vector<std::string> errors;
    if (job.id.empty()) errors.emplace_back("empty job id");
    if (job.layers.empty()) errors.emplace_back("no layers");
    for (std::size_t j = 0; j < job.layers.size(); ++j) {
        const auto& l = job.layers[j];
        const std::string at = " at layer " + std::to_string(j + 1);
        if (!(l.bp_time >= 0.0)) errors.push_back("negative BP time" + at);
        if (!(l.fp_time >= 0.0)) errors.push_back("negative FP time" + at);
        if (l.comm_time && !(*l.comm_time >= 0.0)) errors.push_back("negative comm time" + at);
        if (l.gradient_bits && !(*l.gradient_bits >= 0.0))
            errors.push_back("negative gradient size" + at);
        if (!l.comm_time && !l.gradient_bits) errors.push_back("missing comm time and gradient size" + at);
    }
    if (job.iterations < 1) errors.emplace_back("iterations must be >= 1");
    if (job.sgd_mode == SgdMode::Sync && !(job.global_batch >= 1.0))
        errors.emplace_back("global batch must be >= 1");
    if (job.sgd_mode == SgdMode::Async && !(job.minibatch >= 1.0))
        errors.emplace_back("minibatch must be >= 1");
    if (!(job.model_bits > 0.0)) errors.emplace_back("model size must be > 0");
    if (!(job.bandwidth > 0.0)) errors.emplace_back("bandwidth must be > 0");
    if (!(job.overhead_beta1 >= 0.0)) errors.emplace_back("beta1 must be >= 0");
    if (!(job.overhead_beta2 >= 0.0)) errors.emplace_back("beta2 must be >= 0");
    if (!(job.async_alpha > 0.0 && job.async_alpha <= 1.0)) errors.emplace_back("alpha must be in (0,1]");
    if (job.training_mode.model == OverlapModel::Priority && !(job.training_mode.slice >= 0.0))
        errors.emplace_back("negative slice size");
    if (!(job.utility.gamma1 > 0.0)) errors.emplace_back("gamma1 must be > 0");
    if (!(job.utility.gamma2 > 0.0)) errors.emplace_back("gamma2 must be > 0");
    if (!(job.utility.gamma3 >= 0.0)) errors.emplace_back("gamma3 must be >= 0");
    check_vector(errors, job.worker_demand, "worker demand");
    check_vector(errors, job.ps_demand, "PS demand");
    check_vector(errors, job.resource_limit, "resource limit");
    // A zero demand vector would let that role grow without bound.
    if (!(job.worker_demand.gpu() + job.worker_demand.cpu() + job.worker_demand.memory() +
              job.worker_demand.storage() > 0.0))
        errors.emplace_back("worker demand must be positive in some resource");
    if (!(job.ps_demand.gpu() + job.ps_demand.cpu() + job.ps_demand.memory() + job.ps_demand.storage() > 0.0))
        errors.emplace_back("PS demand must be positive in some resource");
    if (!(job.worker_demand + job.ps_demand).fits_within(job.resource_limit))
        errors.emplace_back("no feasible (1,1) allocation");
    return errors;
}

std::vector<std::string> validate_workload(const Workload& workload) {
    std::vector<std::string> errors;
    if (!workload.cluster.capacity.all_positive())
        errors.emplace_back("cluster capacity must be positive in every resource");
    std::set<std::string> seen;
    for (const auto& job : workload.jobs) {
        if (!seen.insert(job.id).second) errors.push_back("duplicate job id '" + job.id + "'");
        for (auto& e : validate_job(job)) errors.push_back("job '" + job.id + "': " + e);
    }
    return errors;
}

ResourceVector allocation_footprint(const JobSpec& job, const Allocation& alloc) {
    return job.worker_demand * static_cast<double>(alloc.workers) +
           job.ps_demand * static_cast<double>(alloc.ps);
}

bool resource_feasible(const JobSpec& job, const Allocation& alloc) {
    if (alloc.workers < 1 || alloc.ps < 1)
        throw std::invalid_argument("allocation needs at least one worker and one PS");
    return allocation_footprint(job, alloc).fits_within(job.resource_limit);
}

}  // namespace smd
