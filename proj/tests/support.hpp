#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smd/model.hpp"
#include "smd/random.hpp"

namespace smd::testing {

inline std::vector<LayerTiming> layers(std::vector<double> b, std::vector<double> r, std::vector<double> f) {
    std::vector<LayerTiming> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = {b[j], f[j], r[j]};
    return out;
}

/// Integer-valued layer times in [0, hi]. BP and comm times are multiples
/// of `step`, and comm times are at least `min_comm_units` steps.
inline std::vector<LayerTiming> random_profile(Rng& rng, std::size_t n, long hi, long step = 1,
                                               long min_comm_units = 0) {
    std::vector<LayerTiming> out(n);
    const long units = hi / step;
    for (auto& l : out) {
        l.bp = static_cast<double>(rng.uniform_int(0, units) * step);
        l.comm = static_cast<double>(rng.uniform_int(min_comm_units, units) * step);
        l.fp = static_cast<double>(rng.uniform_int(0, hi));
    }
    return out;
}

/// A valid single-layer-group job with simple numbers; callers adjust fields.
inline JobSpec toy_job(const std::string& id, SgdMode mode = SgdMode::Sync) {
    JobSpec job;
    job.id = id;
    job.layers = {LayerProfile{1.0, 0.5, 0.5, std::nullopt}, LayerProfile{1.0, 0.5, 0.5, std::nullopt}};
    job.iterations = 10;
    job.global_batch = 10.0;
    job.minibatch = 2.0;
    job.model_bits = 4.0;
    job.bandwidth = 2.0;
    job.overhead_beta1 = 0.1;
    job.overhead_beta2 = 0.2;
    job.async_alpha = 0.5;
    job.sgd_mode = mode;
    job.worker_demand = {0, 1, 1, 0};
    job.ps_demand = {0, 1, 1, 0};
    job.resource_limit = {0, 8, 8, 0};
    job.utility = {10.0, 0.01, 100.0};
    return job;
}

}  // namespace smd::testing
