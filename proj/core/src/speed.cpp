#include "smd/speed.hpp"

#include <cmath>
#include <stdexcept>

namespace smd {

SampleTimes sample_times(const JobSpec& job) {
    SampleTimes t;
    for (const auto& l : job.layer_timings()) {
        t.fp += l.fp;
        t.bp += l.bp;
        t.comm += 2.0 * l.comm;
    }
    return t;
}

OverlapCoefficients job_overlap(const JobSpec& job) {
    const auto layers = job.layer_timings();
    return overlap_coefficients(layers, job.training_mode.model, job.training_mode.slice);
}

Theta assemble_theta(const JobSpec& job, const OverlapCoefficients& eta) {
    const auto st = sample_times(job);
    const double e = static_cast<double>(job.iterations);
    const double g_over_b = job.model_bits / job.bandwidth;
    if (job.sgd_mode == SgdMode::Sync) {
        return ThetaSync{
            e * job.overhead_beta1,
            e * job.overhead_beta2,
            e * eta.bp * st.bp,
            2.0 * e * eta.comm * g_over_b,
            eta.fp * e * job.global_batch * st.fp,
        };
    }
    return ThetaAsync{
        e * job.overhead_beta1,
        e * job.overhead_beta2,
        e * (eta.fp * job.minibatch * st.fp + eta.bp * st.bp),
        2.0 * e * job.async_alpha * eta.comm * g_over_b,
    };
}

double iteration_time(const JobSpec& job, const OverlapCoefficients& eta, const Allocation& alloc) {
    if (alloc.workers < 1 || alloc.ps < 1)
        throw std::invalid_argument("allocation needs at least one worker and one PS");
    const auto st = sample_times(job);
    const double w = static_cast<double>(alloc.workers);
    const double p = static_cast<double>(alloc.ps);
    const bool sync = job.sgd_mode == SgdMode::Sync;
    const double batch = sync ? job.global_batch / w : job.minibatch;
    const double senders = sync ? w : job.async_alpha * w;
    const double comm = 2.0 * eta.comm * (job.model_bits / p) / (job.bandwidth / senders);
    return eta.fp * batch * st.fp + eta.bp * st.bp + comm + job.overhead_beta1 * w +
           job.overhead_beta2 * p;
}

double training_speed(const JobSpec& job, const OverlapCoefficients& eta, const Allocation& alloc) {
    const double tm = iteration_time(job, eta, alloc);
    return job.sgd_mode == SgdMode::Sync ? 1.0 / tm : static_cast<double>(alloc.workers) / tm;
}

double completion_time(const JobSpec& job, const OverlapCoefficients& eta, const Allocation& alloc) {
    return static_cast<double>(job.iterations) / training_speed(job, eta, alloc);
}

double completion_time(const JobSpec& job, const Allocation& alloc) {
    return completion_time(job, job_overlap(job), alloc);
}

double utility_value(const UtilityParams& params, double completion) {
    const double z = params.gamma2 * (completion - params.gamma3);
    // exp overflows to +inf past ~709, which yields exactly 0 here.
    return params.gamma1 / (1.0 + std::exp(z));
}

double theta_completion_time(const Theta& theta, double w, double p) {
    if (const auto* s = std::get_if<ThetaSync>(&theta))
        return s->t1 * w + s->t2 * p + s->t3 + s->t4 * w / p + s->t5 / w;
    const auto& a = std::get<ThetaAsync>(theta);
    return a.t1 + a.t2 * p / w + a.t3 / w + a.t4 / p;
}

}  // namespace smd
