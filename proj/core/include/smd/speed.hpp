#pragma once

#include <variant>

#include "smd/model.hpp"
#include "smd/timeline.hpp"

namespace smd {

/// Coefficients of the synchronous completion time
/// t1*w + t2*p + t3 + t4*w/p + t5/w (seconds).
struct ThetaSync {
    double t1 = 0.0;  // E*beta1
    double t2 = 0.0;  // E*beta2
    double t3 = 0.0;  // E*eta2*t_b
    double t4 = 0.0;  // 2*E*eta3*g/B
    double t5 = 0.0;  // eta1*E*K*t_f

    friend bool operator==(const ThetaSync&, const ThetaSync&) = default;
};

/// Coefficients of the asynchronous completion time
/// t1 + t2*p/w + t3/w + t4/p (seconds).
struct ThetaAsync {
    double t1 = 0.0;  // E*beta1
    double t2 = 0.0;  // E*beta2
    double t3 = 0.0;  // E*(eta1*m*t_f + eta2*t_b)
    double t4 = 0.0;  // 2*E*alpha*eta3*g/B

    friend bool operator==(const ThetaAsync&, const ThetaAsync&) = default;
};

using Theta = std::variant<ThetaSync, ThetaAsync>;

/// Per-sample totals t_f = sum f, t_b = sum b, t_r = 2 sum r.
struct SampleTimes {
    double fp = 0.0;
    double bp = 0.0;
    double comm = 0.0;
};

[[nodiscard]] SampleTimes sample_times(const JobSpec& job);

/// Overlap coefficients for the job's own training mode.
[[nodiscard]] OverlapCoefficients job_overlap(const JobSpec& job);

[[nodiscard]] Theta assemble_theta(const JobSpec& job, const OverlapCoefficients& eta);

/// Per-iteration time t_m of one worker, in seconds.
///
/// Parameters are split evenly over identical PSs, so every PS sees the same
/// load and the max over PSs is the common value. Sync uses a local batch of
/// K/w (real-valued) with all w workers sending concurrently; Async uses the
/// fixed minibatch m with alpha*w concurrent senders.
[[nodiscard]] double iteration_time(const JobSpec& job, const OverlapCoefficients& eta,
                                    const Allocation& alloc);

/// Iterations per second: 1/t_m (Sync) or w/t_m (Async).
[[nodiscard]] double training_speed(const JobSpec& job, const OverlapCoefficients& eta,
                                    const Allocation& alloc);

[[nodiscard]] double completion_time(const JobSpec& job, const OverlapCoefficients& eta,
                                     const Allocation& alloc);

/// Convenience overload using job_overlap(job).
[[nodiscard]] double completion_time(const JobSpec& job, const Allocation& alloc);

/// gamma1 / (1 + exp(gamma2 * (completion - gamma3))). Saturates to 0 or
/// gamma1 when the exponent overflows.
[[nodiscard]] double utility_value(const UtilityParams& params, double completion);

/// Completion time evaluated from theta at a real-valued (w, p).
[[nodiscard]] double theta_completion_time(const Theta& theta, double workers, double ps);

}  // namespace smd
