#pragma once

#include <span>
#include <vector>

#include "smd/model.hpp"

namespace smd {

/// Start times of the wait-free model, indexed by layer (0-based, layer 1 first).
struct WaitFreeTimeline {
    std::vector<double> send_start;  // kappa_j
    std::vector<double> recv_start;  // s_j
    std::vector<double> fp_start;    // tau_j
    double total = 0.0;
};

/// Priority-based model. comm_end[j] == 0 marks a layer whose communication
/// completes no later than some lower-index layer's.
struct PriorityTimeline {
    std::vector<double> comm_end;  // e_j
    std::vector<double> fp_start;  // tau_j
    double total = 0.0;
};

/// Fractions of FP, BP and communication time left on the critical path.
struct OverlapCoefficients {
    double fp = 1.0;    // eta_1
    double bp = 1.0;    // eta_2
    double comm = 1.0;  // eta_3
    /// Per-sample time of the model the coefficients were attributed from.
    double per_sample_time = 0.0;
};

/// sum(b) + 2 sum(r) + sum(f).
[[nodiscard]] double sequential_time(std::span<const LayerTiming> layers);

[[nodiscard]] WaitFreeTimeline waitfree_timeline(std::span<const LayerTiming> layers);

/// Closed-form priority model with slice size `slice` (seconds).
///
/// Layer j > 1 that still has communication left when layer 1's BP ends
/// finishes at e_1 + sum_{k=2..j} r_k - sum_{k<j} b_k: the excess term is
/// already cumulative over layers 2..j, so it is appended to e_1 rather than
/// to the largest preceding e_k.
[[nodiscard]] PriorityTimeline priority_timeline(std::span<const LayerTiming> layers, double slice);

/// Per-sample time under `model`; `slice` is ignored unless model is Priority.
[[nodiscard]] double model_time(std::span<const LayerTiming> layers, OverlapModel model, double slice);

/// Event-driven reference simulation of one iteration.
///
/// BP runs contiguously from the last layer to the first. Gradients go out on
/// a send channel and parameters come back on an independent receive channel.
/// WaitFree serves whole layers non-preemptively in reverse layer order.
/// Priority serves the lowest-index ready layer one slice at a time, so a
/// higher-priority layer preempts at the next slice boundary; with slice == 0
/// preemption is immediate and a layer's parameters return as its gradients
/// leave. FP of layer j waits for FP of layer j-1 and for layer j's parameters.
[[nodiscard]] double simulate_timeline_oracle(std::span<const LayerTiming> layers,
                                              OverlapModel model, double slice);

/// Critical-path attribution of the per-sample time into FP, BP and
/// communication shares. See OverlapCoefficients.
[[nodiscard]] OverlapCoefficients overlap_coefficients(std::span<const LayerTiming> layers,
                                                       OverlapModel model, double slice);

}  // namespace smd
