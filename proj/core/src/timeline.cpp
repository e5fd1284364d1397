#include "smd/timeline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace smd {
namespace {

void require_layers(std::span<const LayerTiming> layers) {
    if (layers.empty()) throw std::invalid_argument("layer list is empty");
}

double sum_bp(std::span<const LayerTiming> layers) {
    return std::accumulate(layers.begin(), layers.end(), 0.0,
                           [](double acc, const LayerTiming& l) { return acc + l.bp; });
}
double sum_fp(std::span<const LayerTiming> layers) {
    return std::accumulate(layers.begin(), layers.end(), 0.0,
                           [](double acc, const LayerTiming& l) { return acc + l.fp; });
}
double sum_comm(std::span<const LayerTiming> layers) {
    return std::accumulate(layers.begin(), layers.end(), 0.0,
                           [](double acc, const LayerTiming& l) { return acc + l.comm; });
}

// bp_end[j]: time layer j finishes BP, i.e. sum_{k>=j} b_k.
std::vector<double> bp_finish_times(std::span<const LayerTiming> layers) {
    const std::size_t n = layers.size();
    std::vector<double> out(n);
    double acc = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        acc += layers[j].bp;
        out[j] = acc;
    }
    return out;
}

double fp_chain(std::span<const LayerTiming> layers, std::span<const double> comm_done) {
    double tau = comm_done[0];
    for (std::size_t j = 1; j < layers.size(); ++j)
        tau = std::max(tau + layers[j - 1].fp, comm_done[j]);
    return tau + layers.back().fp;
}

double simulate_sequential(std::span<const LayerTiming> layers) {
    double time = 0.0;
    for (std::size_t j = layers.size(); j-- > 0;) time += layers[j].bp;
    for (std::size_t j = layers.size(); j-- > 0;) time += layers[j].comm;
    for (std::size_t j = layers.size(); j-- > 0;) time += layers[j].comm;
    for (const auto& l : layers) time += l.fp;
    return time;
}

double simulate_waitfree(std::span<const LayerTiming> layers) {
    const std::size_t n = layers.size();
    const auto ready = bp_finish_times(layers);
    std::vector<bool> sent(n, false);
    std::vector<double> send_end(n, 0.0);
    double send_free = 0.0;
    // Send channel: whenever free, take the highest-index layer that has
    // finished BP; idle until the next BP completion otherwise.
    std::size_t served = 0;
    while (served < n) {
        std::size_t pick = n;
        for (std::size_t j = n; j-- > 0;) {
            if (!sent[j] && ready[j] <= send_free) {
                pick = j;
                break;
            }
        }
        if (pick == n) {
            double next = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (!sent[j]) next = std::min(next, ready[j]);
            send_free = next;
            continue;
        }
        sent[pick] = true;
        send_free += layers[pick].comm;
        send_end[pick] = send_free;
        ++served;
    }
    // Receive channel: FIFO in send-completion order, one layer at a time.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return send_end[a] < send_end[b] || (send_end[a] == send_end[b] && a > b);
                     });
    std::vector<double> recv_end(n, 0.0);
    double recv_free = 0.0;
    for (std::size_t j : order) {
        recv_free = std::max(recv_free, send_end[j]) + layers[j].comm;
        recv_end[j] = recv_free;
    }
    return fp_chain(layers, recv_end);
}

double simulate_priority_fluid(std::span<const LayerTiming> layers) {
    const std::size_t n = layers.size();
    const auto ready = bp_finish_times(layers);
    std::vector<double> remaining(n);
    std::vector<double> done(n, 0.0);
    std::size_t open = 0;
    for (std::size_t j = 0; j < n; ++j) {
        remaining[j] = layers[j].comm;
        if (remaining[j] > 0.0)
            ++open;
        else
            done[j] = ready[j];
    }
    double time = 0.0;
    while (open > 0) {
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (remaining[j] > 0.0 && ready[j] <= time) {
                pick = j;
                break;
            }
        }
        if (pick == n) {
            double next = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (remaining[j] > 0.0) next = std::min(next, ready[j]);
            time = next;
            continue;
        }
        // Only a higher-priority arrival can interrupt the current layer.
        double preempt = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pick; ++k)
            if (remaining[k] > 0.0 && ready[k] > time) preempt = std::min(preempt, ready[k]);
        const double finish = time + remaining[pick];
        if (preempt < finish) {
            remaining[pick] -= preempt - time;
            time = preempt;
        } else {
            time = finish;
            remaining[pick] = 0.0;
            done[pick] = time;
            --open;
        }
    }
    return fp_chain(layers, done);
}

double simulate_priority_sliced(std::span<const LayerTiming> layers, double slice) {
    const std::size_t n = layers.size();
    const auto ready = bp_finish_times(layers);
    std::vector<double> remaining(n);
    std::vector<double> done(n, 0.0);
    std::size_t open = 0;
    for (std::size_t j = 0; j < n; ++j) {
        remaining[j] = layers[j].comm;
        if (remaining[j] > 0.0)
            ++open;
        else
            done[j] = ready[j];
    }
    double send_free = 0.0;
    double recv_free = 0.0;
    while (open > 0) {
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (remaining[j] > 0.0 && ready[j] <= send_free) {
                pick = j;
                break;
            }
        }
        if (pick == n) {
            double next = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (remaining[j] > 0.0) next = std::min(next, ready[j]);
            send_free = next;
            continue;
        }
        const double piece = std::min(slice, remaining[pick]);
        send_free += piece;
        remaining[pick] -= piece;
        // The slice's parameters come back once its gradients are out.
        recv_free = std::max(recv_free, send_free) + piece;
        if (remaining[pick] <= 0.0) {
            remaining[pick] = 0.0;
            done[pick] = recv_free;
            --open;
        }
    }
    return fp_chain(layers, done);
}

constexpr double kEtaTolerance = 1e-9;
constexpr double kMinEta = 1e-12;

double share(double part, double whole) {
    if (!(whole > 0.0)) return 1.0;
    double ratio = part / whole;
    if (ratio > 1.0 && ratio <= 1.0 + kEtaTolerance) ratio = 1.0;
    if (ratio < kMinEta) ratio = kMinEta;
    return ratio;
}

}  // namespace

double sequential_time(std::span<const LayerTiming> layers) {
    require_layers(layers);
    return sum_bp(layers) + 2.0 * sum_comm(layers) + sum_fp(layers);
}

WaitFreeTimeline waitfree_timeline(std::span<const LayerTiming> layers) {
    require_layers(layers);
    const std::size_t n = layers.size();
    const auto bp_end = bp_finish_times(layers);
    WaitFreeTimeline tl;
    tl.send_start.assign(n, 0.0);
    tl.recv_start.assign(n, 0.0);
    tl.fp_start.assign(n, 0.0);

    tl.send_start[n - 1] = layers[n - 1].bp;
    tl.recv_start[n - 1] = layers[n - 1].bp + layers[n - 1].comm;
    for (std::size_t j = n - 1; j-- > 0;) {
        tl.send_start[j] = std::max(bp_end[j], tl.send_start[j + 1] + layers[j + 1].comm);
        tl.recv_start[j] = std::max(tl.send_start[j] + layers[j].comm,
                                    tl.recv_start[j + 1] + layers[j + 1].comm);
    }
    tl.fp_start[0] = tl.recv_start[0] + layers[0].comm;
    for (std::size_t j = 1; j < n; ++j) tl.fp_start[j] = tl.fp_start[j - 1] + layers[j - 1].fp;
    tl.total = tl.fp_start[n - 1] + layers[n - 1].fp;
    return tl;
}

PriorityTimeline priority_timeline(std::span<const LayerTiming> layers, double slice) {
    require_layers(layers);
    if (!(slice >= 0.0)) throw std::invalid_argument("slice size must be >= 0");
    const std::size_t n = layers.size();
    PriorityTimeline tl;
    tl.comm_end.assign(n, 0.0);
    tl.fp_start.assign(n, 0.0);

    tl.comm_end[0] = sum_bp(layers) + layers[0].comm + slice;
    double comm_sum = 0.0;  // sum_{k=2..j} r_k
    double bp_sum = 0.0;    // sum_{k=1..j-1} b_k
    for (std::size_t j = 1; j < n; ++j) {
        comm_sum += layers[j].comm;
        bp_sum += layers[j - 1].bp;
        if (comm_sum > bp_sum) tl.comm_end[j] = tl.comm_end[0] + (comm_sum - bp_sum);
    }
    tl.fp_start[0] = tl.comm_end[0];
    for (std::size_t j = 1; j < n; ++j)
        tl.fp_start[j] = std::max(tl.fp_start[j - 1] + layers[j - 1].fp, tl.comm_end[j]);
    tl.total = tl.fp_start[n - 1] + layers[n - 1].fp;
    return tl;
}

double model_time(std::span<const LayerTiming> layers, OverlapModel model, double slice) {
    switch (model) {
        case OverlapModel::Sequential: return sequential_time(layers);
        case OverlapModel::WaitFree: return waitfree_timeline(layers).total;
        case OverlapModel::Priority: return priority_timeline(layers, slice).total;
    }
    throw std::invalid_argument("unknown overlap model");
}

double simulate_timeline_oracle(std::span<const LayerTiming> layers, OverlapModel model,
                                double slice) {
    require_layers(layers);
    switch (model) {
        case OverlapModel::Sequential: return simulate_sequential(layers);
        case OverlapModel::WaitFree: return simulate_waitfree(layers);
        case OverlapModel::Priority:
            if (!(slice >= 0.0)) throw std::invalid_argument("slice size must be >= 0");
            return slice > 0.0 ? simulate_priority_sliced(layers, slice)
                               : simulate_priority_fluid(layers);
    }
    throw std::invalid_argument("unknown overlap model");
}

OverlapCoefficients overlap_coefficients(std::span<const LayerTiming> layers, OverlapModel model,
                                         double slice) {
    require_layers(layers);
    const double total_fp = sum_fp(layers);
    const double total_bp = sum_bp(layers);
    const double total_comm = sum_comm(layers);
    if (!(total_fp > 0.0) && !(total_bp > 0.0) && !(total_comm > 0.0))
        throw std::invalid_argument("degenerate all-zero layer profile");

    OverlapCoefficients eta;
    double bp_share = total_bp;
    switch (model) {
        case OverlapModel::Sequential:
            eta.per_sample_time = sequential_time(layers);
            return eta;
        case OverlapModel::WaitFree: {
            const auto tl = waitfree_timeline(layers);
            const auto bp_end = bp_finish_times(layers);
            const std::size_t n = layers.size();
            eta.per_sample_time = tl.total;
            // Walk back from tau_1 = s_1 + r_1 along the binding max terms
            // until a BP-completion term binds.
            std::size_t j = 0;
            while (j + 1 < n && !(tl.send_start[j] + layers[j].comm >= tl.recv_start[j + 1] + layers[j + 1].comm))
                ++j;
            while (j + 1 < n && !(bp_end[j] >= tl.send_start[j + 1] + layers[j + 1].comm)) ++j;
            bp_share = bp_end[j];
            break;
        }
        case OverlapModel::Priority:
            // Every e_j builds on e_1 = sum(b) + r_1 + slice, so BP binds in full.
            eta.per_sample_time = priority_timeline(layers, slice).total;
            break;
    }
    const double comm_share = eta.per_sample_time - total_fp - bp_share;
    eta.fp = 1.0;
    eta.bp = share(bp_share, total_bp);
    eta.comm = share(comm_share, 2.0 * total_comm);
    return eta;
}

}  // namespace smd
