#include "smd/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smd/lp.hpp"

namespace smd {

void MkpInstance::validate() const {
    if (demands.size() != utilities.size()) throw std::invalid_argument("one demand vector per item required");
    for (const auto& d : demands) {
        if (d.size() != capacity.size()) throw std::invalid_argument("demand dimension mismatch");
        for (double v : d)
            if (!(v >= 0.0)) throw std::invalid_argument("demands must be nonnegative");
    }
    for (double c : capacity)
        if (!(c >= 0.0)) throw std::invalid_argument("capacity must be nonnegative");
}

namespace {

std::vector<double> usage(const MkpInstance& inst, const std::vector<std::size_t>& selected) {
    std::vector<double> used(inst.dimensions(), 0.0);
    for (auto i : selected)
        for (std::size_t r = 0; r < inst.dimensions(); ++r) used[r] += inst.demands[i][r];
    return used;
}

bool fits(const MkpInstance& inst, const std::vector<double>& used) {
    for (std::size_t r = 0; r < inst.dimensions(); ++r)
        if (used[r] > inst.capacity[r]) return false;
    return true;
}

AdmissionResult make_result(const MkpInstance& inst, std::vector<std::size_t> selected) {
    AdmissionResult out;
    std::sort(selected.begin(), selected.end());
    for (auto i : selected) out.total_utility += inst.utilities[i];
    const auto used = usage(inst, selected);
    out.residual.resize(inst.dimensions());
    for (std::size_t r = 0; r < inst.dimensions(); ++r) out.residual[r] = inst.capacity[r] - used[r];
    out.selected = std::move(selected);
    return out;
}

// Keeps the incumbent unless the candidate is strictly better, or equal and
// lexicographically smaller.
struct Incumbent {
    std::vector<std::size_t> selected;
    double value = 0.0;

    void offer(std::vector<std::size_t> cand, double v) {
        std::sort(cand.begin(), cand.end());
        if (v > value || (v == value && cand < selected)) {
            value = v;
            selected = std::move(cand);
        }
    }
};

double sum_utility(const MkpInstance& inst, const std::vector<std::size_t>& s) {
    double total = 0.0;
    for (auto i : s) total += inst.utilities[i];
    return total;
}

// max u^T y over free items y in [0,1] with demands <= residual.
std::optional<LpSolution> free_relaxation(const MkpInstance& inst, const std::vector<std::size_t>& free,
                                          const std::vector<double>& residual) {
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    if (free.empty()) return sol;
    LinearProgram lp(free.size());
    std::vector<double> c(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        c[k] = -inst.utilities[free[k]];
        lp.set_bounds(k, 0.0, 1.0);
    }
    lp.set_objective(c);
    std::vector<double> row(free.size());
    for (std::size_t r = 0; r < inst.dimensions(); ++r) {
        for (std::size_t k = 0; k < free.size(); ++k) row[k] = inst.demands[free[k]][r];
        lp.add_row(row, std::max(residual[r], 0.0));
    }
    sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    sol.objective = -sol.objective;
    return sol;
}

}  // namespace

bool selection_fits(const MkpInstance& instance, const std::vector<std::size_t>& selected) {
    return fits(instance, usage(instance, selected));
}

std::vector<std::size_t> dominated_by(const MkpInstance& instance, const std::vector<std::size_t>& fixed) {
    std::vector<std::size_t> out;
    if (fixed.empty()) return out;
    double floor_u = instance.utilities[fixed.front()];
    for (auto i : fixed) floor_u = std::min(floor_u, instance.utilities[i]);
    for (std::size_t t = 0; t < instance.items(); ++t) {
        if (std::find(fixed.begin(), fixed.end(), t) != fixed.end()) continue;
        if (instance.utilities[t] > floor_u) out.push_back(t);
    }
    return out;
}

std::optional<FixedRelaxation> lp_relaxation_fixed(const MkpInstance& instance,
                                                   const std::vector<std::size_t>& fixed) {
    instance.validate();
    const auto used = usage(instance, fixed);
    if (!fits(instance, used)) return std::nullopt;
    const auto excluded = dominated_by(instance, fixed);
    std::vector<bool> pinned(instance.items(), false);
    for (auto i : fixed) pinned[i] = true;
    for (auto t : excluded) pinned[t] = true;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < instance.items(); ++i)
        if (!pinned[i]) free.push_back(i);

    std::vector<double> residual(instance.dimensions());
    for (std::size_t r = 0; r < instance.dimensions(); ++r) residual[r] = instance.capacity[r] - used[r];
    const auto sol = free_relaxation(instance, free, residual);
    if (!sol) return std::nullopt;

    FixedRelaxation out;
    out.x.assign(instance.items(), 0.0);
    for (auto i : fixed) out.x[i] = 1.0;
    for (std::size_t k = 0; k < free.size(); ++k) out.x[free[k]] = sol->x[k];
    out.value = sum_utility(instance, fixed) + (free.empty() ? 0.0 : sol->objective);
    return out;
}

AdmissionResult solve_mkp_eps(const MkpInstance& instance, std::optional<std::size_t> max_fixed) {
    instance.validate();
    if (!(instance.epsilon > 0.0 && instance.epsilon < 1.0))
        throw std::invalid_argument("epsilon must be in (0, 1)");

    // Work on the items that can ever help, keeping original indices.
    MkpInstance reduced;
    reduced.capacity = instance.capacity;
    reduced.epsilon = instance.epsilon;
    std::vector<std::size_t> original;
    for (std::size_t i = 0; i < instance.items(); ++i) {
        if (!(instance.utilities[i] > 0.0)) continue;
        reduced.utilities.push_back(instance.utilities[i]);
        reduced.demands.push_back(instance.demands[i]);
        original.push_back(i);
    }
    const std::size_t n = reduced.items();
    const auto ratio_cap = static_cast<std::size_t>(
        std::ceil(static_cast<double>(reduced.dimensions()) / reduced.epsilon));
    const std::size_t k = std::min(n, max_fixed.value_or(ratio_cap));

    Incumbent best;
    std::vector<std::size_t> fixed;

    auto evaluate = [&] {
        // Utility of S plus every item LP(S) leaves free bounds the rounded
        // value; skip the LP when even that cannot reach the incumbent.
        if (!fixed.empty()) {
            double floor_u = reduced.utilities[fixed.front()];
            for (auto i : fixed) floor_u = std::min(floor_u, reduced.utilities[i]);
            double bound = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool in_s = std::find(fixed.begin(), fixed.end(), i) != fixed.end();
                if (in_s || reduced.utilities[i] <= floor_u) bound += reduced.utilities[i];
            }
            if (bound < best.value * (1.0 - 1e-12)) return;
        }
        const auto relax = lp_relaxation_fixed(reduced, fixed);
        if (!relax) return;
        std::vector<std::size_t> chosen;
        for (std::size_t i = 0; i < n; ++i)
            if (relax->x[i] >= 1.0 - 1e-9) chosen.push_back(original[i]);
        // Floors of a basic solution fit by construction; the exact check
        // guards against a 1 - 1e-9 coordinate being promoted too far.
        if (!selection_fits(instance, chosen)) {
            chosen.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (relax->x[i] == 1.0) chosen.push_back(original[i]);
            if (!selection_fits(instance, chosen)) return;
        }
        best.offer(chosen, sum_utility(instance, chosen));
    };

    // Depth-first over index sets in lexicographic order; a set that does
    // not fit has no fitting superset, so its subtree is skipped.
    auto visit = [&](auto&& self, std::size_t start, const std::vector<double>& used) -> void {
        evaluate();
        if (fixed.size() == k) return;
        for (std::size_t i = start; i < n; ++i) {
            auto next = used;
            for (std::size_t r = 0; r < reduced.dimensions(); ++r) next[r] += reduced.demands[i][r];
            if (!fits(reduced, next)) continue;
            fixed.push_back(i);
            self(self, i + 1, next);
            fixed.pop_back();
        }
    };
    visit(visit, 0, std::vector<double>(reduced.dimensions(), 0.0));
    return make_result(instance, best.selected);
}

AdmissionResult solve_mkp_exact(const MkpInstance& instance, std::size_t size_cap) {
    instance.validate();
    if (instance.items() > size_cap) throw std::invalid_argument("instance exceeds the exact solver's size cap");
    const std::size_t n = instance.items();
    const std::size_t dims = instance.dimensions();

    Incumbent best;
    std::vector<std::size_t> chosen;

    auto visit = [&](auto&& self, std::size_t i, const std::vector<double>& used, double value) -> void {
        std::vector<std::size_t> rest;
        for (std::size_t t = i; t < n; ++t)
            if (instance.utilities[t] > 0.0) rest.push_back(t);
        if (rest.empty()) {
            best.offer(chosen, value);
            return;
        }
        std::vector<double> residual(dims);
        for (std::size_t r = 0; r < dims; ++r) residual[r] = instance.capacity[r] - used[r];
        const auto bound = free_relaxation(instance, rest, residual);
        // Slack keeps ties alive for the lexicographic rule.
        if (bound && value + bound->objective < best.value - 1e-9 * std::max(1.0, best.value)) return;

        const std::size_t item = rest.front();
        auto next = used;
        for (std::size_t r = 0; r < dims; ++r) next[r] += instance.demands[item][r];
        if (fits(instance, next)) {
            chosen.push_back(item);
            self(self, item + 1, next, value + instance.utilities[item]);
            chosen.pop_back();
        }
        self(self, item + 1, used, value);
    };
    visit(visit, 0, std::vector<double>(dims, 0.0), 0.0);
    return make_result(instance, best.selected);
}

}  // namespace smd
