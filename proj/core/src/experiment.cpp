#include "smd/experiment.hpp"

#include <chrono>
#include <stdexcept>

#include <fmt/format.h>

namespace smd {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Smd: return "smd";
        case Algorithm::Esw: return "esw";
        case Algorithm::Optimus: return "optimus";
        case Algorithm::Bruteforce: return "bruteforce";
    }
    return "smd";
}

Algorithm parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::Smd, Algorithm::Esw, Algorithm::Optimus, Algorithm::Bruteforce})
        if (algorithm_name(a) == name) return a;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    params.validate();
    if (!workload_path) generator.validate();
}

ExperimentRow summarize(const Schedule& schedule, std::uint64_t seed, std::size_t jobs,
                        std::optional<double> capacity_scale) {
    ExperimentRow row;
    row.seed = seed;
    row.algorithm = schedule.algorithm;
    row.jobs = jobs;
    row.capacity_scale = capacity_scale;
    for (const auto& j : schedule.jobs) {
        if (!j.admitted) continue;
        row.total_utility += j.utility;
        ++row.admitted;
    }
    for (std::size_t r = 0; r < kResourceCount; ++r) {
        const double spec = schedule.specified.at(r);
        row.used_ratio[r] = spec > 0.0 ? schedule.used.at(r) / spec : 0.0;
    }
    return row;
}

namespace {

Schedule run_one(Algorithm a, const Workload& w, const SmdParams& params, const BruteforceCaps& caps) {
    switch (a) {
        case Algorithm::Smd: return schedule_smd(w, params);
        case Algorithm::Esw: return schedule_esw(w, params.eps_outer);
        case Algorithm::Optimus: return schedule_optimus_greedy(w, params.eps_outer);
        case Algorithm::Bruteforce: return schedule_bruteforce(w, caps);
    }
    throw std::logic_error("unhandled algorithm");
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::optional<Workload> fixed;
    if (config.workload_path) fixed = load_workload(*config.workload_path);

    std::vector<ExperimentRow> rows;
    for (int rep = 0; rep < config.repetitions; ++rep) {
        const std::uint64_t base = fixed ? config.params.seed : config.generator.seed;
        const std::uint64_t seed = base + static_cast<std::uint64_t>(rep);
        Workload w;
        std::optional<double> scale;
        if (fixed) {
            w = *fixed;
        } else {
            auto spec = config.generator;
            spec.seed = seed;
            w = generate_workload(spec);
            if (!spec.capacity_fraction) scale = spec.capacity_scale;
        }
        auto params = config.params;
        params.seed = seed;
        for (auto a : config.algorithms) {
            const auto start = std::chrono::steady_clock::now();
            ExperimentRow row;
            try {
                row = summarize(run_one(a, w, params, config.caps), seed, w.jobs.size(), scale);
            } catch (const CapsExceeded&) {
                row.seed = seed;
                row.algorithm = algorithm_name(a);
                row.jobs = w.jobs.size();
                row.capacity_scale = scale;
                row.status = "skipped";
            }
            if (config.record_timing) {
                const auto elapsed = std::chrono::steady_clock::now() - start;
                row.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.seed, r.algorithm, r.jobs,
                           r.capacity_scale ? fmt::format("{}", *r.capacity_scale) : std::string(),
                           r.total_utility, r.admitted, r.used_ratio[0], r.used_ratio[1], r.used_ratio[2],
                           r.used_ratio[3], r.wall_ms ? fmt::format("{:.3f}", *r.wall_ms) : std::string(),
                           r.status);
    }
}

}  // namespace smd
