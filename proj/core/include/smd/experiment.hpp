#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "smd/scheduler.hpp"
#include "smd/workload.hpp"

namespace smd {

enum class Algorithm { Smd, Esw, Optimus, Bruteforce };

[[nodiscard]] std::string algorithm_name(Algorithm a);
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
    GeneratorSpec generator;
    /// When set, every repetition runs on this file instead of a generated workload.
    std::optional<std::filesystem::path> workload_path;
    std::vector<Algorithm> algorithms{Algorithm::Smd};
    SmdParams params;
    int repetitions = 1;
    BruteforceCaps caps;
    /// Fill the wall_ms column. Off by default so output is byte-stable.
    bool record_timing = false;

    void validate() const;
};

struct ExperimentRow {
    std::uint64_t seed = 0;
    std::string algorithm;
    std::size_t jobs = 0;
    std::optional<double> capacity_scale;
    double total_utility = 0.0;
    std::size_t admitted = 0;
    std::array<double, kResourceCount> used_ratio{};  // used / specified, 0 when nothing is specified
    std::optional<double> wall_ms;
    std::string status = "ok";
};

inline constexpr const char* kCsvHeader =
    "seed,algorithm,jobs,capacity_scale,total_utility,admitted,used_gpu_ratio,used_cpu_ratio,"
    "used_mem_ratio,used_storage_ratio,wall_ms,status";

/// Repetition r uses seed generator.seed + r (or params.seed + r with a
/// workload file) for both the workload and the SMD master seed. Rows come
/// out in (repetition, algorithm) order.
[[nodiscard]] std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

/// Row for one schedule.
[[nodiscard]] ExperimentRow summarize(const Schedule& schedule, std::uint64_t seed, std::size_t jobs,
                                      std::optional<double> capacity_scale);

}  // namespace smd
