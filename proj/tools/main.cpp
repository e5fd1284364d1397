// Command-line front end: workload generation, scheduling and experiments.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "smd/experiment.hpp"
#include "smd/scheduler.hpp"
#include "smd/speed.hpp"
#include "smd/timeline.hpp"
#include "smd/workload.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

struct SmdFlags {
    double eps1 = 0.01;
    double eps2 = 0.01;
    double delta = 1.0;
    int retries = 10;
    std::uint64_t seed = 1;
    std::optional<double> m_delta;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps1", eps1, "inner grid precision, in (0,1)")->capture_default_str();
        cmd->add_option("--eps2", eps2, "admission precision, in (0,1)")->capture_default_str();
        cmd->add_option("--delta", delta, "rounding failure parameter, in (0,1]")->capture_default_str();
        cmd->add_option("--retries", retries, "rounding attempts per job")->capture_default_str();
        cmd->add_option("--seed", seed, "master seed")->capture_default_str();
        cmd->add_option("--m-delta", m_delta, "override the rounding scale factor, in (0,1]");
    }

    [[nodiscard]] smd::SmdParams params() const {
        smd::SmdParams p;
        p.eps_inner = eps1;
        p.eps_outer = eps2;
        p.delta = delta;
        p.retries = retries;
        p.seed = seed;
        p.m_delta = m_delta;
        return p;
    }
};

struct GenFlags {
    std::size_t jobs = 10;
    double capacity_scale = 1.0;
    std::optional<double> capacity_fraction;
    std::string sgd;
    std::string mode;

    void attach(CLI::App* cmd) {
        cmd->add_option("--jobs", jobs, "number of jobs")->capture_default_str();
        cmd->add_option("--capacity-scale", capacity_scale, "cluster size in resource units")->capture_default_str();
        cmd->add_option("--capacity-fraction", capacity_fraction, "cluster size as a fraction of summed job limits");
        cmd->add_option("--sgd", sgd, "pin the SGD mode")->check(CLI::IsMember({"sync", "async"}));
        cmd->add_option("--mode", mode, "pin the overlap model")
            ->check(CLI::IsMember({"sequential", "waitfree", "priority"}));
    }

    [[nodiscard]] smd::GeneratorSpec spec(std::uint64_t seed) const {
        smd::GeneratorSpec s;
        s.jobs = jobs;
        s.seed = seed;
        s.capacity_scale = capacity_scale;
        s.capacity_fraction = capacity_fraction;
        if (sgd == "sync") s.sgd = smd::SgdMode::Sync;
        if (sgd == "async") s.sgd = smd::SgdMode::Async;
        if (mode == "sequential") s.mode = smd::OverlapModel::Sequential;
        if (mode == "waitfree") s.mode = smd::OverlapModel::WaitFree;
        if (mode == "priority") s.mode = smd::OverlapModel::Priority;
        return s;
    }
};

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

const char* model_name(smd::OverlapModel m) {
    switch (m) {
        case smd::OverlapModel::Sequential: return "sequential";
        case smd::OverlapModel::WaitFree: return "waitfree";
        case smd::OverlapModel::Priority: return "priority";
    }
    return "sequential";
}

smd::Schedule run_algorithm(smd::Algorithm a, const smd::Workload& w, const smd::SmdParams& p) {
    switch (a) {
        case smd::Algorithm::Smd: return smd::schedule_smd(w, p);
        case smd::Algorithm::Esw: return smd::schedule_esw(w, p.eps_outer);
        case smd::Algorithm::Optimus: return smd::schedule_optimus_greedy(w, p.eps_outer);
        case smd::Algorithm::Bruteforce: return smd::schedule_bruteforce(w);
    }
    throw std::logic_error("unhandled algorithm");
}

json timeline_report(const smd::Workload& w) {
    json jobs = json::array();
    for (const auto& job : w.jobs) {
        const auto layers = job.layer_timings();
        const auto eta = smd::job_overlap(job);
        jobs.push_back({{"id", job.id},
                        {"mode", model_name(job.training_mode.model)},
                        {"t_sequential", smd::sequential_time(layers)},
                        {"t", eta.per_sample_time},
                        {"eta1", eta.fp},
                        {"eta2", eta.bp},
                        {"eta3", eta.comm},
                        {"completion_1_1", smd::completion_time(job, eta, smd::Allocation{1, 1})}});
    }
    return json{{"jobs", std::move(jobs)}};
}

json oracle_report(const smd::Workload& w, const smd::SmdParams& p) {
    const auto best = smd::schedule_bruteforce(w);
    const auto ours = smd::schedule_smd(w, p);
    std::vector<double> optimal;
    for (std::size_t i = 0; i < w.jobs.size(); ++i) {
        const auto& a = best.jobs[i].allocation;
        optimal.push_back(a ? smd::completion_time(w.jobs[i], *a) : 0.0);
    }
    const double opt = smd::total_utility(best);
    const double got = smd::total_utility(ours);
    return json{{"bruteforce_utility", opt},
                {"smd_utility", got},
                {"ratio", opt > 0.0 ? json(got / opt) : json(nullptr)},
                {"lower_bound", smd::approximation_lower_bound(w, optimal, p)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource allocation and admission for parameter-server training jobs"};
    app.require_subcommand(1);

    std::string out;
    std::string workload_path;
    std::string algo = "smd";
    std::vector<std::string> algos{"smd", "esw", "optimus"};
    int reps = 1;
    bool timing = false;
    SmdFlags smd_flags;
    GenFlags gen_flags;

    auto* gen = app.add_subcommand("gen", "emit a synthetic workload as JSON");
    gen_flags.attach(gen);
    gen->add_option("--seed", smd_flags.seed, "generator seed")->capture_default_str();
    gen->add_option("--out", out, "output file (default stdout)");

    auto* schedule = app.add_subcommand("schedule", "schedule one workload and print the schedule as JSON");
    schedule->add_option("workload", workload_path, "workload JSON file")->required();
    schedule->add_option("--algo", algo, "smd, esw, optimus or bruteforce")
        ->check(CLI::IsMember({"smd", "esw", "optimus", "bruteforce"}))
        ->capture_default_str();
    smd_flags.attach(schedule);
    schedule->add_option("--out", out, "output file (default stdout)");

    auto* timeline = app.add_subcommand("timeline", "per-job per-sample time and overlap coefficients");
    timeline->add_option("workload", workload_path, "workload JSON file")->required();
    timeline->add_option("--out", out, "output file (default stdout)");

    auto* experiment = app.add_subcommand("experiment", "run algorithms over repetitions and write CSV");
    gen_flags.attach(experiment);
    smd_flags.attach(experiment);
    experiment->add_option("--workload", workload_path, "use this workload instead of generating one");
    experiment->add_option("--algo", algos, "algorithms to run")
        ->delimiter(',')
        ->check(CLI::IsMember({"smd", "esw", "optimus", "bruteforce"}));
    experiment->add_option("--reps", reps, "repetitions")->capture_default_str();
    experiment->add_flag("--timing", timing, "fill the wall_ms column");
    experiment->add_option("--out", out, "CSV file (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "compare SMD with exhaustive search on a small workload");
    oracle->add_option("workload", workload_path, "workload JSON file")->required();
    smd_flags.attach(oracle);
    oracle->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (gen->parsed()) {
            const auto w = smd::generate_workload(gen_flags.spec(smd_flags.seed));
            emit(out, smd::workload_to_json(w).dump(2) + "\n");
        } else if (schedule->parsed()) {
            const auto w = smd::load_workload(workload_path);
            const auto s = run_algorithm(smd::parse_algorithm(algo), w, smd_flags.params());
            emit(out, smd::schedule_to_json(s).dump(2) + "\n");
        } else if (timeline->parsed()) {
            emit(out, timeline_report(smd::load_workload(workload_path)).dump(2) + "\n");
        } else if (experiment->parsed()) {
            smd::ExperimentConfig config;
            config.generator = gen_flags.spec(smd_flags.seed);
            if (!workload_path.empty()) config.workload_path = workload_path;
            config.algorithms.clear();
            for (const auto& a : algos) config.algorithms.push_back(smd::parse_algorithm(a));
            config.params = smd_flags.params();
            config.repetitions = reps;
            config.record_timing = timing;
            std::ostringstream csv;
            smd::write_csv(csv, smd::run_experiment(config));
            emit(out, csv.str());
        } else if (oracle->parsed()) {
            emit(out, oracle_report(smd::load_workload(workload_path), smd_flags.params()).dump(2) + "\n");
        }
    } catch (const smd::WorkloadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const smd::CapsExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}
