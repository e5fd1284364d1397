#include "smd/workload.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "smd/random.hpp"
#include "smd/speed.hpp"

namespace smd {

using nlohmann::json;

namespace {

constexpr double kMsPerSecond = 1000.0;
constexpr double kBitsPerMb = 8e6;
constexpr double kBitsPerGbit = 1e9;

double ms_to_s(double ms) { return ms / kMsPerSecond; }
double mb_to_bits(double mb) { return mb * kBitsPerMb; }
double gbps_to_bps(double g) { return g * kBitsPerGbit; }

// Inverse of a monotone load conversion. Walks a few ulps from the naive
// inverse until the load conversion reproduces `value` exactly; such a point
// exists whenever `value` came from a file or the generator.
template <typename Load>
double file_value(double value, double naive, Load load) {
    double f = naive;
    for (int step = 0; step < 16; ++step) {
        const double back = load(f);
        if (back == value) return f;
        f = std::nextafter(f, back < value ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity());
    }
    return naive;
}

double s_to_ms(double s) { return file_value(s, s * kMsPerSecond, ms_to_s); }
double bits_to_mb(double bits) { return file_value(bits, bits / kBitsPerMb, mb_to_bits); }
double bps_to_gbps(double bps) { return file_value(bps, bps / kBitsPerGbit, gbps_to_bps); }

const char* sgd_name(SgdMode m) { return m == SgdMode::Sync ? "sync" : "async"; }

const char* mode_name(OverlapModel m) {
    switch (m) {
        case OverlapModel::Sequential: return "sequential";
        case OverlapModel::WaitFree: return "waitfree";
        case OverlapModel::Priority: return "priority";
    }
    return "sequential";
}

json resources_to_json(const ResourceVector& v) {
    return json{{"gpu", v.gpu()}, {"cpu", v.cpu()}, {"memory_gb", v.memory()}, {"storage_gb", v.storage()}};
}

// Schema checks. `where` names the object for error messages.
void require_object(const json& j, const std::string& where, std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw WorkloadError(where + ": expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
        known.insert(k);
        if (!j.contains(k)) throw WorkloadError(where + ": missing field '" + k + "'");
    }
    for (const char* k : optional) known.insert(k);
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw WorkloadError(where + ": unknown field '" + key + "'");
}

double number(const json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw WorkloadError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

long integer(const json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw WorkloadError(where + ": field '" + key + "' must be an integer");
    return v.get<long>();
}

std::string text(const json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw WorkloadError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

ResourceVector resources_from_json(const json& j, const std::string& where) {
    require_object(j, where, {"gpu", "cpu", "memory_gb", "storage_gb"});
    return {number(j, "gpu", where), number(j, "cpu", where), number(j, "memory_gb", where),
            number(j, "storage_gb", where)};
}

json job_to_json(const JobSpec& job) {
    json layers = json::array();
    for (const auto& l : job.layers) {
        json lj{{"bp_ms", s_to_ms(l.bp_time)}, {"fp_ms", s_to_ms(l.fp_time)}};
        if (l.comm_time) lj["comm_ms"] = s_to_ms(*l.comm_time);
        if (l.gradient_bits) lj["grad_mb"] = bits_to_mb(*l.gradient_bits);
        layers.push_back(std::move(lj));
    }
    json j{{"id", job.id},
           {"layers", std::move(layers)},
           {"iterations", job.iterations},
           {"sgd", sgd_name(job.sgd_mode)},
           {"model_mb", bits_to_mb(job.model_bits)},
           {"bandwidth_gbps", bps_to_gbps(job.bandwidth)},
           {"beta1", job.overhead_beta1},
           {"beta2", job.overhead_beta2},
           {"alpha", job.async_alpha},
           {"mode", mode_name(job.training_mode.model)},
           {"worker_demand", resources_to_json(job.worker_demand)},
           {"ps_demand", resources_to_json(job.ps_demand)},
           {"limit", resources_to_json(job.resource_limit)},
           {"utility", {{"gamma1", job.utility.gamma1}, {"gamma2", job.utility.gamma2}, {"gamma3", job.utility.gamma3}}}};
    if (job.sgd_mode == SgdMode::Sync)
        j["batch"] = {{"global", job.global_batch}};
    else
        j["batch"] = {{"mini", job.minibatch}};
    if (job.training_mode.model == OverlapModel::Priority) j["slice_ms"] = s_to_ms(job.training_mode.slice);
    return j;
}

JobSpec job_from_json(const json& j, std::size_t index) {
    std::string where = "jobs[" + std::to_string(index) + "]";
    require_object(j, where,
                   {"id", "layers", "iterations", "sgd", "batch", "model_mb", "bandwidth_gbps", "beta1", "beta2",
                    "alpha", "mode", "worker_demand", "ps_demand", "limit", "utility"},
                   {"slice_ms"});
    JobSpec job;
    job.id = text(j, "id", where);
    where = "job '" + job.id + "'";

    const auto& layers = j.at("layers");
    if (!layers.is_array()) throw WorkloadError(where + ": field 'layers' must be an array");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const std::string lw = where + " layer " + std::to_string(k + 1);
        const auto& lj = layers[k];
        require_object(lj, lw, {"bp_ms", "fp_ms"}, {"comm_ms", "grad_mb"});
        LayerProfile l;
        l.bp_time = ms_to_s(number(lj, "bp_ms", lw));
        l.fp_time = ms_to_s(number(lj, "fp_ms", lw));
        if (lj.contains("comm_ms")) l.comm_time = ms_to_s(number(lj, "comm_ms", lw));
        if (lj.contains("grad_mb")) l.gradient_bits = mb_to_bits(number(lj, "grad_mb", lw));
        job.layers.push_back(l);
    }

    job.iterations = integer(j, "iterations", where);
    const auto sgd = text(j, "sgd", where);
    if (sgd == "sync")
        job.sgd_mode = SgdMode::Sync;
    else if (sgd == "async")
        job.sgd_mode = SgdMode::Async;
    else
        throw WorkloadError(where + ": unknown sgd mode '" + sgd + "'");

    const auto& batch = j.at("batch");
    if (job.sgd_mode == SgdMode::Sync) {
        require_object(batch, where + " batch", {"global"});
        job.global_batch = number(batch, "global", where);
    } else {
        require_object(batch, where + " batch", {"mini"});
        job.minibatch = number(batch, "mini", where);
    }

    job.model_bits = mb_to_bits(number(j, "model_mb", where));
    job.bandwidth = gbps_to_bps(number(j, "bandwidth_gbps", where));
    job.overhead_beta1 = number(j, "beta1", where);
    job.overhead_beta2 = number(j, "beta2", where);
    job.async_alpha = number(j, "alpha", where);

    const auto mode = text(j, "mode", where);
    if (mode == "sequential")
        job.training_mode.model = OverlapModel::Sequential;
    else if (mode == "waitfree")
        job.training_mode.model = OverlapModel::WaitFree;
    else if (mode == "priority")
        job.training_mode.model = OverlapModel::Priority;
    else
        throw WorkloadError(where + ": unknown training mode '" + mode + "'");
    if (j.contains("slice_ms")) {
        if (job.training_mode.model != OverlapModel::Priority)
            throw WorkloadError(where + ": 'slice_ms' is only valid for the priority mode");
        job.training_mode.slice = ms_to_s(number(j, "slice_ms", where));
    } else if (job.training_mode.model == OverlapModel::Priority) {
        throw WorkloadError(where + ": priority mode requires 'slice_ms'");
    }

    job.worker_demand = resources_from_json(j.at("worker_demand"), where + " worker_demand");
    job.ps_demand = resources_from_json(j.at("ps_demand"), where + " ps_demand");
    job.resource_limit = resources_from_json(j.at("limit"), where + " limit");
    const auto& u = j.at("utility");
    require_object(u, where + " utility", {"gamma1", "gamma2", "gamma3"});
    job.utility = {number(u, "gamma1", where), number(u, "gamma2", where), number(u, "gamma3", where)};
    return job;
}

void check_range(const Range& r, const char* name) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi))
        throw std::invalid_argument(std::string("invalid generator range for ") + name);
}

}  // namespace

void GeneratorSpec::validate() const {
    check_range(iterations, "iterations");
    check_range(model_mb, "model size");
    check_range(minibatch, "minibatch");
    check_range(batch_multiplier, "batch multiplier");
    check_range(layers, "layer count");
    check_range(bp_ms, "BP time");
    check_range(fp_ms, "FP time");
    check_range(comm_ms, "comm time");
    check_range(bandwidth_gbps, "bandwidth");
    check_range(beta1, "beta1");
    check_range(beta2, "beta2");
    check_range(alpha, "alpha");
    check_range(gamma1, "gamma1");
    check_range(gamma2, "gamma2");
    check_range(gamma3, "gamma3");
    check_range(limit_factor, "limit factor");
    check_range(slice_ms, "slice");
    check_range(worker_gpu, "worker GPU");
    check_range(task_cpu, "vCPU");
    check_range(task_memory_gb, "memory");
    check_range(task_storage_gb, "storage");
    if (layers.lo < 1 || iterations.lo < 1 || minibatch.lo < 1 || batch_multiplier.lo < 1)
        throw std::invalid_argument("counts must be at least 1");
    if (!(alpha.lo > 0.0 && alpha.hi <= 1.0)) throw std::invalid_argument("alpha range must lie in (0, 1]");
    if (!(model_mb.lo > 0.0 && bandwidth_gbps.lo > 0.0)) throw std::invalid_argument("model size and bandwidth must be positive");
    if (!(gamma1.lo > 0.0 && gamma2.lo > 0.0)) throw std::invalid_argument("gamma1 and gamma2 must be positive");
    if (!(task_cpu.lo > 0.0)) throw std::invalid_argument("tasks need at least one vCPU");
    if (!(limit_factor.lo > 0.0)) throw std::invalid_argument("limit factor must be positive");
    if (!(capacity_scale > 0.0)) throw std::invalid_argument("capacity scale must be positive");
    if (capacity_fraction && !(*capacity_fraction > 0.0)) throw std::invalid_argument("capacity fraction must be positive");
    if (!(utility_time_divisor > 0.0)) throw std::invalid_argument("utility time divisor must be positive");
    if (!instance.all_positive() || !cluster_unit.all_positive())
        throw std::invalid_argument("instance and cluster unit must be positive");
}

Workload generate_workload(const GeneratorSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto count = [&](const Range& r) {
        return rng.uniform_int(static_cast<long>(std::ceil(r.lo)), static_cast<long>(std::floor(r.hi)));
    };
    const auto real = [&](const Range& r) { return rng.uniform(r.lo, r.hi); };

    Workload w;
    ResourceVector total_limits;
    for (std::size_t i = 0; i < spec.jobs; ++i) {
        JobSpec job;
        job.id = "job-" + std::to_string(i + 1);
        const bool sync = rng.uniform01() < 0.5;
        job.sgd_mode = spec.sgd.value_or(sync ? SgdMode::Sync : SgdMode::Async);
        const auto model = static_cast<OverlapModel>(rng.uniform_int(0, 2));
        job.training_mode.model = spec.mode.value_or(model);
        const double slice = ms_to_s(real(spec.slice_ms));
        if (job.training_mode.model == OverlapModel::Priority) job.training_mode.slice = slice;

        const long n = count(spec.layers);
        for (long k = 0; k < n; ++k) {
            LayerProfile l;
            l.bp_time = ms_to_s(real(spec.bp_ms));
            l.fp_time = ms_to_s(real(spec.fp_ms));
            l.comm_time = ms_to_s(real(spec.comm_ms));
            job.layers.push_back(l);
        }
        job.iterations = count(spec.iterations);
        const auto m = static_cast<double>(count(spec.minibatch));
        const auto multiplier = static_cast<double>(count(spec.batch_multiplier));
        if (job.sgd_mode == SgdMode::Sync)
            job.global_batch = multiplier * m;
        else
            job.minibatch = m;
        job.model_bits = mb_to_bits(real(spec.model_mb));
        job.bandwidth = gbps_to_bps(real(spec.bandwidth_gbps));
        job.overhead_beta1 = real(spec.beta1);
        job.overhead_beta2 = real(spec.beta2);
        // Upper end inclusive, lower end exclusive.
        job.async_alpha = spec.alpha.hi - rng.uniform01() * (spec.alpha.hi - spec.alpha.lo);

        job.worker_demand = {static_cast<double>(count(spec.worker_gpu)), static_cast<double>(count(spec.task_cpu)),
                             static_cast<double>(count(spec.task_memory_gb)),
                             static_cast<double>(count(spec.task_storage_gb))};
        job.ps_demand = {0.0, static_cast<double>(count(spec.task_cpu)), static_cast<double>(count(spec.task_memory_gb)),
                         static_cast<double>(count(spec.task_storage_gb))};
        const double factor = real(spec.limit_factor);
        const auto pair = job.worker_demand + job.ps_demand;
        const ResourceVector& basis = spec.limit_basis == LimitBasis::Instance ? spec.instance : pair;
        job.resource_limit = basis * factor;
        // At least one worker and one PS must fit.
        for (Resource r : kAllResources) job.resource_limit[r] = std::max(job.resource_limit[r], pair[r]);

        const double gamma1 = real(spec.gamma1);
        const double gamma2 = real(spec.gamma2);
        const double gamma3 = real(spec.gamma3);
        const double unit = completion_time(job, Allocation{1, 1}) / spec.utility_time_divisor;
        job.utility = {gamma1, gamma2 / unit, gamma3 * unit};

        total_limits += job.resource_limit;
        w.jobs.push_back(std::move(job));
    }
    if (spec.capacity_fraction && !w.jobs.empty()) {
        w.cluster.capacity = total_limits * *spec.capacity_fraction;
        // Capacity must stay positive even when no job asks for a resource type.
        for (Resource r : kAllResources)
            if (!(w.cluster.capacity[r] > 0.0)) w.cluster.capacity[r] = 1.0;
    } else {
        w.cluster.capacity = spec.cluster_unit * spec.capacity_scale;
    }
    return w;
}

json workload_to_json(const Workload& workload) {
    json jobs = json::array();
    for (const auto& job : workload.jobs) jobs.push_back(job_to_json(job));
    return json{{"version", "1"},
                {"cluster", {{"capacity", resources_to_json(workload.cluster.capacity)}}},
                {"jobs", std::move(jobs)}};
}

Workload workload_from_json(const json& doc) {
    require_object(doc, "workload", {"version", "cluster", "jobs"});
    if (!doc.at("version").is_string() || doc.at("version").get<std::string>() != "1")
        throw WorkloadError("workload: unsupported version (expected \"1\")");
    Workload w;
    require_object(doc.at("cluster"), "cluster", {"capacity"});
    w.cluster.capacity = resources_from_json(doc.at("cluster").at("capacity"), "cluster capacity");
    const auto& jobs = doc.at("jobs");
    if (!jobs.is_array()) throw WorkloadError("workload: field 'jobs' must be an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) w.jobs.push_back(job_from_json(jobs[i], i));

    const auto errors = validate_workload(w);
    if (!errors.empty()) {
        std::string msg = errors.front();
        for (std::size_t k = 1; k < errors.size(); ++k) msg += "; " + errors[k];
        throw WorkloadError(msg);
    }
    return w;
}

void save_workload(const Workload& workload, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << workload_to_json(workload).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Workload load_workload(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw WorkloadError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw WorkloadError(path.string() + ": " + e.what());
    }
    return workload_from_json(doc);
}

json schedule_to_json(const Schedule& schedule) {
    json jobs = json::array();
    for (const auto& j : schedule.jobs) {
        json e{{"id", j.job_id}, {"admitted", j.admitted}, {"utility", j.utility}};
        if (j.allocation) {
            e["workers"] = j.allocation->workers;
            e["ps"] = j.allocation->ps;
        }
        jobs.push_back(std::move(e));
    }
    double total = 0.0;
    for (const auto& j : schedule.jobs)
        if (j.admitted) total += j.utility;
    return json{{"algorithm", schedule.algorithm},
                {"seed", schedule.seed},
                {"total_utility", total},
                {"used", resources_to_json(schedule.used)},
                {"specified", resources_to_json(schedule.specified)},
                {"jobs", std::move(jobs)}};
}

}  // namespace smd
