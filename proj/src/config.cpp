#include "deepgrid/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace deepgrid {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

Interval parse_interval(const json& j, std::string_view where)
{
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(std::string(where) + ": interval must be [lower, upper]");
    }
    return Interval{j[0].get<double>(), j[1].get<double>()};
}

// Either one interval applied to every dimension or one per dimension.
std::vector<Interval> parse_intervals(const json& j, std::size_t dim, std::string_view where)
{
    if (j.is_array() && j.size() == 2 && j[0].is_number()) {
        return std::vector<Interval>(dim, parse_interval(j, where));
    }
    if (!j.is_array() || j.size() != dim) {
        throw ConfigError(std::string(where) + ": expected " + std::to_string(dim) + " intervals");
    }
    std::vector<Interval> out;
    for (const auto& e : j) {
        out.push_back(parse_interval(e, where));
    }
    return out;
}

TaskSpec parse_task(const json& j)
{
    if (j.is_string()) {
        return default_spec(task_from_string(j.get<std::string>()));
    }
    check_keys(j, {"id", "gene_bounds", "bd_bounds", "fitness_bounds", "grid"}, "task");
    auto spec = default_spec(task_from_string(j.at("id").get<std::string>()));
    if (j.contains("gene_bounds")) {
        spec.gene_bounds = parse_intervals(j["gene_bounds"], spec.genotype_dim, "task.gene_bounds");
    }
    if (j.contains("bd_bounds")) {
        spec.bd_bounds = parse_intervals(j["bd_bounds"], spec.bd_dim, "task.bd_bounds");
    }
    if (j.contains("fitness_bounds")) {
        spec.fitness_bounds = parse_interval(j["fitness_bounds"], "task.fitness_bounds");
    }
    return spec;
}

NoiseSpec parse_noise(const json& j)
{
    check_keys(j, {"fitness_sigma", "bd_sigma", "interpretation"}, "noise");
    NoiseSpec noise;
    read(j, "fitness_sigma", noise.fitness_sigma);
    read(j, "bd_sigma", noise.bd_sigma);
    const auto interpretation = j.value("interpretation", std::string("stddev"));
    if (interpretation == "variance") {
        if (noise.fitness_sigma < 0.0 || noise.bd_sigma < 0.0) {
            throw ConfigError("noise: variances must be non-negative");
        }
        noise.fitness_sigma = std::sqrt(noise.fitness_sigma);
        noise.bd_sigma = std::sqrt(noise.bd_sigma);
    } else if (interpretation != "stddev") {
        throw ConfigError("noise.interpretation must be 'stddev' or 'variance'");
    }
    return noise;
}

GeometryConfig parse_geometry(const json& j, const TaskSpec& task)
{
    check_keys(j, {"type", "bounds", "bins", "max_radius", "rings", "sectors_per_ring"}, "grid");
    GeometryConfig g = default_geometry(task);
    const auto type = j.value("type", g.kind == GeometryConfig::Kind::cartesian ? "cartesian" : "polar");
    if (type == "cartesian") {
        if (g.kind != GeometryConfig::Kind::cartesian) {
            g = GeometryConfig{};
            g.bounds = task.bd_bounds;
            g.bins.assign(task.bd_dim, 100);
        }
        g.kind = GeometryConfig::Kind::cartesian;
        if (j.contains("bounds")) {
            g.bounds = parse_intervals(j["bounds"], task.bd_dim, "grid.bounds");
        }
        if (j.contains("bins")) {
            const auto& bins = j["bins"];
            if (bins.is_number()) {
                g.bins.assign(task.bd_dim, bins.get<std::size_t>());
            } else {
                g.bins = bins.get<std::vector<std::size_t>>();
            }
        }
    } else if (type == "polar") {
        g.kind = GeometryConfig::Kind::polar;
        read(j, "max_radius", g.max_radius);
        read(j, "rings", g.rings);
        read(j, "sectors_per_ring", g.sectors_per_ring);
    } else {
        throw ConfigError("grid.type must be 'cartesian' or 'polar'");
    }
    return g;
}

AlgorithmSpec parse_algorithm(const json& j)
{
    check_keys(j,
               {"variant", "depth", "samples", "batch_size", "init_size", "mutation_rate", "mutation_sigma",
                "epsilon_fraction"},
               "algorithm");
    const auto name = j.value("variant", std::string("deep_grid"));
    AlgorithmSpec spec;
    if (name == "baseline") {
        spec = AlgorithmSpec::baseline();
    } else {
        switch (variant_from_string(name)) {
        case Variant::deep_grid:
            spec = AlgorithmSpec::deep_grid(j.value("depth", std::size_t{50}));
            break;
        case Variant::naive:
            spec = AlgorithmSpec::naive(j.value("samples", std::size_t{1}));
            break;
        case Variant::adaptive:
            spec = AlgorithmSpec::adaptive();
            break;
        case Variant::adaptive_drift:
            spec = AlgorithmSpec::adaptive_drift(j.value("depth", std::size_t{10}));
            break;
        }
    }
    if (spec.variant == Variant::naive || spec.variant == Variant::adaptive) {
        if (j.contains("depth") && j["depth"].get<std::size_t>() != 1) {
            throw ConfigError("algorithm: " + name + " has no depth");
        }
    }
    if (spec.variant != Variant::naive && j.contains("samples")) {
        throw ConfigError("algorithm: 'samples' only applies to the naive variant");
    }
    read(j, "batch_size", spec.batch_size);
    read(j, "init_size", spec.init_size);
    read(j, "mutation_rate", spec.mutation.per_gene_rate);
    read(j, "mutation_sigma", spec.mutation.sigma_fraction);
    read(j, "epsilon_fraction", spec.epsilon_fraction);
    return spec;
}

MetricsConfig parse_metrics(const json& j)
{
    check_keys(j, {"n_repeat", "exact", "best_of_cell", "correct_bd"}, "metrics");
    MetricsConfig m;
    read(j, "n_repeat", m.n_repeat);
    read(j, "exact", m.exact);
    read(j, "best_of_cell", m.best_of_cell);
    const auto mode = j.value("correct_bd", std::string("before_collisions"));
    if (mode == "before_collisions") {
        m.correctness = CorrectnessCount::before_collisions;
    } else if (mode == "after_collisions") {
        m.correctness = CorrectnessCount::after_collisions;
    } else {
        throw ConfigError("metrics.correct_bd must be 'before_collisions' or 'after_collisions'");
    }
    return m;
}

ExperimentConfig parse_config_impl(const json& root)
{
    check_keys(root,
               {"task", "noise", "grid", "algorithm", "budget", "replications", "seed", "checkpoint_interval",
                "metrics", "workers", "output_dir", "record_wallclock", "sweep"},
               "config");
    ExperimentConfig cfg;
    if (root.contains("task")) {
        cfg.task = parse_task(root["task"]);
    }
    cfg.grid = default_geometry(cfg.task);
    if (root.contains("task") && root["task"].is_object() && root["task"].contains("grid")) {
        cfg.grid = parse_geometry(root["task"]["grid"], cfg.task);
    }
    if (root.contains("grid")) {
        cfg.grid = parse_geometry(root["grid"], cfg.task);
    }
    if (root.contains("noise")) {
        cfg.noise = parse_noise(root["noise"]);
    }
    if (root.contains("algorithm")) {
        cfg.algorithm = parse_algorithm(root["algorithm"]);
    }
    if (root.contains("metrics")) {
        cfg.metrics = parse_metrics(root["metrics"]);
    }
    read(root, "budget", cfg.budget);
    read(root, "replications", cfg.replications);
    read(root, "seed", cfg.seed);
    read(root, "checkpoint_interval", cfg.checkpoint_interval);
    read(root, "workers", cfg.workers);
    read(root, "record_wallclock", cfg.record_wallclock);
    if (root.contains("output_dir")) {
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    return cfg;
}

template <typename F>
auto translate_errors(F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

Geometry GeometryConfig::build() const
{
    if (kind == Kind::cartesian) {
        return CartesianGeometry(bounds, bins);
    }
    if (sectors_per_ring.empty()) {
        if (rings == 0) {
            throw std::invalid_argument("polar geometry: rings must be >= 1");
        }
        return PolarGeometry::equal_area(max_radius, rings);
    }
    return PolarGeometry(max_radius, sectors_per_ring);
}

GeometryConfig default_geometry(const TaskSpec& task)
{
    GeometryConfig g;
    if (task.id == TaskId::arm) {
        g.kind = GeometryConfig::Kind::polar;
        g.max_radius = 1.0;
        g.rings = 71;
    } else {
        g.kind = GeometryConfig::Kind::cartesian;
        g.bounds = task.bd_bounds;
        g.bins.assign(task.bd_dim, 100);
    }
    return g;
}

std::uint64_t ExperimentConfig::effective_checkpoint_interval() const
{
    if (checkpoint_interval > 0) {
        return checkpoint_interval;
    }
    return std::max<std::uint64_t>(1, budget / 20);
}

void ExperimentConfig::validate() const
{
    translate_errors([this] {
        task.validate();
        algorithm.validate();
        const auto geometry = grid.build();
        if (geometry.dimension() != task.bd_dim) {
            throw ConfigError("grid dimension does not match the task descriptor dimension");
        }
        if (noise.fitness_sigma < 0.0 || noise.bd_sigma < 0.0) {
            throw ConfigError("noise sigmas must be non-negative");
        }
        if (budget < algorithm.init_cost()) {
            throw ConfigError("budget " + std::to_string(budget) + " is below the initialization cost " +
                              std::to_string(algorithm.init_cost()));
        }
        if (replications < 1) {
            throw ConfigError("replications must be >= 1");
        }
        if (workers < 1) {
            throw ConfigError("workers must be >= 1");
        }
        if (metrics.n_repeat < 1) {
            throw ConfigError("metrics.n_repeat must be >= 1");
        }
        return 0;
    });
}

ExperimentConfig parse_config(const json& root)
{
    return translate_errors([&root] { return parse_config_impl(root); });
}

std::vector<ExperimentConfig> expand_sweep(const json& root)
{
    return translate_errors([&root] {
        auto base = parse_config_impl(root);
        if (!root.contains("sweep")) {
            return std::vector<ExperimentConfig>{base};
        }
        const auto& sweep = root["sweep"];
        check_keys(sweep, {"variants", "tasks"}, "sweep");

        std::vector<json> tasks;
        if (sweep.contains("tasks")) {
            for (const auto& t : sweep["tasks"]) {
                tasks.push_back(t);
            }
        } else {
            tasks.push_back(root.value("task", json("rastrigin")));
        }
        std::vector<json> variants;
        if (sweep.contains("variants")) {
            for (const auto& v : sweep["variants"]) {
                variants.push_back(v);
            }
        } else {
            variants.push_back(root.value("algorithm", json::object()));
        }
        if (tasks.empty() || variants.empty()) {
            throw ConfigError("sweep: tasks and variants must be non-empty");
        }

        std::vector<ExperimentConfig> out;
        for (const auto& t : tasks) {
            for (const auto& v : variants) {
                auto cfg = base;
                cfg.task = parse_task(t);
                cfg.grid = default_geometry(cfg.task);
                if (t.is_object() && t.contains("grid")) {
                    cfg.grid = parse_geometry(t["grid"], cfg.task);
                } else if (root.contains("grid") && !sweep.contains("tasks")) {
                    cfg.grid = parse_geometry(root["grid"], cfg.task);
                }
                cfg.algorithm = parse_algorithm(v);
                cfg.output_dir = base.output_dir / std::string(to_string(cfg.task.id)) / cfg.algorithm.label();
                out.push_back(std::move(cfg));
            }
        }
        return out;
    });
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_json_file(path));
}

json to_json(const ExperimentConfig& c)
{
    auto interval = [](const Interval& i) { return json::array({i.lower, i.upper}); };
    auto intervals = [&](const std::vector<Interval>& v) {
        json out = json::array();
        for (const auto& i : v) {
            out.push_back(interval(i));
        }
        return out;
    };

    json grid;
    if (c.grid.kind == GeometryConfig::Kind::cartesian) {
        grid = {{"type", "cartesian"}, {"bounds", intervals(c.grid.bounds)}, {"bins", c.grid.bins}};
    } else {
        grid = {{"type", "polar"}, {"max_radius", c.grid.max_radius}, {"rings", c.grid.rings}};
        if (!c.grid.sectors_per_ring.empty()) {
            grid["sectors_per_ring"] = c.grid.sectors_per_ring;
        }
    }

    const auto& a = c.algorithm;
    json algorithm = {{"variant", a.noise_free ? "baseline" : std::string(to_string(a.variant))},
                      {"batch_size", a.batch_size},
                      {"init_size", a.init_size},
                      {"mutation_rate", a.mutation.per_gene_rate},
                      {"mutation_sigma", a.mutation.sigma_fraction},
                      {"epsilon_fraction", a.epsilon_fraction}};
    if (a.variant == Variant::deep_grid || a.variant == Variant::adaptive_drift) {
        algorithm["depth"] = a.depth;
    }
    if (a.variant == Variant::naive && !a.noise_free) {
        algorithm["samples"] = a.samples;
    }

    return json{
        {"task",
         {{"id", std::string(to_string(c.task.id))},
          {"gene_bounds", intervals(c.task.gene_bounds)},
          {"bd_bounds", intervals(c.task.bd_bounds)},
          {"fitness_bounds", interval(c.task.fitness_bounds)}}},
        {"noise", {{"fitness_sigma", c.noise.fitness_sigma}, {"bd_sigma", c.noise.bd_sigma}}},
        {"grid", grid},
        {"algorithm", algorithm},
        {"budget", c.budget},
        {"replications", c.replications},
        {"seed", c.seed},
        {"checkpoint_interval", c.effective_checkpoint_interval()},
        {"metrics",
         {{"n_repeat", c.metrics.n_repeat},
          {"exact", c.metrics.exact},
          {"best_of_cell", c.metrics.best_of_cell},
          {"correct_bd", c.metrics.correctness == CorrectnessCount::before_collisions ? "before_collisions"
                                                                                      : "after_collisions"}}},
        {"workers", c.workers},
        {"output_dir", c.output_dir.string()},
        {"record_wallclock", c.record_wallclock},
    };
}

}  // namespace deepgrid
