#include "deepgrid/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "deepgrid/random.hpp"
#include "deepgrid/snapshot.hpp"

namespace deepgrid {

namespace fs = std::filesystem;

std::string metrics_csv_row(const ExperimentConfig& config, std::size_t replication, const Checkpoint& checkpoint)
{
    const auto& m = checkpoint.metrics;
    std::string row;
    row += to_string(config.task.id);
    row += ',' + config.algorithm.label();
    row += ',' + std::to_string(replication);
    row += ',' + std::to_string(m.evaluations_used);
    row += ',' + std::to_string(m.correct_bd_count);
    row += ',' + std::to_string(m.corrected_collection_size);
    row += ',' + format_number(m.total_corrected_quality);
    row += ',' + format_number(checkpoint.wallclock_seconds);
    row += ',' + std::to_string(m.metric_evaluations);
    return row;
}

Problem make_problem(const ExperimentConfig& config)
{
    return make_problem(config.task, config.noise, config.grid.build());
}

Rng replication_stream(const ExperimentConfig& config, std::size_t replication, std::string_view label)
{
    return make_stream(config.seed, replication, label);
}

MetricsRecord measure(const Grid& grid, const Problem& problem, const ExperimentConfig& config,
                      const NoiseSpec& noise, const SelectorSpec& selector, Rng& rng)
{
    const NoisyEvaluator evaluator(problem.evaluate, noise);
    const auto corrected =
        build_corrected_container(grid, problem.geometry, selector, evaluator, config.metrics.n_repeat, rng);
    auto record = compute_metrics(corrected, problem.task, config.metrics.correctness);
    record.metric_evaluations = corrected.entities.size() * config.metrics.n_repeat;
    return record;
}

namespace {

fs::path replication_dir(const ExperimentConfig& config, std::size_t replication)
{
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%04zu", replication);
    return config.output_dir / "replications" / name;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

std::string csv_document(const ExperimentConfig& config, const std::vector<RunResult>& results,
                         std::vector<Checkpoint> RunResult::*rows)
{
    std::string doc = std::string(metrics_csv_header) + '\n';
    for (const auto& r : results) {
        for (const auto& c : r.*rows) {
            doc += metrics_csv_row(config, r.replication, c) + '\n';
        }
    }
    return doc;
}

// Appends rows as they are produced; renamed into place on completion.
class CsvAppender {
public:
    CsvAppender(fs::path path) : final_(std::move(path)), partial_(final_)
    {
        partial_ += ".partial";
        out_.open(partial_, std::ios::binary | std::ios::trunc);
        if (!out_) {
            throw std::runtime_error("cannot open " + partial_.string());
        }
        write_line(metrics_csv_header);
    }

    void write_line(const std::string& line)
    {
        out_ << line << '\n';
        out_.flush();
        if (!out_) {
            throw std::runtime_error("write to " + partial_.string() + " failed");
        }
    }

    void commit()
    {
        out_.close();
        std::error_code ec;
        fs::rename(partial_, final_, ec);
        if (ec) {
            throw std::runtime_error("cannot rename " + partial_.string() + ": " + ec.message());
        }
    }

private:
    fs::path final_;
    fs::path partial_;
    std::ofstream out_;
};

}  // namespace

RunResult run_replication(const ExperimentConfig& config, std::size_t replication)
{
    const auto started = std::chrono::steady_clock::now();
    const auto problem = make_problem(config);
    const auto& spec = config.algorithm;
    const auto selector = spec.in_cell_selector();
    const bool to_disk = !config.output_dir.empty();

    std::optional<CsvAppender> csv;
    std::optional<CsvAppender> exact_csv;
    fs::path dir;
    if (to_disk) {
        dir = replication_dir(config, replication);
        ensure_dir(dir);
        csv.emplace(dir / "metrics.csv");
        if (config.metrics.exact) {
            exact_csv.emplace(dir / "metrics_exact.csv");
        }
    }

    auto state = initialize_grid(problem, spec, replication_stream(config, replication, "variation"),
                                 replication_stream(config, replication, "noise"),
                                 replication_stream(config, replication, "selection"), config.budget);
    Rng metric_rng = replication_stream(config, replication, "metrics");
    Rng exact_rng = replication_stream(config, replication, "metrics_exact");

    RunResult result;
    result.replication = replication;

    auto wallclock = [&] {
        if (!config.record_wallclock) {
            return 0.0;
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    auto checkpoint = [&] {
        Checkpoint c;
        c.metrics = measure(state.grid, problem, config, config.noise, selector, metric_rng);
        c.metrics.evaluations_used = state.evaluations_used;
        c.wallclock_seconds = wallclock();
        if (csv) {
            csv->write_line(metrics_csv_row(config, replication, c));
        }
        result.checkpoints.push_back(c);

        if (config.metrics.exact) {
            Checkpoint e;
            e.metrics = measure(state.grid, problem, config, NoiseSpec{0.0, 0.0}, selector, exact_rng);
            e.metrics.evaluations_used = state.evaluations_used;
            e.wallclock_seconds = c.wallclock_seconds;
            if (exact_csv) {
                exact_csv->write_line(metrics_csv_row(config, replication, e));
            }
            result.exact_checkpoints.push_back(e);
        }
    };

    const auto interval = config.effective_checkpoint_interval();
    std::uint64_t next = interval;
    auto maybe_checkpoint = [&] {
        if (state.evaluations_used >= next) {
            checkpoint();
            while (next <= state.evaluations_used) {
                next += interval;
            }
        }
    };

    maybe_checkpoint();
    while (run_generation(state, problem, spec)) {
        maybe_checkpoint();
    }
    if (result.checkpoints.empty() || result.checkpoints.back().metrics.evaluations_used != state.evaluations_used) {
        checkpoint();
    }

    if (config.metrics.best_of_cell) {
        Rng best_rng = replication_stream(config, replication, "metrics_best");
        Checkpoint b;
        b.metrics = measure(state.grid, problem, config, config.noise,
                            SelectorSpec{InCellRule::best_of_cell, spec.epsilon_fraction}, best_rng);
        b.metrics.evaluations_used = state.evaluations_used;
        b.wallclock_seconds = wallclock();
        result.best_of_cell = b;
    }

    result.evaluations_used = state.evaluations_used;
    result.generations = state.generation;
    result.drifts = state.drifts;

    if (to_disk) {
        csv->commit();
        if (exact_csv) {
            exact_csv->commit();
        }
        if (result.best_of_cell) {
            write_file_atomic(dir / "best_of_cell.csv", std::string(metrics_csv_header) + '\n' +
                                                             metrics_csv_row(config, replication, *result.best_of_cell) +
                                                             '\n');
        }
        result.snapshot = dir / "snapshot.csv";
        export_grid_snapshot(state.grid, problem.task.genotype_dim, problem.task.bd_dim, result.snapshot);
    }
    return result;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const bool to_disk = !config.output_dir.empty();
    if (to_disk) {
        ensure_dir(config.output_dir);
    }

    std::vector<RunResult> results(config.replications);
    std::vector<std::exception_ptr> errors(config.replications);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto r = next++; r < config.replications; r = next++) {
            try {
                results[r] = run_replication(config, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    {
        const auto n = std::min(config.workers, config.replications);
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < n; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    if (to_disk) {
        write_file_atomic(config.output_dir / "config.json", to_json(config).dump(2) + '\n');
        write_file_atomic(config.output_dir / "metrics.csv", csv_document(config, results, &RunResult::checkpoints));
        if (config.metrics.exact) {
            write_file_atomic(config.output_dir / "metrics_exact.csv",
                              csv_document(config, results, &RunResult::exact_checkpoints));
        }
        if (config.metrics.best_of_cell) {
            std::string doc = std::string(metrics_csv_header) + '\n';
            for (const auto& r : results) {
                doc += metrics_csv_row(config, r.replication, *r.best_of_cell) + '\n';
            }
            write_file_atomic(config.output_dir / "best_of_cell.csv", doc);
        }
    }
    return results;
}

}  // namespace deepgrid
