#include "deepgrid/tasks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace deepgrid {

std::string_view to_string(TaskId id)
{
    switch (id) {
    case TaskId::rastrigin:
        return "rastrigin";
    case TaskId::arm:
        return "arm";
    }
    return "unknown";
}

TaskId task_from_string(std::string_view name)
{
    if (name == "rastrigin") {
        return TaskId::rastrigin;
    }
    if (name == "arm") {
        return TaskId::arm;
    }
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

void TaskSpec::validate() const
{
    if (genotype_dim == 0 || gene_bounds.size() != genotype_dim) {
        throw std::invalid_argument("task: gene_bounds must have genotype_dim entries");
    }
    for (const auto& b : gene_bounds) {
        if (!(b.lower < b.upper)) {
            throw std::invalid_argument("task: gene bound lower must be below upper");
        }
    }
    if (bd_bounds.size() != bd_dim) {
        throw std::invalid_argument("task: bd_bounds must have bd_dim entries");
    }
    if (!(fitness_bounds.lower < fitness_bounds.upper)) {
        throw std::invalid_argument("task: fitness_bounds lower must be below upper");
    }
}

TaskSpec rastrigin_spec()
{
    TaskSpec spec;
    spec.id = TaskId::rastrigin;
    spec.genotype_dim = 6;
    spec.gene_bounds.assign(6, Interval{-5.12, 5.12});
    spec.bd_dim = 2;
    spec.bd_bounds.assign(2, Interval{-5.12, 5.12});
    // Per-dimension term is at most 5.12^2 + 10.
    spec.fitness_bounds = Interval{-277.2, 0.0};
    return spec;
}

TaskSpec arm_spec()
{
    constexpr double pi = std::numbers::pi;
    TaskSpec spec;
    spec.id = TaskId::arm;
    spec.genotype_dim = 8;
    spec.gene_bounds.assign(8, Interval{-pi, pi});
    spec.bd_dim = 2;
    spec.bd_bounds.assign(2, Interval{-1.0, 1.0});
    spec.fitness_bounds = Interval{-pi * pi, 0.0};
    return spec;
}

TaskSpec default_spec(TaskId id)
{
    return id == TaskId::rastrigin ? rastrigin_spec() : arm_spec();
}

Evaluation rastrigin_evaluate(std::span<const double> x)
{
    if (x.size() != 6) {
        throw std::invalid_argument("rastrigin: expected 6 genes");
    }
    double sum = 0.0;
    for (double xi : x) {
        sum += xi * xi - 10.0 * std::cos(2.0 * std::numbers::pi * xi);
    }
    Evaluation e;
    e.fitness = -60.0 - sum;
    e.descriptor = {x[0], x[1]};
    return e;
}

Evaluation arm_evaluate(std::span<const double> theta)
{
    if (theta.size() != 8) {
        throw std::invalid_argument("arm: expected 8 joint angles");
    }
    const double n = static_cast<double>(theta.size());
    double mean = 0.0;
    for (double t : theta) {
        mean += t;
    }
    mean /= n;

    double var = 0.0;
    for (double t : theta) {
        var += (t - mean) * (t - mean);
    }
    var /= n;

    const double link = 1.0 / n;
    double angle = 0.0;
    double x = 0.0;
    double y = 0.0;
    for (double t : theta) {
        angle += t;
        x += link * std::cos(angle);
        y += link * std::sin(angle);
    }

    Evaluation e;
    e.fitness = -var;
    e.descriptor = {x, y};
    return e;
}

DeterministicEvaluator deterministic_evaluator(TaskId id)
{
    if (id == TaskId::rastrigin) {
        return rastrigin_evaluate;
    }
    return arm_evaluate;
}

Evaluation noisy_evaluate(const DeterministicEvaluator& task, const NoiseSpec& noise,
                          std::span<const double> genotype, Rng& rng)
{
    Evaluation e = task(genotype);
    if (noise.fitness_sigma > 0.0) {
        e.fitness += std::normal_distribution<double>(0.0, noise.fitness_sigma)(rng);
    }
    if (noise.bd_sigma > 0.0) {
        std::normal_distribution<double> bd_noise(0.0, noise.bd_sigma);
        for (auto& v : e.descriptor) {
            v += bd_noise(rng);
        }
    }
    return e;
}

}  // namespace deepgrid
