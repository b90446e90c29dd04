#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepgrid/types.hpp"

namespace deepgrid {

enum class TaskId { rastrigin, arm };

std::string_view to_string(TaskId id);
TaskId task_from_string(std::string_view name);

struct TaskSpec {
    TaskId id = TaskId::rastrigin;
    std::size_t genotype_dim = 0;
    std::vector<Interval> gene_bounds;
    std::size_t bd_dim = 2;
    std::vector<Interval> bd_bounds;
    // Containing interval for noise-free fitness, used to normalise quality.
    Interval fitness_bounds;

    void validate() const;
};

// Standard deviations of the additive Gaussian noise.
struct NoiseSpec {
    double fitness_sigma = 0.05;
    double bd_sigma = 0.01;

    bool is_zero() const { return fitness_sigma == 0.0 && bd_sigma == 0.0; }
};

/// 6 genes in [-5.12, 5.12]; descriptor (x1, x2).
TaskSpec rastrigin_spec();
/// 8 joint angles in [-pi, pi]; descriptor is the end-effector of a
/// planar arm with 8 links of length 1/8.
TaskSpec arm_spec();
TaskSpec default_spec(TaskId id);

// f(x) = -60 - sum_i (x_i^2 - 10 cos(2 pi x_i)), maximum 0 at the origin.
Evaluation rastrigin_evaluate(std::span<const double> x);

// f(theta) = -(1/n) sum_i (theta_i - mean)^2; descriptor by forward
// kinematics with cumulative joint angles.
Evaluation arm_evaluate(std::span<const double> theta);

using DeterministicEvaluator = std::function<Evaluation(std::span<const double>)>;

DeterministicEvaluator deterministic_evaluator(TaskId id);

/// Adds N(0, fitness_sigma) to the fitness and N(0, bd_sigma) independently
/// to every descriptor component. Zero sigmas draw nothing from `rng`.
Evaluation noisy_evaluate(const DeterministicEvaluator& task, const NoiseSpec& noise,
                          std::span<const double> genotype, Rng& rng);

// Deterministic core bundled with its noise model.
class NoisyEvaluator {
public:
    NoisyEvaluator(DeterministicEvaluator core, NoiseSpec noise)
        : core_(std::move(core)), noise_(noise) {}

    Evaluation operator()(std::span<const double> genotype, Rng& rng) const
    {
        return noisy_evaluate(core_, noise_, genotype, rng);
    }

    const DeterministicEvaluator& core() const { return core_; }
    const NoiseSpec& noise() const { return noise_; }

private:
    DeterministicEvaluator core_;
    NoiseSpec noise_;
};

}  // namespace deepgrid
