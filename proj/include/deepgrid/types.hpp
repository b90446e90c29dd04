#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace deepgrid {

using Rng = std::mt19937_64;

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double v) const { return v >= lower && v <= upper; }
};

using Genotype = std::vector<double>;
using Descriptor = std::vector<double>;

// Fitness is higher-is-better; the descriptor lives in BD space.
struct Evaluation {
    double fitness = 0.0;
    Descriptor descriptor;

    bool operator==(const Evaluation&) const = default;
};

struct Individual {
    Genotype genotype;
    Evaluation evaluation;
    // Number of samples folded into evaluation (running means).
    std::uint32_t sample_count = 1;

    Individual() = default;
    Individual(Genotype g, Evaluation e, std::uint32_t samples = 1)
        : genotype(std::move(g)), evaluation(std::move(e)), sample_count(samples) {}

    double fitness() const { return evaluation.fitness; }
    const Descriptor& descriptor() const { return evaluation.descriptor; }

    /// Folds one more sample into the stored means: mean += (x - mean) / n.
    void add_sample(const Evaluation& sample);

    bool operator==(const Individual&) const = default;
};

struct CellIndex {
    std::size_t value = 0;

    auto operator<=>(const CellIndex&) const = default;
};

}  // namespace deepgrid
