#include "deepgrid/types.hpp"

namespace deepgrid {

void Individual::add_sample(const Evaluation& sample)
{
    ++sample_count;
    const double n = static_cast<double>(sample_count);
    evaluation.fitness += (sample.fitness - evaluation.fitness) / n;
    for (std::size_t k = 0; k < evaluation.descriptor.size(); ++k) {
        evaluation.descriptor[k] += (sample.descriptor[k] - evaluation.descriptor[k]) / n;
    }
}

}  // namespace deepgrid
