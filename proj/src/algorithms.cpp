#include "deepgrid/algorithms.hpp"

#include <deque>
#include <stdexcept>
#include <string>

namespace deepgrid {

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::naive:
        return "naive";
    case Variant::adaptive:
        return "adaptive";
    case Variant::adaptive_drift:
        return "adaptive_drift";
    case Variant::deep_grid:
        return "deep_grid";
    }
    return "unknown";
}

Variant variant_from_string(std::string_view name)
{
    if (name == "naive") {
        return Variant::naive;
    }
    if (name == "adaptive") {
        return Variant::adaptive;
    }
    if (name == "adaptive_drift") {
        return Variant::adaptive_drift;
    }
    if (name == "deep_grid") {
        return Variant::deep_grid;
    }
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

AlgorithmSpec AlgorithmSpec::deep_grid(std::size_t depth)
{
    AlgorithmSpec s;
    s.variant = Variant::deep_grid;
    s.depth = depth;
    s.mutation.per_gene_rate = 0.05;
    return s;
}

AlgorithmSpec AlgorithmSpec::naive(std::size_t samples)
{
    AlgorithmSpec s;
    s.variant = Variant::naive;
    s.samples = samples;
    s.depth = 1;
    s.mutation.per_gene_rate = 0.1;
    return s;
}

AlgorithmSpec AlgorithmSpec::adaptive()
{
    AlgorithmSpec s;
    s.variant = Variant::adaptive;
    s.depth = 1;
    s.mutation.per_gene_rate = 0.1;
    return s;
}

AlgorithmSpec AlgorithmSpec::adaptive_drift(std::size_t depth)
{
    AlgorithmSpec s;
    s.variant = Variant::adaptive_drift;
    s.depth = depth;
    s.mutation.per_gene_rate = 0.1;
    return s;
}

AlgorithmSpec AlgorithmSpec::baseline()
{
    auto s = naive(1);
    s.noise_free = true;
    return s;
}

std::string AlgorithmSpec::label() const
{
    switch (variant) {
    case Variant::naive:
        return noise_free ? "baseline" : "naive_" + std::to_string(samples);
    case Variant::adaptive:
        return "adaptive";
    case Variant::adaptive_drift:
        return "adaptive_drift_" + std::to_string(depth);
    case Variant::deep_grid:
        return "deep_grid_" + std::to_string(depth);
    }
    return "unknown";
}

std::size_t AlgorithmSpec::grid_depth() const
{
    return (variant == Variant::deep_grid || variant == Variant::adaptive_drift) ? depth : 1;
}

SelectorSpec AlgorithmSpec::in_cell_selector() const
{
    switch (variant) {
    case Variant::deep_grid:
        return {InCellRule::fitness_proportional, epsilon_fraction};
    case Variant::adaptive_drift:
        return {InCellRule::best_of_cell, epsilon_fraction};
    default:
        return {InCellRule::single_occupant, epsilon_fraction};
    }
}

std::uint64_t AlgorithmSpec::init_cost() const
{
    return variant == Variant::naive ? init_size * samples : init_size;
}

void AlgorithmSpec::validate() const
{
    if (batch_size < 1) {
        throw std::invalid_argument("algorithm: batch_size must be >= 1");
    }
    if (init_size < 1) {
        throw std::invalid_argument("algorithm: init_size must be >= 1");
    }
    if (variant == Variant::naive && samples < 1) {
        throw std::invalid_argument("algorithm: naive samples must be >= 1");
    }
    if (variant == Variant::deep_grid && depth < 1) {
        throw std::invalid_argument("algorithm: deep_grid depth must be >= 1");
    }
    if (variant == Variant::adaptive_drift && depth < 2) {
        throw std::invalid_argument("algorithm: adaptive_drift depth must be >= 2");
    }
    if (!(mutation.per_gene_rate > 0.0 && mutation.per_gene_rate <= 1.0)) {
        throw std::invalid_argument("algorithm: mutation rate must be in (0, 1]");
    }
    if (!(mutation.sigma_fraction > 0.0)) {
        throw std::invalid_argument("algorithm: mutation sigma_fraction must be positive");
    }
    if (!(epsilon_fraction > 0.0)) {
        throw std::invalid_argument("algorithm: epsilon_fraction must be positive");
    }
}

Problem make_problem(TaskSpec task, NoiseSpec noise, Geometry geometry)
{
    task.validate();
    if (geometry.dimension() != task.bd_dim) {
        throw std::invalid_argument("geometry dimension does not match the task descriptor");
    }
    auto evaluate = deterministic_evaluator(task.id);
    return Problem{std::move(task), std::move(evaluate), noise, std::move(geometry)};
}

ChallengeOutcome adaptive_challenge(Individual& elite, Individual& challenger, const SampleFn& sample)
{
    while (challenger.fitness() >= elite.fitness() && challenger.sample_count < elite.sample_count) {
        auto s = sample(challenger.genotype);
        if (!s) {
            return ChallengeOutcome::reject;
        }
        challenger.add_sample(*s);
    }
    if (challenger.fitness() < elite.fitness()) {
        if (auto s = sample(elite.genotype)) {
            elite.add_sample(*s);
        }
        return ChallengeOutcome::reject;
    }
    return challenger.fitness() > elite.fitness() ? ChallengeOutcome::replace : ChallengeOutcome::reject;
}

namespace {

std::optional<Evaluation> charged_sample(RunState& state, const Problem& problem, const AlgorithmSpec& spec,
                                         const Genotype& g)
{
    if (state.evaluations_used >= state.budget) {
        return std::nullopt;
    }
    ++state.evaluations_used;
    static const NoiseSpec silent{0.0, 0.0};
    return noisy_evaluate(problem.evaluate, spec.noise_free ? silent : problem.noise, g, state.noise_rng);
}

Evaluation must_sample(RunState& state, const Problem& problem, const AlgorithmSpec& spec, const Genotype& g)
{
    auto e = charged_sample(state, problem, spec, g);
    if (!e) {
        throw std::logic_error("evaluation budget exhausted inside a fixed-cost generation");
    }
    return std::move(*e);
}

Individual averaged_individual(RunState& state, const Problem& problem, const AlgorithmSpec& spec, Genotype g)
{
    auto first = must_sample(state, problem, spec, g);
    Individual indiv(std::move(g), std::move(first));
    for (std::size_t k = 1; k < spec.samples; ++k) {
        indiv.add_sample(must_sample(state, problem, spec, indiv.genotype));
    }
    return indiv;
}

SampleFn sampler(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    return [&state, &problem, &spec](const Genotype& g) { return charged_sample(state, problem, spec, g); };
}

void record(RunState& state, const Genotype& g)
{
    if (state.record_accepted) {
        state.accepted.push_back(g);
    }
}

// Selects a batch of parents first, then mutates them all.
std::vector<Genotype> make_offspring(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    const auto selector = spec.in_cell_selector();
    std::vector<Genotype> parents;
    parents.reserve(spec.batch_size);
    for (std::size_t p = 0; p < spec.batch_size; ++p) {
        const auto cell = select_cell(state.grid, state.selection_rng);
        const auto slot = select_in_cell_slot(state.grid.cell(cell), selector, state.selection_rng);
        parents.push_back(state.grid.cell(cell)[slot].genotype);
    }
    std::vector<Genotype> offspring;
    offspring.reserve(parents.size());
    for (const auto& parent : parents) {
        offspring.push_back(mutate(parent, spec.mutation, problem.task.gene_bounds, state.variation_rng));
    }
    return offspring;
}

void insert_adaptive(RunState& state, const Problem& problem, const SampleFn& sample, Individual indiv)
{
    const auto cell = problem.geometry.locate(indiv.descriptor());
    if (state.grid.cell(cell).empty()) {
        record(state, indiv.genotype);
        state.grid.append(cell, std::move(indiv));
        return;
    }
    auto& elite = state.grid.occupant(cell, 0);
    if (adaptive_challenge(elite, indiv, sample) == ChallengeOutcome::replace) {
        record(state, indiv.genotype);
        state.grid.replace(cell, 0, std::move(indiv));
    }
}

// Ranked cells whose occupants follow their mean descriptor. Slot 0 of each
// cell is its elite.
class DriftingPlacer {
public:
    DriftingPlacer(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
        : state_(state), problem_(problem), sample_(sampler(state, problem, spec))
    {
    }

    void place(Individual indiv)
    {
        place_one(std::move(indiv));
        // Each relocation moves an individual to the cell of its current
        // mean descriptor; only re-sampling can start another one.
        while (!pending_.empty()) {
            auto next = std::move(pending_.front());
            pending_.pop_front();
            place_one(std::move(next));
        }
    }

private:
    void place_one(Individual indiv)
    {
        auto& grid = state_.grid;
        const auto cell = problem_.geometry.locate(indiv.descriptor());
        if (grid.cell(cell).empty()) {
            record(state_, indiv.genotype);
            grid.append(cell, std::move(indiv));
            return;
        }

        auto& elite = grid.occupant(cell, 0);
        if (adaptive_challenge(elite, indiv, sample_) == ChallengeOutcome::replace) {
            if (grid.cell(cell).full()) {
                grid.remove(cell, grid.cell(cell).size() - 1);
            }
            record(state_, indiv.genotype);
            grid.insert_at(cell, 0, std::move(indiv));
        } else {
            grid.rank_by_fitness(cell);
            if (problem_.geometry.locate(indiv.descriptor()) != cell) {
                ++state_.drifts;
                pending_.push_back(std::move(indiv));
            } else {
                join_ranked(cell, std::move(indiv));
            }
        }
        collect_drifters(cell);
    }

    void join_ranked(CellIndex cell, Individual indiv)
    {
        auto& grid = state_.grid;
        const auto& c = grid.cell(cell);
        if (c.full()) {
            if (!(indiv.fitness() > c[c.size() - 1].fitness())) {
                return;
            }
            grid.remove(cell, c.size() - 1);
        }
        std::size_t pos = 0;
        while (pos < c.size() && c[pos].fitness() >= indiv.fitness()) {
            ++pos;
        }
        grid.insert_at(cell, pos, std::move(indiv));
    }

    void collect_drifters(CellIndex cell)
    {
        auto& grid = state_.grid;
        std::size_t slot = 0;
        while (slot < grid.cell(cell).size()) {
            if (problem_.geometry.locate(grid.cell(cell)[slot].descriptor()) != cell) {
                ++state_.drifts;
                pending_.push_back(grid.remove(cell, slot));
            } else {
                ++slot;
            }
        }
    }

    RunState& state_;
    const Problem& problem_;
    SampleFn sample_;
    std::deque<Individual> pending_;
};

std::vector<Genotype> random_genotypes(const TaskSpec& task, std::size_t count, Rng& rng)
{
    std::vector<Genotype> out(count, Genotype(task.genotype_dim));
    for (auto& g : out) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = std::uniform_real_distribution<double>(task.gene_bounds[i].lower, task.gene_bounds[i].upper)(rng);
        }
    }
    return out;
}

void insert_batch(RunState& state, const Problem& problem, const AlgorithmSpec& spec, std::vector<Genotype> batch)
{
    switch (spec.variant) {
    case Variant::deep_grid:
        for (auto& g : batch) {
            auto e = must_sample(state, problem, spec, g);
            const auto cell = problem.geometry.locate(e.descriptor);
            record(state, g);
            insert_replace_random(state.grid, cell, Individual(std::move(g), std::move(e)), state.selection_rng);
        }
        break;
    case Variant::naive:
        for (auto& g : batch) {
            auto indiv = averaged_individual(state, problem, spec, std::move(g));
            const auto cell = problem.geometry.locate(indiv.descriptor());
            const Genotype copy = state.record_accepted ? indiv.genotype : Genotype{};
            if (insert_elitist(state.grid, cell, std::move(indiv))) {
                record(state, copy);
            }
        }
        break;
    case Variant::adaptive: {
        const auto sample = sampler(state, problem, spec);
        for (auto& g : batch) {
            auto e = charged_sample(state, problem, spec, g);
            if (!e) {
                break;
            }
            insert_adaptive(state, problem, sample, Individual(std::move(g), std::move(*e)));
        }
        break;
    }
    case Variant::adaptive_drift: {
        DriftingPlacer placer(state, problem, spec);
        for (auto& g : batch) {
            auto e = charged_sample(state, problem, spec, g);
            if (!e) {
                break;
            }
            placer.place(Individual(std::move(g), std::move(*e)));
        }
        break;
    }
    }
}

void require_variant(const AlgorithmSpec& spec, Variant v)
{
    if (spec.variant != v) {
        throw std::logic_error("generation called with a mismatched algorithm variant");
    }
}

}  // namespace

void adaptive_insert(RunState& state, const Problem& problem, const AlgorithmSpec& spec, Individual offspring)
{
    require_variant(spec, Variant::adaptive);
    insert_adaptive(state, problem, sampler(state, problem, spec), std::move(offspring));
}

void adaptive_drift_insert(RunState& state, const Problem& problem, const AlgorithmSpec& spec, Individual offspring)
{
    require_variant(spec, Variant::adaptive_drift);
    DriftingPlacer(state, problem, spec).place(std::move(offspring));
}

RunState initialize_grid(const Problem& problem, const AlgorithmSpec& spec, Rng variation, Rng noise, Rng selection,
                         std::uint64_t budget)
{
    spec.validate();
    if (spec.init_cost() > budget) {
        throw std::invalid_argument("budget " + std::to_string(budget) + " is below the initialization cost " +
                                    std::to_string(spec.init_cost()));
    }
    RunState state(Grid(problem.geometry.cell_count(), spec.grid_depth()), variation, noise, selection);
    state.budget = budget;
    auto batch = random_genotypes(problem.task, spec.init_size, state.variation_rng);
    insert_batch(state, problem, spec, std::move(batch));
    return state;
}

void deep_grid_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    require_variant(spec, Variant::deep_grid);
    insert_batch(state, problem, spec, make_offspring(state, problem, spec));
    ++state.generation;
}

void naive_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    require_variant(spec, Variant::naive);
    insert_batch(state, problem, spec, make_offspring(state, problem, spec));
    ++state.generation;
}

void adaptive_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    require_variant(spec, Variant::adaptive);
    insert_batch(state, problem, spec, make_offspring(state, problem, spec));
    ++state.generation;
}

void adaptive_drift_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    require_variant(spec, Variant::adaptive_drift);
    insert_batch(state, problem, spec, make_offspring(state, problem, spec));
    ++state.generation;
}

bool run_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec)
{
    switch (spec.variant) {
    case Variant::deep_grid:
        if (state.remaining() < spec.batch_size) {
            return false;
        }
        deep_grid_generation(state, problem, spec);
        return true;
    case Variant::naive:
        if (state.remaining() < spec.batch_size * spec.samples) {
            return false;
        }
        naive_generation(state, problem, spec);
        return true;
    case Variant::adaptive:
        if (state.remaining() < 1) {
            return false;
        }
        adaptive_generation(state, problem, spec);
        return true;
    case Variant::adaptive_drift:
        if (state.remaining() < 1) {
            return false;
        }
        adaptive_drift_generation(state, problem, spec);
        return true;
    }
    return false;
}

}  // namespace deepgrid
