#include <doctest.h>

#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include "deepgrid/algorithms.hpp"
#include "deepgrid/random.hpp"
#include "test_util.hpp"

using namespace deepgrid;
using deepgrid::testing::make_individual;

namespace {

Problem rastrigin_problem(NoiseSpec noise = {})
{
    const auto task = rastrigin_spec();
    return make_problem(task, noise, CartesianGeometry(task.bd_bounds, {100, 100}));
}

Problem coarse_problem(std::vector<std::size_t> bins, NoiseSpec noise = {})
{
    const auto task = rastrigin_spec();
    return make_problem(task, noise, CartesianGeometry(task.bd_bounds, std::move(bins)));
}

RunState start(const Problem& p, const AlgorithmSpec& spec, std::uint64_t seed,
               std::uint64_t budget = std::numeric_limits<std::uint64_t>::max())
{
    return initialize_grid(p, spec, make_stream(seed, 0, "variation"), make_stream(seed, 0, "noise"),
                           make_stream(seed, 0, "selection"), budget);
}

std::multiset<Genotype> genotypes(const Grid& g)
{
    std::multiset<Genotype> out;
    for (auto c : g.occupied_cells()) {
        for (const auto& o : g.cell(c).occupants()) {
            out.insert(o.genotype);
        }
    }
    return out;
}

// Elite (slot 0) of every occupied cell, keyed by cell.
std::map<std::size_t, Individual> elites(const Grid& g)
{
    std::map<std::size_t, Individual> out;
    for (auto c : g.occupied_cells()) {
        auto e = g.cell(c)[0];
        e.sample_count = 1;
        out.emplace(c.value, std::move(e));
    }
    return out;
}

// Plain MAP-Elites written out longhand, drawing from the streams in the
// same order as the library: init genotypes, then per generation all parent
// selections, all mutations, then evaluate-and-insert.
Grid map_elites_oracle(const Problem& p, const AlgorithmSpec& spec, std::uint64_t seed, int generations)
{
    Rng variation = make_stream(seed, 0, "variation");
    Rng noise = make_stream(seed, 0, "noise");
    Rng selection = make_stream(seed, 0, "selection");
    Grid grid(p.geometry.cell_count(), 1);
    auto insert = [&](const Genotype& g) {
        const auto e = noisy_evaluate(p.evaluate, p.noise, g, noise);
        const auto cell = p.geometry.locate(e.descriptor);
        if (grid.cell(cell).empty()) {
            grid.append(cell, Individual(g, e));
        } else if (e.fitness > grid.cell(cell)[0].fitness()) {
            grid.replace(cell, 0, Individual(g, e));
        }
    };
    std::vector<Genotype> init(spec.init_size, Genotype(p.task.genotype_dim));
    for (auto& g : init) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& b = p.task.gene_bounds[i];
            g[i] = std::uniform_real_distribution<double>(b.lower, b.upper)(variation);
        }
    }
    for (const auto& g : init) {
        insert(g);
    }
    for (int gen = 0; gen < generations; ++gen) {
        std::vector<Genotype> parents;
        for (std::size_t k = 0; k < spec.batch_size; ++k) {
            parents.push_back(grid.cell(select_cell(grid, selection))[0].genotype);
        }
        std::vector<Genotype> children;
        for (const auto& parent : parents) {
            children.push_back(mutate(parent, spec.mutation, p.task.gene_bounds, variation));
        }
        for (const auto& c : children) {
            insert(c);
        }
    }
    return grid;
}

// Problem on [0, 2] x [0, 1] split into two cells at x = 1, whose evaluator
// replays a script per genotype (keyed by its first gene).
struct ScriptedProblem {
    std::shared_ptr<std::map<double, std::deque<Evaluation>>> script =
        std::make_shared<std::map<double, std::deque<Evaluation>>>();
    Problem problem;

    ScriptedProblem()
        : problem{rastrigin_spec(), {}, NoiseSpec{0.0, 0.0},
                  CartesianGeometry({{0.0, 2.0}, {0.0, 1.0}}, {2, 1})}
    {
        problem.evaluate = [s = script](std::span<const double> g) {
            auto& queue = s->at(g[0]);
            if (queue.empty()) {
                throw std::logic_error("script exhausted");
            }
            auto e = queue.front();
            queue.pop_front();
            return e;
        };
    }
};

Genotype tag(double id)
{
    Genotype g(6, 0.0);
    g[0] = id;
    return g;
}

Individual scripted(double id, double fitness, double x)
{
    return Individual(tag(id), Evaluation{fitness, {x, 0.5}});
}

}  // namespace

TEST_CASE("initialization charges init_size times samples")
{
    const auto p = rastrigin_problem();
    CHECK(start(p, AlgorithmSpec::deep_grid(50), 1).evaluations_used == 100);
    CHECK(start(p, AlgorithmSpec::naive(1), 1).evaluations_used == 100);
    CHECK(start(p, AlgorithmSpec::naive(50), 1).evaluations_used == 5000);
    CHECK(start(p, AlgorithmSpec::adaptive(), 1).evaluations_used == 100);
    CHECK(start(p, AlgorithmSpec::adaptive_drift(10), 1).evaluations_used == 100);

    auto zero = AlgorithmSpec::deep_grid(50);
    zero.init_size = 0;
    CHECK_THROWS_AS(start(p, zero, 1), std::invalid_argument);
    CHECK_THROWS_AS(start(p, AlgorithmSpec::naive(50), 1, 4999), std::invalid_argument);
}

TEST_CASE("spec labels and validation")
{
    CHECK(AlgorithmSpec::deep_grid(50).label() == "deep_grid_50");
    CHECK(AlgorithmSpec::naive(1).label() == "naive_1");
    CHECK(AlgorithmSpec::naive(50).label() == "naive_50");
    CHECK(AlgorithmSpec::adaptive().label() == "adaptive");
    CHECK(AlgorithmSpec::adaptive_drift(10).label() == "adaptive_drift_10");
    CHECK(AlgorithmSpec::baseline().label() == "baseline");
    CHECK(variant_from_string("deep_grid") == Variant::deep_grid);
    CHECK_THROWS(variant_from_string("cma"));
    auto bad = AlgorithmSpec::deep_grid(50);
    bad.mutation.per_gene_rate = 0.0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(AlgorithmSpec::adaptive_drift(1).validate());
}

TEST_CASE("deep-grid generation into a full single cell evicts exactly one occupant")
{
    const auto p = coarse_problem({1, 1});
    auto spec = AlgorithmSpec::deep_grid(2);
    spec.init_size = 2;
    spec.batch_size = 1;
    spec.mutation.per_gene_rate = 1.0;
    auto state = start(p, spec, 3);
    REQUIRE(state.grid.cell(CellIndex{0}).full());
    for (int i = 0; i < 50; ++i) {
        const auto before = genotypes(state.grid);
        const auto used = state.evaluations_used;
        deep_grid_generation(state, p, spec);
        const auto after = genotypes(state.grid);
        CHECK(state.evaluations_used == used + 1);
        CHECK(state.grid.total_individuals() == 2);
        std::size_t kept = 0;
        for (const auto& g : after) {
            kept += before.count(g);
        }
        CHECK(kept == 1);
    }
}

TEST_CASE("deep-grid offspring landing in an empty cell adds one to coverage")
{
    // Two cells split at x1 = 0; huge steps clamp x1 to either edge.
    const auto p = coarse_problem({2, 1});
    auto spec = AlgorithmSpec::deep_grid(50);
    spec.init_size = 1;
    spec.batch_size = 1;
    spec.mutation = {1.0, 100.0};
    auto state = start(p, spec, 4);
    REQUIRE(coverage(state.grid) == 1);
    const auto first = state.grid.occupied_cells()[0];
    int gen = 0;
    while (coverage(state.grid) == 1 && gen++ < 100) {
        deep_grid_generation(state, p, spec);
    }
    REQUIRE(coverage(state.grid) == 2);
    const CellIndex other{1 - first.value};
    CHECK(state.grid.cell(other).size() == 1);
    CHECK(state.grid.cell(first).size() == static_cast<std::size_t>(gen));
}

TEST_CASE("identical seeds give identical grids for every variant")
{
    const auto p = rastrigin_problem();
    for (const auto& spec : {AlgorithmSpec::deep_grid(50), AlgorithmSpec::naive(1), AlgorithmSpec::naive(5),
                             AlgorithmSpec::adaptive(), AlgorithmSpec::adaptive_drift(10)}) {
        auto a = start(p, spec, 5);
        auto b = start(p, spec, 5);
        for (int i = 0; i < 20; ++i) {
            run_generation(a, p, spec);
            run_generation(b, p, spec);
        }
        CHECK(a.grid == b.grid);
        CHECK(a.evaluations_used == b.evaluations_used);
        CHECK(a.generation == 20);

        auto c = start(p, spec, 6);
        for (int i = 0; i < 20; ++i) {
            run_generation(c, p, spec);
        }
        CHECK_FALSE(a.grid == c.grid);
    }
}

TEST_CASE("naive with one sample is plain MAP-Elites")
{
    const auto p = rastrigin_problem();
    const auto spec = AlgorithmSpec::naive(1);
    auto state = start(p, spec, 7);
    for (int i = 0; i < 30; ++i) {
        naive_generation(state, p, spec);
    }
    CHECK(state.grid == map_elites_oracle(p, spec, 7, 30));
    CHECK(state.evaluations_used == 100 + 30 * 100);
}

TEST_CASE("without noise, naive(50), adaptive and drifting variants keep MAP-Elites elites")
{
    const auto p = rastrigin_problem(NoiseSpec{0.0, 0.0});
    auto reference = AlgorithmSpec::naive(1);
    const auto oracle = elites(map_elites_oracle(p, reference, 8, 25));

    auto naive50 = AlgorithmSpec::naive(50);
    auto adaptive = AlgorithmSpec::adaptive();
    auto drift = AlgorithmSpec::adaptive_drift(10);
    for (const auto* spec : {&naive50, &adaptive, &drift}) {
        CAPTURE(spec->label());
        auto state = start(p, *spec, 8);
        for (int i = 0; i < 25; ++i) {
            REQUIRE(run_generation(state, p, *spec));
        }
        CHECK(elites(state.grid) == oracle);
        CHECK(state.drifts == 0);
    }
}

TEST_CASE("without noise, naive(50) accepts the same genotypes as naive(1)")
{
    const auto p = rastrigin_problem(NoiseSpec{0.0, 0.0});
    auto one = start(p, AlgorithmSpec::naive(1), 9);
    auto fifty = start(p, AlgorithmSpec::naive(50), 9);
    one.record_accepted = true;
    fifty.record_accepted = true;
    for (int i = 0; i < 20; ++i) {
        naive_generation(one, p, AlgorithmSpec::naive(1));
        naive_generation(fifty, p, AlgorithmSpec::naive(50));
    }
    CHECK(one.accepted.size() > 100);
    CHECK(one.accepted == fifty.accepted);
    CHECK(fifty.evaluations_used == 50 * one.evaluations_used);
}

TEST_CASE("naive averaging shrinks the error of stored fitness by sqrt(samples)")
{
    const auto p = coarse_problem({1, 1});
    auto sd_of_error = [&](std::size_t samples) {
        auto spec = AlgorithmSpec::naive(samples);
        spec.init_size = 1;
        double sum = 0.0;
        double sq = 0.0;
        constexpr int reps = 3000;
        for (int r = 0; r < reps; ++r) {
            const auto state = start(p, spec, 1000 + r);
            const auto& ind = state.grid.cell(CellIndex{0})[0];
            const double err = ind.fitness() - p.evaluate(ind.genotype).fitness;
            sum += err;
            sq += err * err;
        }
        const double mean = sum / reps;
        return std::sqrt(sq / reps - mean * mean);
    };
    const double sd1 = sd_of_error(1);
    const double sd50 = sd_of_error(50);
    CHECK(sd1 == doctest::Approx(0.05).epsilon(0.05));
    CHECK(sd1 / sd50 == doctest::Approx(std::sqrt(50.0)).epsilon(0.15));
}

TEST_CASE("adaptive challenge worked examples")
{
    std::size_t calls = 0;
    auto constant = [&calls](double f) {
        return SampleFn([&calls, f](const Genotype&) {
            ++calls;
            return std::optional<Evaluation>(Evaluation{f, {0.0, 0.0}});
        });
    };

    SUBCASE("better challenger with matched counts replaces without sampling")
    {
        auto elite = make_individual(-2.0);
        auto challenger = make_individual(-1.0);
        CHECK(adaptive_challenge(elite, challenger, constant(0.0)) == ChallengeOutcome::replace);
        CHECK(calls == 0);
    }
    SUBCASE("worse challenger is rejected and the elite gains one sample")
    {
        auto elite = make_individual(-1.0);
        auto challenger = make_individual(-2.0);
        CHECK(adaptive_challenge(elite, challenger, constant(-1.0)) == ChallengeOutcome::reject);
        CHECK(calls == 1);
        CHECK(elite.sample_count == 2);
        CHECK(challenger.sample_count == 1);
    }
    SUBCASE("a promising challenger is re-sampled up to the elite's count")
    {
        auto elite = make_individual(-2.0);
        elite.sample_count = 4;
        auto challenger = make_individual(-1.0);
        CHECK(adaptive_challenge(elite, challenger, constant(-1.0)) == ChallengeOutcome::replace);
        CHECK(calls == 3);
        CHECK(challenger.sample_count == 4);
    }
    SUBCASE("the challenger stops as soon as its mean falls below")
    {
        auto elite = make_individual(-2.0);
        elite.sample_count = 10;
        auto challenger = make_individual(-1.0);
        // Next sample drags the mean to -2.5.
        CHECK(adaptive_challenge(elite, challenger, constant(-4.0)) == ChallengeOutcome::reject);
        CHECK(challenger.sample_count == 2);
        CHECK(elite.sample_count == 11);
        CHECK(calls == 2);
    }
    SUBCASE("an exhausted budget rejects")
    {
        auto elite = make_individual(-2.0);
        elite.sample_count = 3;
        auto challenger = make_individual(-1.0);
        const SampleFn none = [](const Genotype&) { return std::optional<Evaluation>{}; };
        CHECK(adaptive_challenge(elite, challenger, none) == ChallengeOutcome::reject);
        CHECK(elite.sample_count == 3);
    }
}

TEST_CASE("without noise a truly worse challenger never wins")
{
    for (std::uint32_t count = 1; count <= 6; ++count) {
        auto elite = make_individual(-1.0);
        elite.sample_count = count;
        auto challenger = make_individual(-1.5);
        const SampleFn exact = [](const Genotype& g) {
            return std::optional<Evaluation>(Evaluation{g[0], {0.0, 0.0}});
        };
        CHECK(adaptive_challenge(elite, challenger, exact) == ChallengeOutcome::reject);
    }
}

TEST_CASE("adaptive elites stay pinned to their first cell")
{
    ScriptedProblem sp;
    auto spec = AlgorithmSpec::adaptive();
    RunState state(Grid(2, 1), Rng(1), Rng(2), Rng(3));
    state.grid.append(CellIndex{0}, scripted(1.0, 10.0, 0.9));
    // The elite's re-sample moves its mean descriptor to x = 1.2.
    (*sp.script)[1.0] = {Evaluation{10.0, {1.5, 0.5}}};
    adaptive_insert(state, sp.problem, spec, scripted(2.0, 1.0, 0.2));
    CHECK(state.evaluations_used == 1);
    const auto& elite = state.grid.cell(CellIndex{0})[0];
    CHECK(elite.genotype == tag(1.0));
    CHECK(elite.sample_count == 2);
    CHECK(sp.problem.geometry.locate(elite.descriptor()) == CellIndex{1});
    CHECK(state.grid.cell(CellIndex{1}).empty());
}

TEST_CASE("a drifting elite promotes its runner-up and moves into an empty cell")
{
    ScriptedProblem sp;
    auto spec = AlgorithmSpec::adaptive_drift(3);
    RunState state(Grid(2, 3), Rng(1), Rng(2), Rng(3));
    state.grid.append(CellIndex{0}, scripted(1.0, 10.0, 0.9));
    state.grid.append(CellIndex{0}, scripted(2.0, 5.0, 0.5));
    (*sp.script)[1.0] = {Evaluation{10.0, {1.5, 0.5}}};

    adaptive_drift_insert(state, sp.problem, spec, scripted(3.0, 1.0, 0.2));

    CHECK(state.evaluations_used == 1);
    CHECK(state.drifts == 1);
    const auto& home = state.grid.cell(CellIndex{0});
    REQUIRE(home.size() == 2);
    CHECK(home[0].genotype == tag(2.0));
    CHECK(home[1].genotype == tag(3.0));
    const auto& away = state.grid.cell(CellIndex{1});
    REQUIRE(away.size() == 1);
    CHECK(away[0].genotype == tag(1.0));
    CHECK(away[0].sample_count == 2);
    CHECK(away[0].descriptor()[0] == doctest::Approx(1.2));
}

TEST_CASE("a drifting elite challenges the elite of an occupied cell")
{
    ScriptedProblem sp;
    auto spec = AlgorithmSpec::adaptive_drift(3);
    RunState state(Grid(2, 3), Rng(1), Rng(2), Rng(3));
    state.grid.append(CellIndex{0}, scripted(1.0, 10.0, 0.9));
    state.grid.append(CellIndex{1}, scripted(4.0, 20.0, 1.8));
    (*sp.script)[1.0] = {Evaluation{10.0, {1.5, 0.5}}};
    // Drifter (10) loses to the resident (20), which gets re-sampled.
    (*sp.script)[4.0] = {Evaluation{20.0, {1.8, 0.5}}};

    adaptive_drift_insert(state, sp.problem, spec, scripted(3.0, 1.0, 0.2));

    CHECK(state.evaluations_used == 2);
    CHECK(state.drifts == 1);
    const auto& away = state.grid.cell(CellIndex{1});
    REQUIRE(away.size() == 2);
    CHECK(away[0].genotype == tag(4.0));
    CHECK(away[0].sample_count == 2);
    CHECK(away[1].genotype == tag(1.0));
    const auto& home = state.grid.cell(CellIndex{0});
    REQUIRE(home.size() == 1);
    CHECK(home[0].genotype == tag(3.0));
}

TEST_CASE("noisy drifting runs keep every occupant in its mean-descriptor cell")
{
    const auto p = rastrigin_problem();
    const auto spec = AlgorithmSpec::adaptive_drift(10);
    auto state = start(p, spec, 10);
    for (int i = 0; i < 100; ++i) {
        run_generation(state, p, spec);
    }
    CHECK(state.drifts > 0);
    for (auto c : state.grid.occupied_cells()) {
        const auto& cell = state.grid.cell(c);
        CHECK(cell.size() <= 10);
        for (std::size_t s = 0; s < cell.size(); ++s) {
            CHECK(p.geometry.locate(cell[s].descriptor()) == c);
            if (s > 0) {
                CHECK(cell[s - 1].fitness() >= cell[s].fitness());
            }
        }
    }
}

TEST_CASE("every charged evaluation is counted and the budget is never exceeded")
{
    auto task = rastrigin_spec();
    auto counter = std::make_shared<std::uint64_t>(0);
    const auto core = deterministic_evaluator(task.id);
    Problem p{task, [counter, core](std::span<const double> g) {
                  ++*counter;
                  return core(g);
              },
              NoiseSpec{}, CartesianGeometry(task.bd_bounds, {100, 100})};

    auto naive50 = AlgorithmSpec::naive(50);
    naive50.init_size = 10;
    for (const auto& spec : {AlgorithmSpec::deep_grid(50), AlgorithmSpec::naive(1), naive50,
                             AlgorithmSpec::adaptive(), AlgorithmSpec::adaptive_drift(10), AlgorithmSpec::baseline()}) {
        CAPTURE(spec.label());
        *counter = 0;
        constexpr std::uint64_t budget = 7777;
        auto state = start(p, spec, 11, budget);
        while (run_generation(state, p, spec)) {
        }
        CHECK(*counter == state.evaluations_used);
        CHECK(state.evaluations_used <= budget);
        if (spec.variant == Variant::adaptive || spec.variant == Variant::adaptive_drift) {
            CHECK(state.evaluations_used == budget);
        } else {
            const auto per_gen = spec.batch_size * spec.samples;
            CHECK(state.evaluations_used == spec.init_cost() + state.generation * per_gen);
            CHECK(budget - state.evaluations_used < per_gen);
        }
    }
}

TEST_CASE("the baseline ignores task noise")
{
    const auto noisy = rastrigin_problem();
    const auto clean = rastrigin_problem(NoiseSpec{0.0, 0.0});
    auto a = start(noisy, AlgorithmSpec::baseline(), 12);
    auto b = start(clean, AlgorithmSpec::naive(1), 12);
    for (int i = 0; i < 10; ++i) {
        run_generation(a, noisy, AlgorithmSpec::baseline());
        run_generation(b, clean, AlgorithmSpec::naive(1));
    }
    CHECK(a.grid == b.grid);
}
