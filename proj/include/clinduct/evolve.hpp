#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clinduct/basis.hpp"
#include "clinduct/reduce.hpp"
#include "clinduct/term.hpp"

namespace clinduct {

struct Task {
    std::string name;
    std::string target;
    std::string basis_spec;
    std::size_t prediction_horizon = 0;
    std::optional<std::string> expected_continuation;
};

struct GpConfig {
    std::size_t population_size = 2000;
    std::size_t tournament_size = 4000;  // offspring generated per generation
    std::size_t iterations = 500;
    double w_complexity = 0.01;
    double w_precision = 1.0;
    double crossover_prob = 0.9;
    double mutate_delete_prob = 0.1;
    double mutate_replace_prob = 0.9;
    std::size_t init_max_size = 20;
    std::uint64_t seed = 1;
    /// max_output is ignored for fitness: emission is capped at the target length.
    ReductionBudget budget{3000, 100000, 0};
    /// Stop this many generations after the first exact solution; off when unset.
    std::optional<std::size_t> patience;
    /// Distinct exact genomes kept in a report (the count is always exact).
    std::size_t max_recorded_solutions = 100;
    /// Worker threads for fitness evaluation within a generation.
    unsigned eval_threads = 1;

    void validate() const;
};

struct Individual {
    Term genome;
    double fitness = 0;
    std::string output;
    bool exact = false;
    std::size_t size = 0;
    std::uint64_t birth = 0;  // creation order within a run; last tie-breaker
};

using Population = std::vector<Individual>;

struct RunReport {
    std::string task;
    std::string basis;
    std::uint64_t seed = 0;
    Individual best;
    std::optional<std::size_t> first_exact_iteration;
    std::vector<double> fitness_trace;  // index 0 is the initial population
    std::vector<Term> solutions;        // distinct exact genomes in discovery order
    std::size_t solution_count = 0;
    std::optional<std::string> continuation;
    std::size_t generations = 0;
};

/// Positionwise differences plus the shortfall; output beyond the target is ignored.
std::size_t mismatch(std::string_view output, std::string_view target);

double fitness(const Term& genome, std::string_view target, const Basis& basis, const GpConfig& config);

/// Swaps uniformly chosen subtrees of the two parents.
std::pair<Term, Term> crossover(const Term& a, const Term& b, std::mt19937_64& rng);
/// Crossover at fixed preorder positions.
std::pair<Term, Term> crossover_at(const Term& a, std::size_t ia, const Term& b, std::size_t ib);

/// Drops a uniformly chosen non-root subtree; a leaf is returned as is.
Term mutate_delete(const Term& t, std::mt19937_64& rng);
/// Relabels a uniformly chosen node with a uniformly chosen symbol.
Term mutate_replace(const Term& t, std::span<const Symbol> alphabet, std::mt19937_64& rng);

/// Independent generator for (seed, generation, slot); evaluation order
/// cannot affect results.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot);

/// Scores genomes against one target and breeds generations.
class Evolution {
public:
    Evolution(const Basis& basis, std::string target, GpConfig config);

    Individual evaluate(Term genome);
    Population initial_population();
    Population next_generation(const Population& pop, std::size_t generation);

    const GpConfig& config() const noexcept { return config_; }
    const std::string& target() const noexcept { return target_; }
    const Basis& basis() const noexcept { return basis_; }

private:
    Individual score(GraphReducer& reducer, Term genome, std::uint64_t birth) const;
    void evaluate_all(std::vector<Individual>& pending);
    void select(Population& pool) const;

    const Basis& basis_;
    std::string target_;
    GpConfig config_;
    std::vector<Symbol> alphabet_;
    GraphReducer reducer_;
    std::uint64_t births_ = 0;
};

/// Ordering used for elitist survival: fitness, then size, then birth.
bool fitter(const Individual& a, const Individual& b);

RunReport run_gp(const Task& task, const Basis& basis, const GpConfig& config);
RunReport run_gp(const Task& task, const GpConfig& config);

}  // namespace clinduct
