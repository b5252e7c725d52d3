#include "clinduct/evolve.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "clinduct/harness.hpp"

namespace clinduct {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t uniform_index(std::size_t n, std::mt19937_64& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(double p, std::mt19937_64& rng) {
    if (p <= 0)
        return false;
    if (p >= 1)
        return true;
    return std::bernoulli_distribution(p)(rng);
}

}  // namespace

void GpConfig::validate() const {
    if (population_size == 0)
        throw std::invalid_argument("population_size must be positive");
    if (tournament_size == 0)
        throw std::invalid_argument("tournament_size must be positive");
    if (init_max_size == 0)
        throw std::invalid_argument("init_max_size must be positive");
    for (double p : {crossover_prob, mutate_delete_prob, mutate_replace_prob})
        if (!(p >= 0 && p <= 1))
            throw std::invalid_argument("probabilities must lie in [0, 1]");
    if (!(w_complexity >= 0))
        throw std::invalid_argument("w_complexity must be nonnegative");
    if (!(w_precision > 0))
        throw std::invalid_argument("w_precision must be positive");
    if (budget.max_steps == 0 || budget.max_term_size == 0)
        throw std::invalid_argument("reduction budgets must be positive");
}

std::size_t mismatch(std::string_view output, std::string_view target) {
    const std::size_t n = std::min(output.size(), target.size());
    std::size_t diff = target.size() - n;
    for (std::size_t i = 0; i < n; ++i)
        diff += output[i] != target[i];
    return diff;
}

double fitness(const Term& genome, std::string_view target, const Basis& basis, const GpConfig& config) {
    ReductionBudget b = config.budget;
    b.max_output = target.size();
    const auto out = stream_prefix(genome, basis, b);
    return config.w_complexity * static_cast<double>(size(genome)) +
           config.w_precision * static_cast<double>(mismatch(out.output, target));
}

std::pair<Term, Term> crossover_at(const Term& a, std::size_t ia, const Term& b, std::size_t ib) {
    const Term& sa = node_at(a, ia);
    const Term& sb = node_at(b, ib);
    return {replace_at(a, ia, sb), replace_at(b, ib, sa)};
}

std::pair<Term, Term> crossover(const Term& a, const Term& b, std::mt19937_64& rng) {
    const std::size_t ia = uniform_index(size(a), rng);
    const std::size_t ib = uniform_index(size(b), rng);
    return crossover_at(a, ia, b, ib);
}

Term mutate_delete(const Term& t, std::mt19937_64& rng) {
    const std::size_t n = size(t);
    if (n == 1)
        return t;
    return remove_at(t, 1 + uniform_index(n - 1, rng));
}

Term mutate_replace(const Term& t, std::span<const Symbol> alphabet, std::mt19937_64& rng) {
    if (alphabet.empty())
        throw std::invalid_argument("mutate_replace: empty alphabet");
    const std::size_t at = uniform_index(size(t), rng);
    const Symbol& s = alphabet[uniform_index(alphabet.size(), rng)];
    return relabel_at(t, at, s);
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (generation + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ (slot * 0x8cb92ba72f3d8dd7ULL + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

bool fitter(const Individual& a, const Individual& b) {
    if (a.fitness != b.fitness)
        return a.fitness < b.fitness;
    if (a.size != b.size)
        return a.size < b.size;
    return a.birth < b.birth;
}

Evolution::Evolution(const Basis& basis, std::string target, GpConfig config)
    : basis_(basis), target_(std::move(target)), config_(std::move(config)), alphabet_(basis.alphabet()),
      reducer_(basis) {
    config_.validate();
    if (target_.empty())
        throw std::invalid_argument("target string must not be empty");
    config_.budget.max_output = target_.size();
}

Individual Evolution::score(GraphReducer& reducer, Term genome, std::uint64_t birth) const {
    Individual ind;
    ind.size = clinduct::size(genome);
    const auto out = reducer.stream(genome, config_.budget);
    const std::size_t miss = mismatch(out.output, target_);
    ind.genome = std::move(genome);
    ind.output = out.output;
    ind.exact = miss == 0;
    ind.fitness = config_.w_complexity * static_cast<double>(ind.size) +
                  config_.w_precision * static_cast<double>(miss);
    ind.birth = birth;
    return ind;
}

Individual Evolution::evaluate(Term genome) { return score(reducer_, std::move(genome), births_++); }

void Evolution::evaluate_all(std::vector<Individual>& pending) {
    const unsigned threads = std::max(1u, config_.eval_threads);
    auto work = [&](GraphReducer& reducer, std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i)
            pending[i] = score(reducer, std::move(pending[i].genome), pending[i].birth);
    };
    if (threads == 1 || pending.size() < 2 * threads) {
        work(reducer_, 0, pending.size());
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (pending.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t from = t * chunk;
        const std::size_t to = std::min(pending.size(), from + chunk);
        if (from >= to)
            break;
        pool.emplace_back([&, from, to] {
            GraphReducer local(basis_);
            work(local, from, to);
        });
    }
    for (auto& th : pool)
        th.join();
}

Population Evolution::initial_population() {
    Population pop(config_.population_size);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto rng = derive_rng(config_.seed, 0, i);
        pop[i].genome = random_term(config_.init_max_size, alphabet_, rng);
        pop[i].birth = births_++;
    }
    evaluate_all(pop);
    std::sort(pop.begin(), pop.end(), fitter);
    return pop;
}

void Evolution::select(Population& pool) const {
    const auto keep = std::min(pool.size(), config_.population_size);
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), fitter);
    pool.resize(keep);
}

Population Evolution::next_generation(const Population& pop, std::size_t generation) {
    if (pop.empty())
        throw std::invalid_argument("next_generation: empty population");
    const std::size_t count = config_.tournament_size;
    std::vector<Individual> offspring;
    offspring.reserve(count);

    for (std::size_t pair = 0; 2 * pair < count; ++pair) {
        auto rng = derive_rng(config_.seed, generation, pair);
        const Individual* parents[2] = {&pop[uniform_index(pop.size(), rng)], &pop[uniform_index(pop.size(), rng)]};
        Term children[2];
        if (chance(config_.crossover_prob, rng)) {
            std::tie(children[0], children[1]) = crossover(parents[0]->genome, parents[1]->genome, rng);
        } else {
            children[0] = parents[0]->genome;
            children[1] = parents[1]->genome;
        }
        for (auto& child : children) {
            if (chance(config_.mutate_delete_prob, rng))
                child = mutate_delete(child, rng);
            if (chance(config_.mutate_replace_prob, rng))
                child = mutate_replace(child, alphabet_, rng);
        }
        for (std::size_t k = 0; k < 2 && 2 * pair + k < count; ++k) {
            const std::uint64_t birth = births_++;
            // An untouched parent copy adds nothing to the pool and is dropped.
            if (children[k] == parents[k]->genome)
                continue;
            Individual ind;
            ind.genome = std::move(children[k]);
            ind.birth = birth;
            offspring.push_back(std::move(ind));
        }
    }
    evaluate_all(offspring);

    Population pool = pop;
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    select(pool);
    return pool;
}

RunReport run_gp(const Task& task, const Basis& basis, const GpConfig& config) {
    Evolution evo(basis, task.target, config);
    RunReport report;
    report.task = task.name;
    report.basis = basis.spec();
    report.seed = config.seed;

    std::set<std::string> seen;
    auto census = [&](const Population& pop) {
        for (const auto& ind : pop) {
            if (!ind.exact)
                continue;
            if (seen.insert(render(ind.genome)).second) {
                ++report.solution_count;
                if (report.solutions.size() < config.max_recorded_solutions)
                    report.solutions.push_back(ind.genome);
            }
        }
    };
    auto observe = [&](const Population& pop, std::size_t generation) {
        report.fitness_trace.push_back(pop.front().fitness);
        const bool any_exact = std::any_of(pop.begin(), pop.end(), [](const Individual& i) { return i.exact; });
        if (any_exact && !report.first_exact_iteration)
            report.first_exact_iteration = generation;
        census(pop);
    };

    Population pop = evo.initial_population();
    observe(pop, 0);
    for (std::size_t g = 1; g <= config.iterations; ++g) {
        if (config.patience && report.first_exact_iteration && g - *report.first_exact_iteration > *config.patience)
            break;
        pop = evo.next_generation(pop, g);
        report.generations = g;
        observe(pop, g);
    }

    // Prefer the fittest exact individual as the reported model.
    auto best = std::find_if(pop.begin(), pop.end(), [](const Individual& i) { return i.exact; });
    report.best = best != pop.end() ? *best : pop.front();
    if (report.best.exact && task.prediction_horizon > 0)
        report.continuation = predict(task, report.best.genome, basis, task.prediction_horizon, config.budget);
    return report;
}

RunReport run_gp(const Task& task, const GpConfig& config) {
    const Basis basis = parse_basis(task.basis_spec);
    return run_gp(task, basis, config);
}

}  // namespace clinduct
