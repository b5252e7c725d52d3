#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clinduct/basis.hpp"
#include "clinduct/evolve.hpp"
#include "clinduct/reduce.hpp"
#include "clinduct/term.hpp"

namespace clinduct {

/// Library defaults with early stopping 50 generations after the first exact solution.
GpConfig harness_config();

/// const18, period01, period0111, quasi45; quasi70 only with `include_optional`.
std::vector<Task> builtin_tasks(bool include_optional = false);
/// Throws std::invalid_argument for an unknown name. quasi70 is always findable.
Task find_task(const std::string& name);

struct ExperimentSummary {
    std::string task;
    std::string basis_spec;
    bool strip_residuals = false;
    std::size_t runs = 0;
    std::size_t successes = 0;
    double success_rate = 0;
    std::optional<double> median_first_exact_iteration;  // over successful runs
    std::size_t distinct_solutions = 0;
    std::optional<double> continuation_agreement;  // over successful runs
};

struct Experiment {
    ExperimentSummary summary;
    std::vector<RunReport> reports;  // ordered by seed
};

/// Runs seeds config.seed + 0 .. runs-1; `jobs` runs execute concurrently.
Experiment run_experiment(const Task& task, const Basis& basis, const GpConfig& config, std::size_t runs,
                          unsigned jobs = 1);
Experiment run_experiment(const Task& task, const std::string& basis_spec, const GpConfig& config,
                          std::size_t runs, unsigned jobs = 1);

ExperimentSummary summarize(const Task& task, const Basis& basis, const std::vector<RunReport>& reports);

/// One experiment per basis with identical seed lists.
std::vector<Experiment> compare_bases(const Task& task, const std::vector<Basis>& bases, const GpConfig& config,
                                      std::size_t runs, unsigned jobs = 1);

/// Symbols emitted beyond the target; throws std::invalid_argument unless
/// `best` reproduces the target exactly.
std::string predict(const Task& task, const Term& best, const Basis& basis, std::size_t horizon,
                    ReductionBudget budget = {});

double median(std::vector<double> values);

struct Candidate {
    Pattern pattern;
    int arity = 0;                // number of abstracted positions
    std::size_t occurrences = 0;  // across all solutions, repeats included
    std::size_t size = 0;         // non-variable nodes
    double score = 0;             // occurrences * (size - 1)
};

/// Recurring subexpressions (partial applications included), plus patterns
/// with up to `max_variables` abstracted argument positions obtained by
/// anti-unifying pairs of subexpressions.
std::vector<Candidate> extract_subexpressions(const std::vector<Term>& solutions, std::size_t min_count,
                                              std::size_t min_size, int max_variables = 2);

/// Adds the candidate to `basis` as a macro (arity 0) or a combinator.
Basis adopt_candidate(const Basis& basis, const Candidate& c, const std::string& name);
/// Rewrites every instance of the candidate in `t` to use `name`.
Term fold_candidate(const Term& t, const Candidate& c, const std::string& name);

/// Parseable variants of `text` obtained by inserting or deleting one bracket.
std::vector<std::string> bracket_repairs(const std::string& text);

struct PrintedSolutionCheck {
    std::string text;
    bool parses = false;
    bool reproduces = false;                  // as printed
    std::vector<std::string> repairs_tried;
    std::vector<std::string> repairs_reproducing;
};

PrintedSolutionCheck check_printed_solution(const std::string& text, const Task& task, const Basis& basis,
                                            ReductionBudget budget = {});

/// Whitespace-separated `name target basis horizon [continuation]` lines.
std::vector<Task> parse_task_file_text(std::string_view text);
std::vector<Task> load_task_file(const std::string& path);

}  // namespace clinduct
