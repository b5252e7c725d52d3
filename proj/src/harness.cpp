#include "clinduct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

namespace clinduct {

namespace {

constexpr const char* quasi_base = "0101100111010001100111010";
constexpr const char* quasi_tail = "01011001110100011001";

}  // namespace

GpConfig harness_config() {
    GpConfig c;
    c.patience = 50;
    return c;
}

std::vector<Task> builtin_tasks(bool include_optional) {
    std::vector<Task> tasks = {
        {"const18", std::string(18, '0'), "SK01", 6, std::nullopt},
        {"period01", "010101010101010101", "SKY01", 4, "0101"},
        {"period0111", "011101110111011101110111011101110111", "SKICBW01", 11, "01110111011"},
        {"quasi45", std::string(quasi_base) + quasi_tail, "SK01", 5, "11010"},
    };
    if (include_optional)
        tasks.push_back({"quasi70", std::string(quasi_base) + quasi_base + quasi_tail, "SK01", 5, "11010"});
    return tasks;
}

Task find_task(const std::string& name) {
    for (auto& t : builtin_tasks(true))
        if (t.name == name)
            return t;
    throw std::invalid_argument("unknown task '" + name + "'");
}

double median(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::string predict(const Task& task, const Term& best, const Basis& basis, std::size_t horizon,
                    ReductionBudget budget) {
    budget.max_output = task.target.size() + horizon;
    const auto out = stream_prefix(best, basis, budget);
    if (out.output.size() < task.target.size() || out.output.compare(0, task.target.size(), task.target) != 0)
        throw std::invalid_argument("predict: '" + render(best) + "' does not reproduce the target");
    return out.output.substr(task.target.size());
}

ExperimentSummary summarize(const Task& task, const Basis& basis, const std::vector<RunReport>& reports) {
    ExperimentSummary s;
    s.task = task.name;
    s.basis_spec = basis.spec();
    s.strip_residuals = basis.output_mode().strip_residuals;
    s.runs = reports.size();
    std::vector<double> firsts;
    std::set<std::string> census;
    std::size_t agree = 0;
    for (const auto& r : reports) {
        for (const auto& sol : r.solutions)
            census.insert(render(sol));
        if (!r.first_exact_iteration)
            continue;
        ++s.successes;
        firsts.push_back(static_cast<double>(*r.first_exact_iteration));
        if (task.expected_continuation && r.continuation &&
            r.continuation->compare(0, task.expected_continuation->size(), *task.expected_continuation) == 0 &&
            r.continuation->size() >= task.expected_continuation->size())
            ++agree;
    }
    s.success_rate = s.runs ? static_cast<double>(s.successes) / static_cast<double>(s.runs) : 0.0;
    if (!firsts.empty())
        s.median_first_exact_iteration = median(firsts);
    s.distinct_solutions = census.size();
    if (task.expected_continuation && s.successes > 0)
        s.continuation_agreement = static_cast<double>(agree) / static_cast<double>(s.successes);
    return s;
}

Experiment run_experiment(const Task& task, const Basis& basis, const GpConfig& config, std::size_t runs,
                          unsigned jobs) {
    if (runs == 0)
        throw std::invalid_argument("run_experiment: runs must be at least 1");
    config.validate();
    std::vector<RunReport> reports(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < runs; i = next++) {
            try {
                GpConfig c = config;
                c.seed = config.seed + i;
                reports[i] = run_gp(task, basis, c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(runs)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    Experiment e;
    e.summary = summarize(task, basis, reports);
    e.reports = std::move(reports);
    return e;
}

Experiment run_experiment(const Task& task, const std::string& basis_spec, const GpConfig& config,
                          std::size_t runs, unsigned jobs) {
    const Basis basis = parse_basis(basis_spec);
    return run_experiment(task, basis, config, runs, jobs);
}

std::vector<Experiment> compare_bases(const Task& task, const std::vector<Basis>& bases, const GpConfig& config,
                                      std::size_t runs, unsigned jobs) {
    if (bases.size() < 2)
        throw std::invalid_argument("compare_bases: need at least two bases");
    std::vector<Experiment> out;
    for (const auto& b : bases)
        out.push_back(run_experiment(task, b, config, runs, jobs));
    return out;
}

// ---------------------------------------------------------------------------
// Library extraction

namespace {

// Closed subexpressions: every partial application h a1..aj of every node.
void collect_subexpressions(const Term& t, std::vector<Term>& out) {
    Term prefix(t.head);
    out.push_back(prefix);
    for (const auto& a : t.args) {
        prefix.args.push_back(a);
        out.push_back(prefix);
    }
    for (const auto& a : t.args)
        collect_subexpressions(a, out);
}

std::size_t pattern_size(const Pattern& p) {
    std::size_t n = p.var > 0 ? 0 : 1;
    for (const auto& a : p.args)
        n += pattern_size(a);
    return n;
}

// Least general generalization; returns false when more than `max_vars`
// positions differ. Differing subtrees become fresh variables.
bool anti_unify(const Term& a, const Term& b, int max_vars, int& vars, Pattern& out) {
    if (a == b) {
        out = to_pattern(a);
        return true;
    }
    if (a.head == b.head && a.args.size() == b.args.size()) {
        out = Pattern::symbol(a.head);
        out.args.resize(a.args.size());
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!anti_unify(a.args[i], b.args[i], max_vars, vars, out.args[i]))
                return false;
        return true;
    }
    if (++vars > max_vars)
        return false;
    out = Pattern::variable(vars);
    return true;
}

bool match(const Pattern& p, const Term& t, std::vector<const Term*>& binds) {
    if (p.var > 0) {
        binds[static_cast<std::size_t>(p.var - 1)] = &t;
        return true;
    }
    if (p.head != t.head || p.args.size() != t.args.size())
        return false;
    for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!match(p.args[i], t.args[i], binds))
            return false;
    return true;
}

std::string pattern_key(const Pattern& p) { return render_pattern(p); }

}  // namespace

std::vector<Candidate> extract_subexpressions(const std::vector<Term>& solutions, std::size_t min_count,
                                              std::size_t min_size, int max_variables) {
    if (solutions.empty())
        throw std::invalid_argument("extract_subexpressions: no solutions");
    std::vector<Term> subs;
    for (const auto& s : solutions)
        collect_subexpressions(s, subs);

    std::map<std::string, std::pair<Term, std::size_t>> closed;
    for (const auto& s : subs) {
        auto [it, inserted] = closed.try_emplace(render(s), s, 0);
        ++it->second.second;
    }

    std::map<std::string, Candidate> found;
    for (const auto& [key, entry] : closed) {
        const auto& [term, count] = entry;
        const std::size_t n = size(term);
        if (count < min_count || n < min_size)
            continue;
        Candidate c{to_pattern(term), 0, count, n, static_cast<double>(count) * static_cast<double>(n - 1)};
        found.emplace(key, std::move(c));
    }

    if (max_variables > 0) {
        std::vector<const Term*> distinct;
        for (const auto& [key, entry] : closed)
            distinct.push_back(&entry.first);
        std::set<std::string> tried;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            for (std::size_t j = i + 1; j < distinct.size(); ++j) {
                const Term& a = *distinct[i];
                const Term& b = *distinct[j];
                if (a.head != b.head || a.args.size() != b.args.size())
                    continue;
                int vars = 0;
                Pattern p;
                if (!anti_unify(a, b, max_variables, vars, p) || vars == 0)
                    continue;
                const std::size_t n = pattern_size(p);
                if (n < min_size)
                    continue;
                const std::string key = pattern_key(p);
                if (!tried.insert(key).second)
                    continue;
                std::size_t occ = 0;
                std::vector<const Term*> binds(static_cast<std::size_t>(vars));
                for (const auto& [k2, entry] : closed)
                    if (match(p, entry.first, binds))
                        occ += entry.second;
                if (occ < min_count)
                    continue;
                Candidate c{p, vars, occ, n, static_cast<double>(occ) * static_cast<double>(n - 1)};
                found.emplace(key, std::move(c));
            }
        }
    }

    std::vector<Candidate> out;
    for (auto& [key, c] : found)
        out.push_back(std::move(c));
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score)
            return a.score > b.score;
        if (a.arity != b.arity)
            return a.arity < b.arity;
        return a.size > b.size;
    });
    return out;
}

Basis adopt_candidate(const Basis& basis, const Candidate& c, const std::string& name) {
    if (c.arity == 0) {
        std::vector<Term> none;
        return define_macro(basis, name, instantiate(c.pattern, none));
    }
    return define_combinator(basis, name, c.arity, c.pattern);
}

Term fold_candidate(const Term& t, const Candidate& c, const std::string& name) {
    std::vector<const Term*> binds(static_cast<std::size_t>(c.arity));
    for (std::size_t j = t.args.size() + 1; j-- > 0;) {
        Term prefix(t.head, std::vector<Term>(t.args.begin(), t.args.begin() + static_cast<std::ptrdiff_t>(j)));
        if (!match(c.pattern, prefix, binds))
            continue;
        Term folded(Symbol::combinator(name));
        for (const Term* b : binds)
            folded.args.push_back(fold_candidate(*b, c, name));
        for (std::size_t k = j; k < t.args.size(); ++k)
            folded.args.push_back(fold_candidate(t.args[k], c, name));
        return folded;
    }
    Term out(t.head);
    for (const auto& a : t.args)
        out.args.push_back(fold_candidate(a, c, name));
    return out;
}

// ---------------------------------------------------------------------------
// Printed solutions with doubtful bracketing

std::vector<std::string> bracket_repairs(const std::string& text) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    auto consider = [&](std::string candidate) {
        try {
            const std::string canon = render(parse(candidate));
            if (seen.insert(canon).second)
                out.push_back(canon);
        } catch (const ParseError&) {
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '(' || text[i] == ')')
            consider(text.substr(0, i) + text.substr(i + 1));
    for (std::size_t i = 0; i <= text.size(); ++i) {
        consider(text.substr(0, i) + "(" + text.substr(i));
        consider(text.substr(0, i) + ")" + text.substr(i));
    }
    return out;
}

PrintedSolutionCheck check_printed_solution(const std::string& text, const Task& task, const Basis& basis,
                                            ReductionBudget budget) {
    PrintedSolutionCheck check;
    check.text = text;
    budget.max_output = task.target.size();
    auto reproduces = [&](const Term& t) { return stream_prefix(t, basis, budget).output == task.target; };
    try {
        check.reproduces = reproduces(parse(text));
        check.parses = true;
    } catch (const ParseError&) {
    }
    if (!check.reproduces) {
        check.repairs_tried = bracket_repairs(text);
        for (const auto& r : check.repairs_tried)
            if (reproduces(parse(r)))
                check.repairs_reproducing.push_back(r);
    }
    return check;
}

// ---------------------------------------------------------------------------
// Task files

std::vector<Task> parse_task_file_text(std::string_view text) {
    std::vector<Task> tasks;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        Task t;
        if (!(ls >> t.name))
            continue;
        long long horizon = -1;
        if (!(ls >> t.target >> t.basis_spec >> horizon) || horizon < 0)
            throw std::invalid_argument("task file line " + std::to_string(line_no) +
                                        ": expected 'name target basis horizon [continuation]'");
        t.prediction_horizon = static_cast<std::size_t>(horizon);
        std::string cont;
        if (ls >> cont)
            t.expected_continuation = cont;
        if (t.target.empty())
            throw std::invalid_argument("task file line " + std::to_string(line_no) + ": empty target");
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::vector<Task> load_task_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open task file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_task_file_text(ss.str());
}

}  // namespace clinduct
