#include "clinduct/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "clinduct/harness.hpp"
#include "clinduct/report.hpp"

namespace clinduct {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CLINDUCT_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string_view(env).size())
                return v;
        } catch (const std::exception&) {
        }
        throw UsageError("CLINDUCT_SEED must be a nonnegative integer");
    }
    return 1;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

struct BasisOptions {
    std::string spec;
    std::string file;
    bool strip = false;
    std::vector<std::string> maps;  // NAME=G

    void add(CLI::App& cmd, const std::string& default_spec) {
        spec = default_spec;
        cmd.add_option("--basis", spec, "basis spec such as SK01 or SKICBW01")->capture_default_str();
        cmd.add_option("--basis-file", file, "basis file (overrides --basis)");
        cmd.add_flag("--strip-residuals", strip, "skip residual combinators in data output");
        cmd.add_option("--map", maps, "combinator output mapping NAME=G for terminal-free bases");
    }

    Basis build() const {
        Basis b = file.empty() ? parse_basis(spec, mapping()) : load_basis_file(file);
        if (strip)
            b = b.with_strip_residuals(true);
        return b;
    }

    std::optional<std::map<std::string, char>> mapping() const {
        if (maps.empty())
            return std::nullopt;
        std::map<std::string, char> m;
        for (const auto& entry : maps) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || entry.size() != eq + 2)
                throw UsageError("--map expects NAME=G, got '" + entry + "'");
            m[entry.substr(0, eq)] = entry[eq + 1];
        }
        return m;
    }
};

struct GpOptions {
    GpConfig config = harness_config();
    std::size_t patience = 50;
    bool no_patience = false;
    std::size_t max_steps = 3000;
    std::size_t max_size = 100000;

    void add(CLI::App& cmd) {
        config.seed = default_seed();
        cmd.add_option("--population", config.population_size, "population size")->capture_default_str();
        cmd.add_option("--tournament", config.tournament_size, "offspring per generation")->capture_default_str();
        cmd.add_option("--iterations", config.iterations, "generations")->capture_default_str();
        cmd.add_option("--wc", config.w_complexity, "complexity weight")->capture_default_str();
        cmd.add_option("--wp", config.w_precision, "precision weight")->capture_default_str();
        cmd.add_option("--crossover", config.crossover_prob, "crossover probability")->capture_default_str();
        cmd.add_option("--delete", config.mutate_delete_prob, "subtree deletion probability")->capture_default_str();
        cmd.add_option("--replace", config.mutate_replace_prob, "head replacement probability")
            ->capture_default_str();
        cmd.add_option("--init-size", config.init_max_size, "maximum size of initial terms")->capture_default_str();
        cmd.add_option("--seed", config.seed, "base seed (CLINDUCT_SEED when unset)")->capture_default_str();
        cmd.add_option("--patience", patience, "generations to continue after the first exact solution")
            ->capture_default_str();
        cmd.add_flag("--no-patience", no_patience, "always run every generation");
        cmd.add_option("--max-steps", max_steps, "reduction steps per evaluation")->capture_default_str();
        cmd.add_option("--max-size", max_size, "graph size limit per evaluation")->capture_default_str();
        cmd.add_option("--eval-threads", config.eval_threads, "threads per generation")->capture_default_str();
    }

    GpConfig build() const {
        GpConfig c = config;
        c.patience = no_patience ? std::nullopt : std::optional<std::size_t>(patience);
        c.budget.max_steps = max_steps;
        c.budget.max_term_size = max_size;
        c.validate();
        return c;
    }
};

std::string optional_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "-"; }

void print_run(std::ostream& out, const RunReport& r) {
    out << "seed " << r.seed << ": " << (r.best.exact ? "exact" : "inexact") << " first "
        << optional_text(r.first_exact_iteration) << " best " << render(r.best.genome) << " fitness "
        << format_number(r.best.fitness) << " continuation " << (r.continuation ? *r.continuation : "-") << '\n';
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw UsageError("cannot write '" + path + "'");
    f << content;
}

void write_reports(const std::string& prefix, const std::vector<Experiment>& experiments) {
    std::ostringstream jsonl, csv;
    std::vector<ExperimentSummary> rows;
    for (const auto& e : experiments) {
        write_run_reports(jsonl, e.reports, e.summary.strip_residuals);
        rows.push_back(e.summary);
    }
    write_summary_csv(csv, rows);
    write_file(prefix + ".jsonl", jsonl.str());
    write_file(prefix + ".csv", csv.str());
}

Task resolve_task(const std::string& task_name, const std::string& target, std::size_t horizon,
                  const std::string& tasks_file) {
    if (!task_name.empty() && !target.empty())
        throw UsageError("give either --task or --target, not both");
    if (!task_name.empty()) {
        if (!tasks_file.empty()) {
            for (auto& t : load_task_file(tasks_file))
                if (t.name == task_name)
                    return t;
            throw UsageError("task '" + task_name + "' not found in " + tasks_file);
        }
        return find_task(task_name);
    }
    if (target.empty())
        throw UsageError("a non-empty --target or a --task is required");
    return Task{"custom", target, "SK01", horizon, std::nullopt};
}

// ---------------------------------------------------------------------------

struct ReduceCommand {
    std::string expr;
    BasisOptions basis;
    std::size_t max_steps = 3000;
    std::size_t max_size = 100000;
    std::size_t max_output = 64;
    std::string mode = "data";
    std::string strategy = "lazy";
    bool trace = false;
    bool show_term = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("reduce", "reduce an expression and print its output");
        cmd->add_option("expr", expr, "expression")->required();
        basis.add(*cmd, "SKICBWY01");
        cmd->add_option("--max-steps", max_steps, "reduction step budget")->capture_default_str();
        cmd->add_option("--max-size", max_size, "term size budget")->capture_default_str();
        cmd->add_option("--max-output", max_output, "output symbol cap")->capture_default_str();
        cmd->add_option("--mode", mode, "data | combinators")
            ->check(CLI::IsMember({"data", "combinators"}))
            ->capture_default_str();
        cmd->add_option("--strategy", strategy, "lazy | outermost | innermost")
            ->check(CLI::IsMember({"lazy", "outermost", "innermost"}))
            ->capture_default_str();
        cmd->add_flag("--trace", trace, "print each rewrite");
        cmd->add_flag("--term", show_term, "print the final term (tree reduction)");
        cmd->callback([this] { selected = true; });
    }

    int run(std::ostream& out) const {
        const Term t = parse(expr);
        Basis b = basis.build();
        if (mode == "combinators") {
            std::map<std::string, char> m = basis.mapping().value_or(std::map<std::string, char>{{"S", '0'}, {"K", '1'}});
            b = b.with_output_mode(OutputMode::combinators(std::move(m)));
        }
        ReductionBudget budget{max_steps, max_size, max_output};
        TraceSink sink;
        if (trace)
            sink = [&out](const TraceEvent& e) {
                out << "step " << e.step << " at " << e.position << " rule " << e.rule << '\n';
            };
        ReductionOutcome outcome;
        if (strategy == "lazy" && !show_term) {
            outcome = stream_prefix(t, b, budget, sink);
        } else {
            const auto s = strategy == "innermost" ? Strategy::innermost : Strategy::outermost;
            auto full = reduce_full(t, b, budget, s, sink);
            outcome = full.outcome;
            if (show_term)
                out << "term " << render(full.term) << '\n';
        }
        out << outcome.output << '\n';
        out << "status " << to_string(outcome.status) << '\n';
        out << "steps " << outcome.steps_used << '\n';
        return exit_ok;
    }

    bool selected = false;
};

struct SolveCommand {
    std::string task;
    std::string target;
    std::string tasks_file;
    std::size_t horizon = 5;
    BasisOptions basis;
    GpOptions gp;
    std::size_t runs = 1;
    unsigned jobs = 1;
    std::string report;
    bool selected = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("solve", "search for an expression producing a target string");
        cmd->add_option("--task", task, "built-in or task-file task name");
        cmd->add_option("--target", target, "target symbol string");
        cmd->add_option("--tasks-file", tasks_file, "task file for --task");
        cmd->add_option("--horizon", horizon, "prediction horizon for --target")->capture_default_str();
        basis.add(*cmd, "");
        gp.add(*cmd);
        cmd->add_option("--runs", runs, "independent runs with consecutive seeds")->capture_default_str();
        cmd->add_option("--jobs", jobs, "runs executed concurrently")->capture_default_str();
        cmd->add_option("--report", report, "write PREFIX.jsonl and PREFIX.csv");
        cmd->callback([this] { selected = true; });
    }

    int run(std::ostream& out) const {
        if (runs == 0)
            throw UsageError("--runs must be at least 1");
        Task t = resolve_task(task, target, horizon, tasks_file);
        BasisOptions bo = basis;
        if (bo.spec.empty())
            bo.spec = t.basis_spec;
        const Basis b = bo.build();
        for (char c : t.target)
            if (!b.has_terminal(std::string(1, c)) && b.output_mode().kind == OutputMode::Kind::data_terminals)
                throw UsageError(std::string("target symbol '") + c + "' is not a terminal of " + b.spec());
        const GpConfig config = gp.build();
        auto experiment = run_experiment(t, b, config, runs, jobs);
        for (const auto& r : experiment.reports)
            print_run(out, r);
        write_summary_csv(out, {experiment.summary});
        if (!report.empty())
            write_reports(report, {experiment});
        return experiment.summary.successes > 0 ? exit_ok : exit_failure;
    }
};

struct PredictCommand {
    std::string expr;
    std::string task;
    std::string target;
    std::string tasks_file;
    std::optional<std::size_t> horizon;
    BasisOptions basis;
    std::size_t max_steps = 3000;
    bool selected = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("predict", "print the continuation of an exact expression");
        cmd->add_option("expr", expr, "expression")->required();
        cmd->add_option("--task", task, "built-in or task-file task name");
        cmd->add_option("--target", target, "target symbol string");
        cmd->add_option("--tasks-file", tasks_file, "task file for --task");
        cmd->add_option("--horizon", horizon, "symbols to predict (task default otherwise)");
        basis.add(*cmd, "");
        cmd->add_option("--max-steps", max_steps, "reduction step budget")->capture_default_str();
        cmd->callback([this] { selected = true; });
    }

    int run(std::ostream& out, std::ostream& err) const {
        Task t = resolve_task(task, target, horizon.value_or(5), tasks_file);
        BasisOptions bo = basis;
        if (bo.spec.empty())
            bo.spec = t.basis_spec;
        const Basis b = bo.build();
        const std::size_t h = horizon.value_or(t.prediction_horizon);
        try {
            out << predict(t, parse(expr), b, h, ReductionBudget{max_steps, 100000, 0}) << '\n';
        } catch (const ParseError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return exit_failure;
        }
        return exit_ok;
    }
};

struct BenchCommand {
    std::string tasks;
    std::string bases = "SK01,SKICBW01,SKY01,SKICBWY01";
    std::string tasks_file;
    std::string strip = "off";
    std::size_t runs = 10;
    unsigned jobs = 1;
    std::string out_prefix;
    GpOptions gp;
    bool selected = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("bench", "compare bases over tasks with paired seeds");
        cmd->add_option("--tasks", tasks, "comma-separated task names (default: all built-in)");
        cmd->add_option("--tasks-file", tasks_file, "task file supplying the tasks");
        cmd->add_option("--bases", bases, "comma-separated basis specs")->capture_default_str();
        cmd->add_option("--strip", strip, "residual stripping: on | off | both")
            ->check(CLI::IsMember({"on", "off", "both"}))
            ->capture_default_str();
        cmd->add_option("--runs", runs, "runs per (task, basis)")->capture_default_str();
        cmd->add_option("--jobs", jobs, "runs executed concurrently")->capture_default_str();
        cmd->add_option("--out", out_prefix, "write PREFIX.csv and PREFIX.jsonl");
        gp.add(*cmd);
        cmd->callback([this] { selected = true; });
    }

    int run(std::ostream& out) const {
        if (runs == 0)
            throw UsageError("--runs must be at least 1");
        std::vector<Task> pool = tasks_file.empty() ? builtin_tasks(true) : load_task_file(tasks_file);
        std::vector<Task> chosen;
        if (tasks.empty()) {
            chosen = tasks_file.empty() ? builtin_tasks(false) : pool;
        } else {
            for (const auto& name : split_list(tasks)) {
                auto it = std::find_if(pool.begin(), pool.end(), [&](const Task& t) { return t.name == name; });
                if (it == pool.end())
                    throw UsageError("unknown task '" + name + "'");
                chosen.push_back(*it);
            }
        }
        std::vector<Basis> parsed;
        for (const auto& spec : split_list(bases))
            parsed.push_back(parse_basis(spec));
        if (parsed.empty())
            throw UsageError("--bases is empty");
        std::vector<bool> strips;
        if (strip != "on")
            strips.push_back(false);
        if (strip != "off")
            strips.push_back(true);

        const GpConfig config = gp.build();
        std::vector<Experiment> all;
        for (const auto& t : chosen)
            for (bool s : strips)
                for (const auto& b : parsed)
                    all.push_back(run_experiment(t, b.with_strip_residuals(s), config, runs, jobs));

        std::vector<ExperimentSummary> rows;
        for (const auto& e : all)
            rows.push_back(e.summary);
        write_summary_csv(out, rows);
        if (!out_prefix.empty())
            write_reports(out_prefix, all);
        return exit_ok;
    }
};

struct ExtractCommand {
    std::vector<std::string> exprs;
    std::string file;
    std::size_t min_count = 2;
    std::size_t min_size = 2;
    int max_vars = 2;
    std::size_t top = 10;
    bool selected = false;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("extract", "rank recurring subexpressions of solutions");
        cmd->add_option("exprs", exprs, "solution expressions");
        cmd->add_option("--file", file, "file with one solution per line, or a .jsonl report");
        cmd->add_option("--min-count", min_count, "minimum occurrences")->capture_default_str();
        cmd->add_option("--min-size", min_size, "minimum size")->capture_default_str();
        cmd->add_option("--max-vars", max_vars, "abstracted argument positions")->capture_default_str();
        cmd->add_option("--top", top, "candidates printed")->capture_default_str();
        cmd->callback([this] { selected = true; });
    }

    std::vector<Term> load() const {
        std::vector<Term> out;
        for (const auto& e : exprs)
            out.push_back(parse(e));
        if (file.empty())
            return out;
        std::ifstream in(file);
        if (!in)
            throw UsageError("cannot open '" + file + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#')
                continue;
            if (line[0] == '{') {
                for (const auto& s : nlohmann::json::parse(line).at("solutions"))
                    out.push_back(parse(s.get<std::string>()));
            } else {
                out.push_back(parse(line));
            }
        }
        return out;
    }

    int run(std::ostream& out) const {
        const auto solutions = load();
        if (solutions.empty())
            throw UsageError("no solutions given");
        const auto candidates = extract_subexpressions(solutions, min_count, min_size, max_vars);
        std::size_t shown = 0;
        for (const auto& c : candidates) {
            if (shown++ == top)
                break;
            out << format_number(c.score, 1) << ' ' << c.occurrences << ' ' << c.arity << ' '
                << (c.arity == 0 ? render(instantiate(c.pattern, {})) : render_pattern(c.pattern)) << '\n';
        }
        return exit_ok;
    }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Combinatory logic induction toolkit", "clinduct"};
    app.require_subcommand(1);
    ReduceCommand reduce;
    SolveCommand solve;
    PredictCommand predict_cmd;
    BenchCommand bench;
    ExtractCommand extract;
    try {
        reduce.add(app);
        solve.add(app);
        predict_cmd.add(app);
        bench.add(app);
        extract.add(app);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    try {
        if (reduce.selected)
            return reduce.run(out);
        if (solve.selected)
            return solve.run(out);
        if (predict_cmd.selected)
            return predict_cmd.run(out, err);
        if (bench.selected)
            return bench.run(out);
        if (extract.selected)
            return extract.run(out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const BasisError& e) {
        err << "basis error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace clinduct
