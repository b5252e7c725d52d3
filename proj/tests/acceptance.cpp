#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "clinduct/harness.hpp"
#include "naive_reducer.hpp"

using namespace clinduct;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::vector<Symbol> symbols(std::string_view glyphs) {
    std::vector<Symbol> out;
    for (char c : glyphs)
        out.push_back(std::isdigit(static_cast<unsigned char>(c)) ? Symbol::terminal(std::string(1, c))
                                                                  : Symbol::combinator(std::string(1, c)));
    return out;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : "none"; }

std::filesystem::path cli_path;

// ---------------------------------------------------------------------------

Verdict golden_reductions() {
    Verdict v;
    const Basis sk = parse_basis("SK01");
    v.require(render(step_at_root(parse("S10(01)"), sk)) == "1(01)(0(01))", "S10(01) -> 1(01)(0(01))");
    const auto r = reduce_full(parse("SKK0"), sk, ReductionBudget{});
    v.require(r.outcome.output == "0" && r.outcome.status == ReductionStatus::normal_form, "SKK0 -> 0");

    const Basis all = parse_basis("SKICBWY01");
    const auto alphabet = symbols("SKICBWY01");
    std::mt19937_64 rng(4242);
    using Law = std::function<Term(const Term&, const Term&, const Term&)>;
    const std::vector<std::pair<char, Law>> laws = {
        {'S', [](auto& x, auto& y, auto& z) { return apply(apply(x, {z}), {apply(y, {z})}); }},
        {'K', [](auto& x, auto&, auto&) { return x; }},
        {'I', [](auto& x, auto&, auto&) { return x; }},
        {'B', [](auto& x, auto& y, auto& z) { return apply(x, {apply(y, {z})}); }},
        {'C', [](auto& x, auto& y, auto& z) { return apply(x, {z, y}); }},
        {'W', [](auto& x, auto& y, auto&) { return apply(x, {y, y}); }},
        {'Y', [](auto& x, auto&, auto&) { return apply(x, {Term(Symbol::combinator("Y"), {x})}); }},
    };
    int checked = 0;
    for (const auto& [name, law] : laws) {
        const auto arity = static_cast<std::size_t>(builtin_rule(name).arity);
        for (int i = 0; i < 1000; ++i) {
            std::vector<Term> args = {random_term(8, alphabet, rng), random_term(8, alphabet, rng),
                                      random_term(8, alphabet, rng)};
            const Term expected = law(args[0], args[1], args[2]);
            args.resize(arity);
            const Term redex(Symbol::combinator(std::string(1, name)), args);
            if (step_at_root(redex, all) != expected) {
                v.require(false, std::string("rule ") + name + " on " + render(redex));
                break;
            }
            ++checked;
        }
    }
    v.note(std::to_string(checked) + " rule instances");
    return v;
}

Verdict solution_replay() {
    Verdict v;
    const Task p = find_task("period0111");
    const auto a = stream_prefix(parse("SWW(B(0111))"), parse_basis("SKICBW01"), ReductionBudget{3000, 100000, 36});
    v.require(a.output == p.target, "SWW(B(0111)) reproduces the 36-symbol target");
    const auto b =
        stream_prefix(parse("S(SS1)(S11)(S(SS)011)"), parse_basis("SK01"), ReductionBudget{3000, 100000, 47});
    v.require(b.output == p.target + "01110111011", "S(SS1)(S11)(S(SS)011) continues with 01110111011");
    const auto c = stream_prefix(parse("S(SSS)S(S(S(K(SK))))"), parse_basis("SK"), ReductionBudget{3000, 100000, 18});
    v.require(c.output == "010101010101010101", "S(SSS)S(S(S(K(SK)))) under SK as data");

    const Task q = find_task("quasi45");
    const Basis sk = parse_basis("SK01");
    const std::string printed = "S00(S10(011001(S101)0))";
    const auto d = stream_prefix(parse(printed), sk, ReductionBudget{3000, 100000, q.target.size()});
    if (d.output == q.target) {
        const std::string cont = predict(q, parse(printed), sk, 5);
        v.require(cont == "11010", printed + " continues with 11010, got " + cont);
        v.note(printed + " reproduces quasi45 and continues with " + cont);
    } else {
        v.note(printed + " does not reproduce quasi45 (got " + d.output + "), criterion 5 stands in");
    }
    return v;
}

Verdict engine_properties() {
    Verdict v;
    const Basis b = parse_basis("SKICBW01");
    const auto alphabet = symbols("SKICBW01");

    {
        std::mt19937_64 rng(707);
        int both = 0, attempts = 0, disagree = 0;
        const ReductionBudget budget{500, 5000, 100000};
        while (both < 1000 && attempts < 50000) {
            ++attempts;
            const Term t = random_term(15, alphabet, rng);
            const auto outer = reduce_full(t, b, budget, Strategy::outermost);
            if (outer.outcome.status != ReductionStatus::normal_form)
                continue;
            const auto inner = reduce_full(t, b, budget, Strategy::innermost);
            if (inner.outcome.status != ReductionStatus::normal_form)
                continue;
            ++both;
            disagree += outer.term != inner.term;
        }
        v.require(both == 1000, "1000 terminating terms for confluence");
        v.require(disagree == 0, std::to_string(disagree) + " confluence disagreements");
    }
    {
        std::mt19937_64 rng(313);
        int checked = 0, attempts = 0, bad = 0;
        const ReductionBudget big{5000, 20000, 10000};
        while (checked < 1000 && attempts < 50000) {
            ++attempts;
            const Term t = random_term(18, alphabet, rng);
            const auto naive = oracle::naive_stream(t, b, big);
            if (!naive.complete)
                continue;
            ++checked;
            const auto shared = stream_prefix(t, b, big);
            bad += shared.output != naive.output || shared.steps_used > naive.steps;
        }
        v.require(checked == 1000, "1000 terms for shared vs naive");
        v.require(bad == 0, std::to_string(bad) + " shared/naive mismatches");
    }
    {
        const Basis all = parse_basis("SKICBWY01");
        const auto alpha = symbols("SKICBWY01");
        std::mt19937_64 rng(191);
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            const Term t = random_term(15, alpha, rng);
            const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
            const auto lo = stream_prefix(t, all, ReductionBudget{300, 100000, k});
            const auto hi = stream_prefix(t, all, ReductionBudget{300, 100000, k + 1});
            bad += lo.output.size() > k || hi.output.compare(0, lo.output.size(), lo.output) != 0;
        }
        v.require(bad == 0, std::to_string(bad) + " prefix monotonicity violations");
    }
    {
        const Basis sk = parse_basis("SK01");
        const ReductionBudget big{1u << 20, 1u << 22, 1u << 22};
        Term chain = parse("1");
        std::vector<std::size_t> shared, naive;
        for (int d = 1; d <= 12; ++d) {
            chain = Term(Symbol::combinator("S"), {parse("0"), parse("0"), chain});
            shared.push_back(stream_prefix(chain, sk, big).steps_used);
            naive.push_back(oracle::naive_stream(chain, sk, big).steps);
        }
        bool linear = true;
        for (std::size_t d = 1; d <= 12; ++d)
            linear = linear && shared[d - 1] <= d;
        v.require(linear, "shared steps linear in depth");
        v.require(naive[11] > 4 * naive[5], "naive steps superlinear in depth");
        v.note("depth 12: shared " + std::to_string(shared[11]) + " steps, naive " + std::to_string(naive[11]));
    }
    return v;
}

GpConfig scaled(std::size_t iterations) {
    GpConfig c = harness_config();
    c.population_size = 500;
    c.tournament_size = 1000;
    c.iterations = iterations;
    c.patience = 0;  // first-exact generation is all these criteria read
    c.seed = 1;
    return c;
}

std::string describe(const ExperimentSummary& s) {
    return s.task + "/" + s.basis_spec + " " + std::to_string(s.successes) + "/" + std::to_string(s.runs) +
           " exact, median first " + opt(s.median_first_exact_iteration);
}

struct SharedRuns {
    std::optional<ExperimentSummary> period01_sky;
};
SharedRuns shared_runs;

Verdict gp_easy() {
    Verdict v;
    const auto sky = run_experiment(find_task("period01"), "SKY01", scaled(100), 10).summary;
    shared_runs.period01_sky = sky;
    v.require(sky.successes >= 8, "period01/SKY01 at least 8/10");
    v.require(sky.median_first_exact_iteration && *sky.median_first_exact_iteration <= 10,
              "period01/SKY01 median first-exact generation at most 10");
    v.note(describe(sky));
    const auto skicbw = run_experiment(find_task("period01"), "SKICBW01", scaled(150), 10).summary;
    v.require(skicbw.successes >= 6, "period01/SKICBW01 at least 6/10 within 150 generations");
    v.note(describe(skicbw));
    const auto zeros = run_experiment(find_task("const18"), "SK01", scaled(100), 10).summary;
    v.require(zeros.successes >= 8, "const18/SK01 at least 8/10");
    v.note(describe(zeros));
    return v;
}

Verdict gp_hard() {
    Verdict v;
    const Task q = find_task("quasi45");
    GpConfig desk = scaled(500);
    desk.patience.reset();
    const auto r = run_experiment(q, "SK01", desk, 10).summary;
    v.require(r.successes >= 3, "desk scale: at least 3/10 exact");
    v.require(r.continuation_agreement && *r.continuation_agreement >= 0.5,
              "desk scale: continuation 11010 in at least half of the exact runs");
    v.note("desk " + describe(r) + ", agreement " + opt(r.continuation_agreement));

    if (std::getenv("CLINDUCT_FULL_SCALE")) {
        GpConfig full = harness_config();
        full.patience.reset();
        const auto f = run_experiment(q, "SK01", full, 10).summary;
        v.require(f.successes > 5, "full scale: exact in a majority of runs");
        v.require(f.continuation_agreement && *f.continuation_agreement > 0.5,
                  "full scale: majority of exact runs predict 11010");
        v.note("full " + describe(f) + ", agreement " + opt(f.continuation_agreement));
    } else {
        v.note("full-scale job skipped (set CLINDUCT_FULL_SCALE=1)");
    }
    return v;
}

Verdict basis_orderings() {
    Verdict v;
    const Task p = find_task("period01");
    const auto sky = shared_runs.period01_sky ? *shared_runs.period01_sky
                                              : run_experiment(p, "SKY01", scaled(100), 10).summary;
    const auto wide = run_experiment(p, "SKICBWY01", scaled(100), 10).summary;
    const double inf = std::numeric_limits<double>::infinity();
    v.require(sky.median_first_exact_iteration.value_or(inf) < wide.median_first_exact_iteration.value_or(inf),
              "median first-exact generation SKY01 < SKICBWY01 on period01");
    v.note(describe(sky) + " vs " + describe(wide));

    const Task q = find_task("quasi45");
    const auto sk = run_experiment(q, "SK01", scaled(100), 10).summary;
    const auto y = run_experiment(q, "SKY01", scaled(100), 10).summary;
    v.require(sk.success_rate > y.success_rate, "success rate SK01 > SKY01 on quasi45");
    v.note(describe(sk) + " vs " + describe(y));
    return v;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path.string() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism() {
    Verdict v;
    if (!std::filesystem::exists(cli_path)) {
        v.require(false, "command-line binary not found at " + cli_path.string());
        return v;
    }
    const auto dir = std::filesystem::temp_directory_path() / ("clinduct_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto file = [&](const std::string& n) { return (dir / n).string(); };
    const std::string gp = " --population 120 --tournament 240 --iterations 25 --seed 5 ";

    const std::string solve = "solve --task period0111 --basis SKICBW01 --runs 4" + gp;
    run_cli(solve + "--report " + file("s1"));
    run_cli(solve + "--report " + file("s2"));
    run_cli(solve + "--jobs 3 --report " + file("s3"));
    const std::string bench = "bench --tasks period01,const18 --bases SK01,SKY01 --runs 3 --strip both" + gp;
    run_cli(bench + "--out " + file("b1"));
    run_cli(bench + "--out " + file("b2"));
    run_cli(bench + "--jobs 2 --out " + file("b3"));

    for (const std::string stem : {"s", "b"}) {
        for (const std::string ext : {".jsonl", ".csv"}) {
            const std::string first = slurp(file(stem + "1") + ext);
            v.require(!first.empty(), stem + "1" + ext + " written");
            v.require(first == slurp(file(stem + "2") + ext), stem + ext + " identical on repeat");
            v.require(first == slurp(file(stem + "3") + ext), stem + ext + " identical under --jobs");
        }
    }
    std::filesystem::remove_all(dir);
    v.note("solve and bench reports compared across 3 invocations each");
    return v;
}

Verdict residual_stripping() {
    Verdict v;
    v.require(planarize(parse("01S01S01S"), OutputMode::data(true)) == "010101", "stripped planarization");
    v.require(planarize(parse("01S01S01S"), OutputMode::data(false)) == "01S01S01S", "unstripped planarization");
    const auto s = stream_prefix(parse("01S01S01S"), parse_basis("SK01").with_strip_residuals(true),
                                 ReductionBudget{100, 100000, 64});
    v.require(s.output == "010101", "stripped streaming");
    return v;
}

void records() {
    const auto a = check_printed_solution("W0(W1(W(S(0110)(S(11)01)0))", find_task("quasi45"),
                                          parse_basis("SKICBW01"));
    std::cout << "record: W0(W1(W(S(0110)(S(11)01)0)) parses " << a.parses << ", reproduces quasi45 "
              << a.reproduces << ", " << a.repairs_reproducing.size() << " of " << a.repairs_tried.size()
              << " one-bracket repairs reproduce it";
    for (const auto& r : a.repairs_reproducing)
        std::cout << " " << r;
    std::cout << '\n';
    const auto b = check_printed_solution("S0(S00)(S10(01(10(01(1101)0))))", find_task("quasi70"),
                                          parse_basis("SK01"));
    std::cout << "record: S0(S00)(S10(01(10(01(1101)0)))) parses " << b.parses << ", reproduces quasi70 "
              << b.reproduces << ", " << b.repairs_reproducing.size() << " of " << b.repairs_tried.size()
              << " one-bracket repairs reproduce it";
    for (const auto& r : b.repairs_reproducing)
        std::cout << " " << r;
    std::cout << '\n';

    const Term pa = parse("S(SSS)S(S(K(SK)))");
    const Term pb = parse("S(SI)(S(S(SS)))(S(KK))");
    const std::string printed_first = "S(SSS)S(SI)";
    const std::string printed_second = "S(S(S(K(SK))))(S(S(SS)))(S(KK))";
    std::cout << "record: crossover node pairs producing the printed offspring:";
    bool any = false;
    for (std::size_t i = 0; i < size(pa); ++i) {
        for (std::size_t j = 0; j < size(pb); ++j) {
            const auto [x, y] = crossover_at(pa, i, pb, j);
            const bool first = render(x) == printed_first;
            const bool second = render(y) == printed_second;
            if (first || second) {
                any = true;
                std::cout << " (" << i << "," << j << ")" << (first ? " first" : "") << (second ? " second" : "");
            }
        }
    }
    std::cout << (any ? "" : " none") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* bin = std::getenv("CLINDUCT_BIN"))
        cli_path = bin;
    else
        cli_path = std::filesystem::absolute(argv[0]).parent_path().parent_path() / "clinduct";
    (void)argc;

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"golden reductions", golden_reductions},
        {"known-solution replay", solution_replay},
        {"reduction-engine properties", engine_properties},
        {"GP easy tasks", gp_easy},
        {"GP hard task", gp_hard},
        {"basis-dependence orderings", basis_orderings},
        {"report determinism", determinism},
        {"residual-stripping equivalence", residual_stripping},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && v.pass;
        std::cout << "criterion " << i + 1 << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[i].first << " ("
                  << v.detail << "; " << fmt(std::round(secs * 10) / 10) << " s)" << std::endl;
    }
    records();
    return all ? 0 : 1;
}
