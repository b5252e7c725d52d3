#include "doctest.h"

#include <random>

#include "clinduct/basis.hpp"
#include "clinduct/reduce.hpp"

using namespace clinduct;

namespace {

Term var_free_term(std::mt19937_64& rng, std::size_t max_size) {
    static const std::vector<Symbol> alphabet = {Symbol::combinator("S"), Symbol::combinator("K"),
                                                 Symbol::terminal("0"), Symbol::terminal("1")};
    return random_term(max_size, alphabet, rng);
}

}  // namespace

TEST_CASE("built-in rules have the expected arities and templates") {
    const auto& rules = builtin_rules();
    REQUIRE(rules.size() == 7);
    const std::pair<const char*, int> expected[] = {{"S", 3}, {"K", 2}, {"I", 1}, {"B", 3},
                                                    {"C", 3}, {"W", 2}, {"Y", 1}};
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(rules[i].name == expected[i].first);
        CHECK(rules[i].arity == expected[i].second);
    }
    const Term a = parse("0"), b = parse("1"), c = parse("1S");
    CHECK(instantiate(builtin_rule('K').body, std::vector<Term>{a, b}) == a);
    CHECK(render(instantiate(builtin_rule('C').body, std::vector<Term>{a, b, c})) == "0(1S)1");
    CHECK(render(instantiate(builtin_rule('W').body, std::vector<Term>{a, b})) == "011");
    CHECK(render(instantiate(builtin_rule('Y').body, std::vector<Term>{parse("01")})) == "01(Y(01))");
}

TEST_CASE("parse_basis") {
    const Basis sk01 = parse_basis("SK01");
    CHECK(sk01.rules().size() == 2);
    CHECK(sk01.terminals() == std::vector<std::string>{"0", "1"});
    CHECK(sk01.output_mode().kind == OutputMode::Kind::data_terminals);

    const Basis sky = parse_basis("SKY01");
    CHECK(sky.find_rule("Y") != nullptr);
    CHECK(sky.terminals().size() == 2);

    const Basis sk = parse_basis("SK");
    CHECK(sk.terminals().empty());
    CHECK(sk.output_mode().kind == OutputMode::Kind::combinators_as_data);
    CHECK(sk.output_mode().mapping.at("S") == '0');
    CHECK(sk.output_mode().mapping.at("K") == '1');

    CHECK_THROWS_AS(parse_basis("SKQ01"), BasisError);
    CHECK_THROWS_AS(parse_basis("SKY"), BasisError);  // no mapping for Y
    CHECK_THROWS_AS(parse_basis("01"), BasisError);
    CHECK_THROWS_AS(parse_basis("SSK01"), BasisError);
    CHECK_NOTHROW(parse_basis("SKY", std::map<std::string, char>{{"S", '0'}, {"K", '1'}, {"Y", '1'}}));
}

TEST_CASE("property: basis spec strings round-trip") {
    for (const char* spec : {"SK01", "SKICBW01", "SKY01", "SKICBWY01", "SK"}) {
        const Basis b = parse_basis(spec);
        CHECK(b.spec() == spec);
        CHECK(parse_basis(b.spec()) == b);
        CHECK(parse_basis_file_text(render_basis_file(b)) == b);
    }
}

TEST_CASE("define_combinator adds a rule that behaves like its template") {
    const Basis base = parse_basis("SKICBW01");
    const Basis ext = define_combinator(base, "rep", 1, "SWW(B x1)");
    CHECK(ext.rules().size() == base.rules().size() + 1);
    for (std::size_t i = 0; i < base.rules().size(); ++i)
        CHECK(ext.rules()[i] == base.rules()[i]);

    ReductionBudget budget;
    budget.max_output = 24;
    const auto out = stream_prefix(parse("<rep>(0111)"), ext, budget);
    CHECK(out.output == "011101110111011101110111");

    CHECK_THROWS_AS(define_combinator(base, "S", 3, "x1"), BasisError);
    CHECK_THROWS_AS(define_combinator(base, "Q", 1, "x1 x2"), BasisError);
}

TEST_CASE("Y defined on an SK-only basis") {
    const Basis sk01 = parse_basis("SK01");
    const Basis with_y = define_combinator(sk01, "Y", 1, render_pattern(builtin_rule('Y').body));
    ReductionBudget budget;
    budget.max_output = 8;
    CHECK(stream_prefix(parse("Y(01)"), with_y, budget).output == "01010101");

    // A combinators-as-data basis gets an output glyph for the new name.
    const Basis sk_y = define_combinator(parse_basis("SK"), "Y", 1, "x1 (Y x1)");
    CHECK(sk_y.output_mode().mapping.contains("Y"));
}

TEST_CASE("macros: arity-0 definitions expand in place") {
    const Basis b = define_macro(parse_basis("SKICBW01"), "sww", parse("SWW"));
    CHECK(render(expand_macros(parse("<sww>(B(01))"), b)) == "SWW(B(01))");
    ReductionBudget budget;
    budget.max_output = 10;
    CHECK(stream_prefix(parse("<sww>(B(01))"), b, budget).output == "0101010101");
    CHECK_THROWS_AS(define_macro(b, "sww", parse("S")), BasisError);
}

TEST_CASE("basis files") {
    const Basis b = parse_basis_file_text(
        "# a learned library\n"
        "basis SKICBW01\n"
        "<rep> 1 := SWW(B x1)\n"
        "Q 2 := x2 x1   # swap\n");
    CHECK(b.find_rule("rep") != nullptr);
    CHECK(b.find_rule("Q")->arity == 2);
    CHECK(parse_basis_file_text(render_basis_file(b)) == b);

    const Basis own = parse_basis_file_text("B 3 := x1(x2 x3)\nterminal 0\nterminal 1\n");
    CHECK(own.find_rule("B")->body == builtin_rule('B').body);

    const Basis comb = parse_basis_file_text("basis SKI\nmap S 0\nmap K 1\nmap I 1\n");
    CHECK(comb.output_mode().kind == OutputMode::Kind::combinators_as_data);
    CHECK(comb.output_mode().mapping.at("I") == '1');

    CHECK_THROWS_AS(parse_basis_file_text("basis SKI\n"), BasisError);  // I unmapped
    CHECK_THROWS_AS(parse_basis_file_text("Q 1 := x1 x2\nterminal 0\n"), BasisError);
    CHECK_THROWS_AS(parse_basis_file_text("Q 1 = x1\n"), BasisError);
}

TEST_CASE("property: a user-defined combinator agrees with its template") {
    // T x y := S x (K y) y, compared against the instantiated template.
    const Basis base = parse_basis("SKICBW01");
    const Basis ext = define_combinator(base, "T", 2, "S x1 (K x2) x2");
    std::mt19937_64 rng(3);
    ReductionBudget budget;
    budget.max_output = 40;
    budget.max_steps = 2000;
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const Term a = var_free_term(rng, 6);
        const Term b = var_free_term(rng, 6);
        const Term with_rule = parse("<T>(" + render(a) + ")(" + render(b) + ")");
        const Term expanded = instantiate(ext.find_rule("T")->body, std::vector<Term>{a, b});
        const auto r1 = stream_prefix(with_rule, ext, budget);
        const auto r2 = stream_prefix(expanded, ext, budget);
        if (r2.status != ReductionStatus::normal_form)
            continue;
        ++compared;
        REQUIRE(r1.output == r2.output);
    }
    CHECK(compared > 500);
}

TEST_CASE("property: adding an unused rule does not change reductions") {
    const Basis base = parse_basis("SK01");
    const Basis ext = define_combinator(base, "Z", 2, "x2 x1 x1");
    std::mt19937_64 rng(11);
    ReductionBudget budget;
    budget.max_output = 30;
    budget.max_steps = 500;
    for (int i = 0; i < 1000; ++i) {
        const Term t = var_free_term(rng, 15);
        const auto a = stream_prefix(t, base, budget);
        const auto b = stream_prefix(t, ext, budget);
        REQUIRE(a.output == b.output);
        REQUIRE(a.status == b.status);
        REQUIRE(a.steps_used == b.steps_used);
    }
}
