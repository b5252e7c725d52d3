#include "clinduct/basis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "syntax.hpp"

namespace clinduct {

namespace {

struct PatternBuilder {
    Pattern leaf(const syntax::Token& t) {
        switch (t.kind) {
        case syntax::Token::Kind::variable:
            return Pattern::variable(t.var);
        case syntax::Token::Kind::terminal:
            return Pattern::symbol(Symbol::terminal(t.name));
        default:
            return Pattern::symbol(Symbol::combinator(t.name));
        }
    }
    void append(Pattern& head, Pattern&& arg) { head.args.push_back(std::move(arg)); }
};

std::string pattern_head_text(const Pattern& p) {
    return p.var > 0 ? "x" + std::to_string(p.var) : p.head.text();
}

void render_pattern_into(const Pattern& p, std::string& out) {
    out += pattern_head_text(p);
    for (const auto& a : p.args) {
        out += ' ';
        if (a.args.empty()) {
            out += pattern_head_text(a);
        } else {
            out += '(';
            render_pattern_into(a, out);
            out += ')';
        }
    }
}

Pattern builtin_body(std::string_view text) { return parse_pattern(text); }

bool valid_rule_name(const std::string& name) {
    if (name.empty())
        return false;
    if (name.size() == 1)
        return std::isupper(static_cast<unsigned char>(name[0])) != 0;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

using MacroList = std::vector<std::pair<std::string, Term>>;

Term expand_with(const Term& t, const MacroList& macros, int depth) {
    if (depth > 64)
        throw BasisError("macro expansion too deep (recursive macro?)");
    std::vector<Term> args;
    args.reserve(t.args.size());
    for (const auto& a : t.args)
        args.push_back(expand_with(a, macros, depth));
    if (t.head.is_combinator()) {
        for (const auto& [name, body] : macros)
            if (name == t.head.name)
                return apply(expand_with(body, macros, depth + 1), args);
    }
    return Term(t.head, std::move(args));
}

}  // namespace

Pattern parse_pattern(std::string_view text) {
    const auto tokens = syntax::tokenize(text, true);
    PatternBuilder builder;
    syntax::Parser<Pattern, PatternBuilder> p(tokens, text.size(), builder);
    return p.parse_all();
}

std::string render_pattern(const Pattern& p) {
    std::string out;
    render_pattern_into(p, out);
    return out;
}

int max_variable(const Pattern& p) {
    int m = p.var;
    for (const auto& a : p.args)
        m = std::max(m, max_variable(a));
    return m;
}

Term instantiate(const Pattern& p, std::span<const Term> args) {
    std::vector<Term> inst;
    inst.reserve(p.args.size());
    for (const auto& a : p.args)
        inst.push_back(instantiate(a, args));
    if (p.var > 0) {
        if (static_cast<std::size_t>(p.var) > args.size())
            throw BasisError("template variable x" + std::to_string(p.var) + " has no argument");
        return apply(args[static_cast<std::size_t>(p.var - 1)], inst);
    }
    return Term(p.head, std::move(inst));
}

Pattern to_pattern(const Term& t) {
    Pattern p = Pattern::symbol(t.head);
    for (const auto& a : t.args)
        p.args.push_back(to_pattern(a));
    return p;
}

const std::vector<CombinatorRule>& builtin_rules() {
    static const std::vector<CombinatorRule> rules = {
        {"S", 3, builtin_body("x1 x3 (x2 x3)")},
        {"K", 2, builtin_body("x1")},
        {"I", 1, builtin_body("x1")},
        {"B", 3, builtin_body("x1 (x2 x3)")},
        {"C", 3, builtin_body("x1 x3 x2")},
        {"W", 2, builtin_body("x1 x2 x2")},
        {"Y", 1, builtin_body("x1 (Y x1)")},
    };
    return rules;
}

const CombinatorRule& builtin_rule(char name) {
    for (const auto& r : builtin_rules())
        if (r.name[0] == name)
            return r;
    throw BasisError(std::string("no built-in combinator '") + name + "'");
}

Basis::Basis(std::vector<CombinatorRule> rules, std::vector<std::string> terminals, OutputMode mode,
             std::vector<std::pair<std::string, Term>> macros)
    : rules_(std::move(rules)), terminals_(std::move(terminals)), mode_(std::move(mode)), macros_(std::move(macros)) {
    if (rules_.empty())
        throw BasisError("a basis needs at least one combinator rule");
    std::set<std::string> comb_names;
    for (const auto& r : rules_) {
        if (!valid_rule_name(r.name))
            throw BasisError("invalid combinator name '" + r.name + "'");
        if (!comb_names.insert(r.name).second)
            throw BasisError("duplicate combinator '" + r.name + "'");
        if (r.arity < 1)
            throw BasisError("combinator '" + r.name + "' needs a positive arity");
        if (max_variable(r.body) > r.arity)
            throw BasisError("template of '" + r.name + "' uses a variable beyond its arity");
    }
    for (const auto& [name, body] : macros_) {
        if (!valid_rule_name(name))
            throw BasisError("invalid combinator name '" + name + "'");
        if (!comb_names.insert(name).second)
            throw BasisError("duplicate combinator '" + name + "'");
    }
    std::set<std::string> term_names;
    for (const auto& t : terminals_) {
        if (t.size() != 1 || !std::isdigit(static_cast<unsigned char>(t[0])))
            throw BasisError("terminal glyphs must be single digits, got '" + t + "'");
        if (!term_names.insert(t).second)
            throw BasisError("duplicate terminal '" + t + "'");
    }
    if (mode_.kind == OutputMode::Kind::combinators_as_data) {
        for (const auto& r : rules_)
            if (!mode_.mapping.contains(r.name))
                throw BasisError("combinators-as-data mode has no output glyph for '" + r.name + "'");
        mode_.strip_residuals = false;
    } else {
        mode_.mapping.clear();
    }
    build_tables();
}

int Basis::intern(const Symbol& s) {
    const auto key = std::make_pair(s.is_terminal(), s.name);
    if (auto it = codes_.find(key); it != codes_.end())
        return it->second;
    const int code = static_cast<int>(names_.size());
    codes_.emplace(key, code);
    names_.push_back(s.name);
    terminal_code_.push_back(s.is_terminal());
    if (s.name.size() == 1 && static_cast<unsigned char>(s.name[0]) < 128)
        (s.is_terminal() ? single_term_ : single_comb_)[static_cast<unsigned char>(s.name[0])] = code;
    return code;
}

void Basis::build_tables() {
    std::fill(std::begin(single_comb_), std::end(single_comb_), -1);
    std::fill(std::begin(single_term_), std::end(single_term_), -1);
    for (const auto& r : rules_)
        intern(Symbol::combinator(r.name));
    for (const auto& t : terminals_)
        intern(Symbol::terminal(t));

    compiled_.clear();
    for (const auto& r : rules_) {
        CompiledRule c;
        c.arity = r.arity;
        auto emit = [&](auto& self, const Pattern& p, int depth) -> void {
            if (depth > 64)
                throw BasisError("macro expansion too deep in template of '" + r.name + "'");
            if (p.var > 0) {
                c.program.push_back({CompiledRule::Op::push_var, p.var - 1});
            } else if (const Term* body = p.head.is_combinator() ? find_macro(p.head.name) : nullptr) {
                self(self, to_pattern(*body), depth + 1);
            } else {
                c.program.push_back({CompiledRule::Op::push_atom, intern(p.head)});
            }
            for (const auto& a : p.args) {
                self(self, a, depth);
                c.program.push_back({CompiledRule::Op::apply, 0});
            }
        };
        emit(emit, r.body, 0);
        compiled_.push_back(std::move(c));
    }

    glyph_.assign(names_.size(), '\0');
    for (std::size_t code = 0; code < names_.size(); ++code) {
        Symbol s = terminal_code_[code] ? Symbol::terminal(names_[code]) : Symbol::combinator(names_[code]);
        glyph_[code] = foreign_glyph(s);
    }
}

char output_glyph(const Symbol& s, const OutputMode& mode) {
    // Multi-character names have no single glyph; they show up as '#'.
    const char own = s.name.size() == 1 ? s.name[0] : '#';
    if (s.is_terminal())
        return own;
    if (mode.kind == OutputMode::Kind::combinators_as_data) {
        if (auto it = mode.mapping.find(s.name); it != mode.mapping.end())
            return it->second;
        return own;
    }
    return mode.strip_residuals ? '\0' : own;
}

char Basis::foreign_glyph(const Symbol& s) const { return output_glyph(s, mode_); }

int Basis::code_of(const Symbol& s) const {
    if (s.name.size() == 1 && static_cast<unsigned char>(s.name[0]) < 128)
        return (s.is_terminal() ? single_term_ : single_comb_)[static_cast<unsigned char>(s.name[0])];
    auto it = codes_.find(std::make_pair(s.is_terminal(), s.name));
    return it == codes_.end() ? -1 : it->second;
}

const CombinatorRule* Basis::find_rule(std::string_view name) const {
    for (const auto& r : rules_)
        if (r.name == name)
            return &r;
    return nullptr;
}

const Term* Basis::find_macro(std::string_view name) const {
    for (const auto& [n, body] : macros_)
        if (n == name)
            return &body;
    return nullptr;
}

bool Basis::has_terminal(std::string_view glyph) const {
    return std::find(terminals_.begin(), terminals_.end(), glyph) != terminals_.end();
}

std::vector<Symbol> Basis::alphabet() const {
    std::vector<Symbol> out;
    for (const auto& r : rules_)
        out.push_back(Symbol::combinator(r.name));
    for (const auto& [name, body] : macros_)
        out.push_back(Symbol::combinator(name));
    for (const auto& t : terminals_)
        out.push_back(Symbol::terminal(t));
    return out;
}

std::string Basis::spec() const {
    std::string out;
    for (const auto& r : rules_)
        out += Symbol::combinator(r.name).text();
    for (const auto& t : terminals_)
        out += t;
    return out;
}

Basis Basis::with_output_mode(OutputMode mode) const { return Basis(rules_, terminals_, std::move(mode), macros_); }

Basis Basis::with_strip_residuals(bool strip) const {
    if (mode_.kind != OutputMode::Kind::data_terminals)
        return *this;
    return with_output_mode(OutputMode::data(strip));
}

Basis parse_basis(std::string_view spec, std::optional<std::map<std::string, char>> mapping) {
    std::vector<CombinatorRule> rules;
    std::vector<std::string> terminals;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const char c = spec[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            terminals.emplace_back(1, c);
        } else if (std::string_view("SKIBCWY").find(c) != std::string_view::npos) {
            rules.push_back(builtin_rule(c));
        } else {
            throw BasisError("unknown glyph '" + std::string(1, c) + "' in basis spec at position " +
                             std::to_string(i));
        }
    }
    if (rules.empty())
        throw BasisError("basis spec '" + std::string(spec) + "' has no combinators");
    OutputMode mode = OutputMode::data();
    if (mapping) {
        mode = OutputMode::combinators(*mapping);
    } else if (terminals.empty()) {
        mode = OutputMode::combinators({{"S", '0'}, {"K", '1'}});
    }
    return Basis(std::move(rules), std::move(terminals), std::move(mode));
}

Basis define_combinator(const Basis& basis, const std::string& name, int arity, const Pattern& body) {
    if (basis.find_rule(name) || basis.find_macro(name))
        throw BasisError("combinator '" + name + "' is already defined");
    if (max_variable(body) > arity)
        throw BasisError("template of '" + name + "' uses a variable beyond arity " + std::to_string(arity));
    auto rules = basis.rules();
    rules.push_back({name, arity, body});
    OutputMode mode = basis.output_mode();
    if (mode.kind == OutputMode::Kind::combinators_as_data && !mode.mapping.contains(name))
        mode.mapping[name] = name.size() == 1 ? name[0] : '#';
    return Basis(std::move(rules), basis.terminals(), std::move(mode), basis.macros());
}

Basis define_combinator(const Basis& basis, const std::string& name, int arity, std::string_view body) {
    return define_combinator(basis, name, arity, parse_pattern(body));
}

Basis define_macro(const Basis& basis, const std::string& name, const Term& body) {
    if (basis.find_rule(name) || basis.find_macro(name))
        throw BasisError("combinator '" + name + "' is already defined");
    auto macros = basis.macros();
    macros.emplace_back(name, expand_macros(body, basis));
    return Basis(basis.rules(), basis.terminals(), basis.output_mode(), std::move(macros));
}

Term expand_macros(const Term& t, const Basis& basis) {
    if (basis.macros().empty())
        return t;
    return expand_with(t, basis.macros(), 0);
}

Basis parse_basis_file_text(std::string_view text) {
    std::vector<CombinatorRule> rules;
    std::vector<std::string> terminals;
    std::vector<std::pair<std::string, Term>> macros;
    std::map<std::string, char> mapping;
    bool strip = false;

    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw BasisError("basis file line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first))
            continue;
        if (first == "basis") {
            std::string spec;
            if (!(ls >> spec))
                fail("missing spec string");
            for (char c : spec) {
                if (std::isdigit(static_cast<unsigned char>(c)))
                    terminals.emplace_back(1, c);
                else if (std::string_view("SKIBCWY").find(c) != std::string_view::npos)
                    rules.push_back(builtin_rule(c));
                else
                    fail("unknown glyph '" + std::string(1, c) + "' in spec");
            }
        } else if (first == "terminal") {
            std::string g;
            if (!(ls >> g))
                fail("missing terminal glyph");
            terminals.push_back(g);
        } else if (first == "map") {
            std::string name, g;
            if (!(ls >> name >> g) || g.size() != 1)
                fail("expected 'map NAME GLYPH'");
            if (name.size() > 2 && name.front() == '<' && name.back() == '>')
                name = name.substr(1, name.size() - 2);
            mapping[name] = g[0];
        } else if (first == "strip") {
            std::string v;
            ls >> v;
            if (v != "on" && v != "off")
                fail("expected 'strip on' or 'strip off'");
            strip = v == "on";
        } else {
            std::string name = first;
            if (name.size() > 2 && name.front() == '<' && name.back() == '>')
                name = name.substr(1, name.size() - 2);
            int arity = -1;
            std::string assign;
            if (!(ls >> arity >> assign) || assign != ":=")
                fail("expected 'NAME ARITY := TEMPLATE'");
            std::string body;
            std::getline(ls, body);
            try {
                if (arity == 0) {
                    Term expanded = expand_with(parse(body), macros, 0);
                    macros.emplace_back(name, std::move(expanded));
                } else {
                    rules.push_back({name, arity, parse_pattern(body)});
                }
            } catch (const ParseError& e) {
                fail(std::string("template: ") + e.what());
            }
        }
    }
    OutputMode mode = OutputMode::data(strip);
    if (!mapping.empty())
        mode = OutputMode::combinators(mapping);
    else if (terminals.empty())
        mode = OutputMode::combinators({{"S", '0'}, {"K", '1'}});
    return Basis(std::move(rules), std::move(terminals), std::move(mode), std::move(macros));
}

Basis load_basis_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw BasisError("cannot open basis file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_basis_file_text(ss.str());
}

std::string render_basis_file(const Basis& basis) {
    std::string out;
    for (const auto& r : basis.rules())
        out += Symbol::combinator(r.name).text() + " " + std::to_string(r.arity) + " := " + render_pattern(r.body) + "\n";
    for (const auto& [name, body] : basis.macros())
        out += Symbol::combinator(name).text() + " 0 := " + render(body) + "\n";
    for (const auto& t : basis.terminals())
        out += "terminal " + t + "\n";
    const auto& mode = basis.output_mode();
    if (mode.kind == OutputMode::Kind::combinators_as_data) {
        for (const auto& [name, g] : mode.mapping)
            out += "map " + Symbol::combinator(name).text() + " " + std::string(1, g) + "\n";
    } else if (mode.strip_residuals) {
        out += "strip on\n";
    }
    return out;
}

}  // namespace clinduct
