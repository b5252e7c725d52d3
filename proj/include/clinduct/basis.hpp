#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinduct/term.hpp"

namespace clinduct {

class BasisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rule template: a term whose nodes may stand for formal variable x_var.
struct Pattern {
    int var = 0;  // > 0: this node's head is the variable x_var
    Symbol head;
    std::vector<Pattern> args;

    static Pattern variable(int index, std::vector<Pattern> args = {}) {
        Pattern p;
        p.var = index;
        p.args = std::move(args);
        return p;
    }
    static Pattern symbol(Symbol s, std::vector<Pattern> args = {}) {
        Pattern p;
        p.head = std::move(s);
        p.args = std::move(args);
        return p;
    }

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

Pattern parse_pattern(std::string_view text);
std::string render_pattern(const Pattern& p);
int max_variable(const Pattern& p);
/// Substitutes args[i-1] for x_i, applying left-associatively.
Term instantiate(const Pattern& p, std::span<const Term> args);
Pattern to_pattern(const Term& t);

struct CombinatorRule {
    std::string name;
    int arity = 0;
    Pattern body;

    friend bool operator==(const CombinatorRule&, const CombinatorRule&) = default;
};

/// S K I B C W Y with arities 3 2 1 3 3 2 1.
const std::vector<CombinatorRule>& builtin_rules();
const CombinatorRule& builtin_rule(char name);

struct OutputMode {
    enum class Kind { data_terminals, combinators_as_data };

    Kind kind = Kind::data_terminals;
    std::map<std::string, char> mapping;  // combinators_as_data only
    bool strip_residuals = false;         // data_terminals only

    static OutputMode data(bool strip = false) { return {Kind::data_terminals, {}, strip}; }
    static OutputMode combinators(std::map<std::string, char> m) {
        return {Kind::combinators_as_data, std::move(m), false};
    }

    friend bool operator==(const OutputMode&, const OutputMode&) = default;
};

/// Output glyph for a head-stable node labelled `s`; '\0' means the symbol is skipped.
char output_glyph(const Symbol& s, const OutputMode& mode);

/// Flattened template: postfix program building the instantiated graph.
struct CompiledRule {
    enum class Op : unsigned char { push_var, push_atom, apply };
    struct Instr {
        Op op;
        int operand;
    };
    int arity = 0;
    std::vector<Instr> program;
};

/// A reference machine: rewrite rules, terminal glyphs, and output mapping.
/// Immutable once built; symbol codes are dense ints with rules first.
class Basis {
public:
    Basis(std::vector<CombinatorRule> rules, std::vector<std::string> terminals, OutputMode mode,
          std::vector<std::pair<std::string, Term>> macros = {});

    const std::vector<CombinatorRule>& rules() const noexcept { return rules_; }
    const std::vector<std::string>& terminals() const noexcept { return terminals_; }
    const OutputMode& output_mode() const noexcept { return mode_; }
    const std::vector<std::pair<std::string, Term>>& macros() const noexcept { return macros_; }

    const CombinatorRule* find_rule(std::string_view name) const;
    const Term* find_macro(std::string_view name) const;
    bool has_terminal(std::string_view glyph) const;

    /// Symbols available to random generation and mutation.
    std::vector<Symbol> alphabet() const;

    /// Compact spec string such as "SKICBW01".
    std::string spec() const;

    Basis with_output_mode(OutputMode mode) const;
    Basis with_strip_residuals(bool strip) const;

    // Engine-facing tables.
    int code_of(const Symbol& s) const;  // -1 when the symbol is not known to the basis
    std::size_t code_count() const noexcept { return names_.size(); }
    const std::string& code_name(int code) const { return names_[static_cast<std::size_t>(code)]; }
    bool code_is_terminal(int code) const { return terminal_code_[static_cast<std::size_t>(code)]; }
    /// Rule index for a code, or -1 if inert.
    int code_rule(int code) const { return code < static_cast<int>(rules_.size()) ? code : -1; }
    const CompiledRule& compiled(int rule) const { return compiled_[static_cast<std::size_t>(rule)]; }
    /// Output glyph emitted for a head-stable node with this code; '\0' means skipped.
    char code_glyph(int code) const { return glyph_[static_cast<std::size_t>(code)]; }
    /// Glyph for a symbol outside the basis.
    char foreign_glyph(const Symbol& s) const;

    friend bool operator==(const Basis& a, const Basis& b) {
        return a.rules_ == b.rules_ && a.terminals_ == b.terminals_ && a.mode_ == b.mode_ &&
               a.macros_ == b.macros_;
    }

private:
    void build_tables();
    int intern(const Symbol& s);

    std::vector<CombinatorRule> rules_;
    std::vector<std::string> terminals_;
    OutputMode mode_;
    std::vector<std::pair<std::string, Term>> macros_;

    std::vector<std::string> names_;
    std::vector<bool> terminal_code_;
    std::vector<char> glyph_;
    std::vector<CompiledRule> compiled_;
    std::map<std::pair<bool, std::string>, int> codes_;
    int single_comb_[128];
    int single_term_[128];
};

/// "SK01", "SKICBW01", ... Letters become rules, digits terminals. A basis
/// without terminals interprets S as 0 and K as 1; any other combinator then
/// needs an explicit `mapping`.
Basis parse_basis(std::string_view spec, std::optional<std::map<std::string, char>> mapping = std::nullopt);

Basis define_combinator(const Basis& basis, const std::string& name, int arity, const Pattern& body);
Basis define_combinator(const Basis& basis, const std::string& name, int arity, std::string_view body);

/// Arity-0 definitions: the name stands for `body` wherever it appears.
Basis define_macro(const Basis& basis, const std::string& name, const Term& body);
Term expand_macros(const Term& t, const Basis& basis);

/// Text basis file: `basis SK01`, `NAME ARITY := TEMPLATE`, `terminal G`,
/// `map NAME G`, `strip on|off`; `#` starts a comment.
Basis parse_basis_file_text(std::string_view text);
Basis load_basis_file(const std::string& path);
std::string render_basis_file(const Basis& basis);

}  // namespace clinduct
