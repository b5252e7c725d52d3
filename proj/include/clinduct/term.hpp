#pragma once

#include <compare>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clinduct {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// A combinator (rewrite rule lives in a Basis) or a terminal data glyph.
struct Symbol {
    enum class Kind : unsigned char { combinator, terminal };

    Kind kind = Kind::combinator;
    std::string name;

    static Symbol combinator(std::string name) { return {Kind::combinator, std::move(name)}; }
    static Symbol terminal(std::string glyph) { return {Kind::terminal, std::move(glyph)}; }

    bool is_terminal() const noexcept { return kind == Kind::terminal; }
    bool is_combinator() const noexcept { return kind == Kind::combinator; }

    /// Text form: single glyphs as-is, longer names wrapped in angle brackets.
    std::string text() const;

    friend bool operator==(const Symbol&, const Symbol&) = default;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// Left-associative application tree: `head` applied to `args` in order.
/// Any head/args combination is valid; there is no arity check here.
struct Term {
    Symbol head;
    std::vector<Term> args;

    Term() = default;
    explicit Term(Symbol h, std::vector<Term> a = {}) : head(std::move(h)), args(std::move(a)) {}

    bool is_leaf() const noexcept { return args.empty(); }

    friend bool operator==(const Term&, const Term&) = default;
};

/// Total ordering used to keep containers of terms deterministic.
bool term_less(const Term& a, const Term& b);

/// Built-in glyphs: uppercase letters are combinators, digits are terminals,
/// `<name>` is a combinator with a multi-character name. Whitespace is ignored.
Term parse(std::string_view text);
std::string render(const Term& t);

std::size_t size(const Term& t);
std::size_t depth(const Term& t);

Term apply_args(Term t, std::span<const Term> extra);

/// Appends `extra` to the args of `t`. A function object so that unqualified
/// calls never pick up std::apply through argument-dependent lookup.
inline constexpr struct {
    Term operator()(Term t, std::span<const Term> extra) const { return apply_args(std::move(t), extra); }
    Term operator()(Term t, const std::vector<Term>& extra) const {
        return apply_args(std::move(t), std::span<const Term>(extra));
    }
    Term operator()(Term t, std::initializer_list<Term> extra) const {
        return apply_args(std::move(t), std::span<const Term>(extra.begin(), extra.size()));
    }
} apply{};

const Term& node_at(const Term& t, std::size_t index);
Term replace_at(const Term& t, std::size_t index, Term replacement);

/// Removes the subtree at preorder `index` (> 0) from its parent's args.
Term remove_at(const Term& t, std::size_t index);

/// Replaces only the head symbol of the node at `index`; structure is kept.
Term relabel_at(const Term& t, std::size_t index, Symbol head);

/// Grow-style random tree: uniform head, then up to three child slots each
/// taken with probability 1/2 while the node budget lasts.
Term random_term(std::size_t max_size, std::span<const Symbol> alphabet, std::mt19937_64& rng);

/// Calls `fn(node, preorder_index)` for every node.
template <typename Fn>
void for_each_node(const Term& t, Fn&& fn) {
    std::size_t index = 0;
    auto walk = [&](auto& self, const Term& node) -> void {
        fn(node, index++);
        for (const auto& a : node.args)
            self(self, a);
    };
    walk(walk, t);
}

}  // namespace clinduct
