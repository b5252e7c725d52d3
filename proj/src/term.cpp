#include "clinduct/term.hpp"

#include <algorithm>

#include "syntax.hpp"

namespace clinduct {

std::string Symbol::text() const {
    if (name.size() == 1)
        return name;
    return "<" + name + ">";
}

bool term_less(const Term& a, const Term& b) {
    if (a.head != b.head)
        return a.head < b.head;
    const std::size_t n = std::min(a.args.size(), b.args.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.args[i] == b.args[i])
            continue;
        return term_less(a.args[i], b.args[i]);
    }
    return a.args.size() < b.args.size();
}

namespace {

struct TermBuilder {
    Term leaf(const syntax::Token& t) {
        return Term(t.kind == syntax::Token::Kind::terminal ? Symbol::terminal(t.name)
                                                            : Symbol::combinator(t.name));
    }
    void append(Term& head, Term&& arg) { head.args.push_back(std::move(arg)); }
};

void render_into(const Term& t, std::string& out) {
    out += t.head.text();
    for (const auto& a : t.args) {
        if (a.is_leaf()) {
            out += a.head.text();
        } else {
            out += '(';
            render_into(a, out);
            out += ')';
        }
    }
}

// Child positions leading from the root to the node at preorder `index`.
std::vector<std::size_t> path_to(const Term& t, std::size_t index) {
    if (index >= size(t))
        throw std::out_of_range("node index " + std::to_string(index) + " out of range");
    std::vector<std::size_t> path;
    const Term* cur = &t;
    std::size_t remaining = index;
    while (remaining != 0) {
        --remaining;  // skip the current node itself
        bool found = false;
        for (std::size_t i = 0; i < cur->args.size(); ++i) {
            const std::size_t s = size(cur->args[i]);
            if (remaining < s) {
                path.push_back(i);
                cur = &cur->args[i];
                found = true;
                break;
            }
            remaining -= s;
        }
        if (!found)
            throw std::logic_error("inconsistent term size");
    }
    return path;
}

template <typename Edit>
Term edit_along(const Term& t, const std::vector<std::size_t>& path, std::size_t depth, Edit& edit) {
    if (depth == path.size())
        return edit(t);
    Term copy(t.head);
    copy.args.reserve(t.args.size());
    for (std::size_t i = 0; i < t.args.size(); ++i)
        copy.args.push_back(i == path[depth] ? edit_along(t.args[i], path, depth + 1, edit) : t.args[i]);
    return copy;
}

Term grow(std::size_t budget, std::span<const Symbol> alphabet, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::bernoulli_distribution coin(0.5);
    Term t(alphabet[pick(rng)]);
    std::size_t remaining = budget - 1;
    for (int slot = 0; slot < 3; ++slot) {
        if (remaining == 0)
            break;
        if (!coin(rng))
            continue;
        Term child = grow(remaining, alphabet, rng);
        remaining -= size(child);
        t.args.push_back(std::move(child));
    }
    return t;
}

}  // namespace

Term parse(std::string_view text) {
    const auto tokens = syntax::tokenize(text, false);
    TermBuilder builder;
    syntax::Parser<Term, TermBuilder> p(tokens, text.size(), builder);
    return p.parse_all();
}

std::string render(const Term& t) {
    std::string out;
    render_into(t, out);
    return out;
}

std::size_t size(const Term& t) {
    std::size_t n = 1;
    for (const auto& a : t.args)
        n += size(a);
    return n;
}

std::size_t depth(const Term& t) {
    std::size_t d = 0;
    for (const auto& a : t.args)
        d = std::max(d, depth(a));
    return d + 1;
}

Term apply_args(Term t, std::span<const Term> extra) {
    t.args.insert(t.args.end(), extra.begin(), extra.end());
    return t;
}

const Term& node_at(const Term& t, std::size_t index) {
    const Term* cur = &t;
    for (std::size_t i : path_to(t, index))
        cur = &cur->args[i];
    return *cur;
}

Term replace_at(const Term& t, std::size_t index, Term replacement) {
    auto edit = [&](const Term&) { return std::move(replacement); };
    return edit_along(t, path_to(t, index), 0, edit);
}

Term remove_at(const Term& t, std::size_t index) {
    if (index == 0)
        throw std::invalid_argument("cannot remove the root");
    auto path = path_to(t, index);
    const std::size_t child = path.back();
    path.pop_back();
    auto edit = [&](const Term& parent) {
        Term copy = parent;
        copy.args.erase(copy.args.begin() + static_cast<std::ptrdiff_t>(child));
        return copy;
    };
    return edit_along(t, path, 0, edit);
}

Term relabel_at(const Term& t, std::size_t index, Symbol head) {
    auto edit = [&](const Term& node) {
        Term copy = node;
        copy.head = std::move(head);
        return copy;
    };
    return edit_along(t, path_to(t, index), 0, edit);
}

Term random_term(std::size_t max_size, std::span<const Symbol> alphabet, std::mt19937_64& rng) {
    if (max_size == 0)
        throw std::invalid_argument("random_term: max_size must be at least 1");
    if (alphabet.empty())
        throw std::invalid_argument("random_term: empty alphabet");
    return grow(max_size, alphabet, rng);
}

}  // namespace clinduct
