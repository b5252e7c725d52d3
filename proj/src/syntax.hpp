#pragma once

// Shared tokenizer/parser for the expression syntax; used for plain terms and
// for rule templates (which additionally allow x1..xn variables).

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "clinduct/term.hpp"

namespace clinduct::syntax {

struct Token {
    enum class Kind { combinator, terminal, variable, open, close };
    Kind kind;
    std::string name;
    int var = 0;
    std::size_t pos = 0;
};

inline std::vector<Token> tokenize(std::string_view text, bool allow_variables) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            ++i;
        } else if (c == '(') {
            out.push_back({Token::Kind::open, "(", 0, i++});
        } else if (c == ')') {
            out.push_back({Token::Kind::close, ")", 0, i++});
        } else if (std::isupper(uc)) {
            out.push_back({Token::Kind::combinator, std::string(1, c), 0, i++});
        } else if (std::isdigit(uc)) {
            out.push_back({Token::Kind::terminal, std::string(1, c), 0, i++});
        } else if (c == '<') {
            const auto close = text.find('>', i + 1);
            if (close == std::string_view::npos)
                throw ParseError("unterminated combinator name", i);
            std::string name(text.substr(i + 1, close - i - 1));
            if (name.empty())
                throw ParseError("empty combinator name", i);
            for (char n : name) {
                const auto un = static_cast<unsigned char>(n);
                if (!(std::isalnum(un) || n == '_' || n == '-'))
                    throw ParseError("invalid character in combinator name", i);
            }
            out.push_back({Token::Kind::combinator, std::move(name), 0, i});
            i = close + 1;
        } else if (allow_variables && c == 'x' && i + 1 < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
            std::size_t j = i + 1;
            int v = 0;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                v = v * 10 + (text[j] - '0');
                if (v > 1000)
                    throw ParseError("variable index too large", i);
                ++j;
            }
            if (v == 0)
                throw ParseError("variable indices start at x1", i);
            out.push_back({Token::Kind::variable, std::string(text.substr(i, j - i)), v, i});
            i = j;
        } else {
            throw ParseError(std::string("unknown glyph '") + c + "'", i);
        }
    }
    return out;
}

// Builder must provide: Node leaf(const Token&); void append(Node&, Node&&).
template <typename Node, typename Builder>
class Parser {
public:
    Parser(const std::vector<Token>& tokens, std::size_t text_size, Builder& builder)
        : tokens_(tokens), end_pos_(text_size), builder_(builder) {}

    Node parse_all() {
        if (tokens_.empty())
            throw ParseError("empty expression", 0);
        Node n = expr();
        if (at_ < tokens_.size())
            throw ParseError("unbalanced ')'", tokens_[at_].pos);
        return n;
    }

private:
    std::size_t pos() const { return at_ < tokens_.size() ? tokens_[at_].pos : end_pos_; }

    Node expr() {
        Node head = item();
        while (at_ < tokens_.size() && tokens_[at_].kind != Token::Kind::close)
            builder_.append(head, item());
        return head;
    }

    Node item() {
        if (at_ >= tokens_.size())
            throw ParseError("unexpected end of expression", end_pos_);
        const Token& t = tokens_[at_];
        if (t.kind == Token::Kind::close)
            throw ParseError("unexpected ')'", t.pos);
        if (t.kind == Token::Kind::open) {
            const std::size_t open_pos = t.pos;
            ++at_;
            if (at_ < tokens_.size() && tokens_[at_].kind == Token::Kind::close)
                throw ParseError("empty bracket pair", open_pos);
            if (at_ >= tokens_.size())
                throw ParseError("unbalanced '('", open_pos);
            Node inner = expr();
            if (at_ >= tokens_.size())
                throw ParseError("unbalanced '('", open_pos);
            ++at_;  // ')'
            return inner;
        }
        ++at_;
        return builder_.leaf(t);
    }

    const std::vector<Token>& tokens_;
    std::size_t end_pos_;
    Builder& builder_;
    std::size_t at_ = 0;
};

}  // namespace clinduct::syntax
