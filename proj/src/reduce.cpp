#include "clinduct/reduce.hpp"

#include <stdexcept>

namespace clinduct {

std::string_view to_string(ReductionStatus s) {
    switch (s) {
    case ReductionStatus::normal_form: return "normal_form";
    case ReductionStatus::head_stable_prefix: return "head_stable_prefix";
    case ReductionStatus::step_budget: return "step_budget";
    case ReductionStatus::size_budget: return "size_budget";
    case ReductionStatus::output_cap: return "output_cap";
    }
    return "unknown";
}

std::string_view to_string(Limit l) {
    switch (l) {
    case Limit::none: return "none";
    case Limit::steps: return "steps";
    case Limit::size: return "size";
    case Limit::output: return "output";
    }
    return "unknown";
}

namespace {

bool has_redex(const Term& t, const Basis& basis);

const CombinatorRule* rule_for(const Term& t, const Basis& basis) {
    if (!t.head.is_combinator())
        return nullptr;
    const int code = basis.code_of(t.head);
    if (code < 0)
        return nullptr;
    const int r = basis.code_rule(code);
    return r < 0 ? nullptr : &basis.rules()[static_cast<std::size_t>(r)];
}

struct TreeRewriter {
    const Basis& basis;
    Strategy strategy;
    const TraceSink& trace;
    std::size_t step = 0;

    // Rewrites the strategy's chosen redex in place; false if none exists.
    // `index` tracks the preorder position of `t` for tracing.
    bool rewrite(Term& t, std::size_t index) {
        const CombinatorRule* rule = rule_for(t, basis);
        const bool redex = rule && t.args.size() >= static_cast<std::size_t>(rule->arity);
        if (strategy == Strategy::outermost) {
            if (redex)
                return fire(t, *rule, index);
            return rewrite_args(t, index, 0, t.args.size());
        }
        // Leftmost-innermost: inside the redex's own arguments first, then the
        // redex, then any surplus arguments it is applied to.
        const std::size_t own = redex ? static_cast<std::size_t>(rule->arity) : t.args.size();
        if (rewrite_args(t, index, 0, own))
            return true;
        if (redex)
            return fire(t, *rule, index);
        return false;
    }

    bool rewrite_args(Term& t, std::size_t index, std::size_t from, std::size_t to) {
        std::size_t child_index = index + 1;
        for (std::size_t i = 0; i < from; ++i)
            child_index += size(t.args[i]);
        for (std::size_t i = from; i < to; ++i) {
            if (rewrite(t.args[i], child_index))
                return true;
            child_index += size(t.args[i]);
        }
        return false;
    }

    bool fire(Term& t, const CombinatorRule& rule, std::size_t index) {
        if (trace)
            trace({step, index, rule.name});
        ++step;
        t = step_at_root(t, basis);
        return true;
    }
};

bool has_redex(const Term& t, const Basis& basis) {
    if (is_redex(t, basis))
        return true;
    for (const auto& a : t.args)
        if (has_redex(a, basis))
            return true;
    return false;
}

}  // namespace

bool is_redex(const Term& t, const Basis& basis) {
    const CombinatorRule* rule = rule_for(t, basis);
    return rule && t.args.size() >= static_cast<std::size_t>(rule->arity);
}

Term step_at_root(const Term& t, const Basis& basis) {
    const CombinatorRule* rule = rule_for(t, basis);
    if (!rule || t.args.size() < static_cast<std::size_t>(rule->arity))
        throw std::invalid_argument("step_at_root: '" + render(t) + "' is not a redex");
    const auto n = static_cast<std::size_t>(rule->arity);
    Term result = instantiate(rule->body, std::span<const Term>(t.args.data(), n));
    return apply(std::move(result), std::span<const Term>(t.args.data() + n, t.args.size() - n));
}

FullReduction reduce_full(const Term& t, const Basis& basis, const ReductionBudget& budget, Strategy strategy,
                          const TraceSink& trace) {
    FullReduction r{{}, expand_macros(t, basis)};
    TreeRewriter rw{basis, strategy, trace};
    while (true) {
        if (size(r.term) > budget.max_term_size) {
            r.outcome.status = ReductionStatus::size_budget;
            r.outcome.limit = Limit::size;
            break;
        }
        if (rw.step >= budget.max_steps) {
            if (has_redex(r.term, basis)) {
                r.outcome.status = ReductionStatus::step_budget;
                r.outcome.limit = Limit::steps;
            }
            break;
        }
        if (!rw.rewrite(r.term, 0)) {
            r.outcome.status = ReductionStatus::normal_form;
            break;
        }
    }
    r.outcome.steps_used = rw.step;
    if (r.outcome.status == ReductionStatus::normal_form) {
        r.outcome.output = planarize(r.term, basis.output_mode());
        if (r.outcome.output.size() > budget.max_output)
            r.outcome.output.resize(budget.max_output);
    }
    return r;
}

std::string planarize(const Term& t, const OutputMode& mode) {
    std::string out;
    for_each_node(t, [&](const Term& node, std::size_t) {
        if (const char g = output_glyph(node.head, mode))
            out += g;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Shared-graph engine

GraphReducer::GraphReducer(const Basis& basis) : basis_(basis) {}

std::uint32_t GraphReducer::alloc(Node n) {
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t GraphReducer::atom(int code) {
    auto c = static_cast<std::size_t>(code);
    if (c >= atoms_.size())
        atoms_.resize(c + 1, UINT32_MAX);
    if (atoms_[c] == UINT32_MAX)
        atoms_[c] = alloc({Kind::atom, static_cast<std::uint32_t>(code), 0});
    return atoms_[c];
}

int GraphReducer::code_for(const Symbol& s) {
    const int code = basis_.code_of(s);
    if (code >= 0)
        return code;
    for (std::size_t i = 0; i < foreign_.size(); ++i)
        if (foreign_[i] == s)
            return static_cast<int>(basis_.code_count() + i);
    foreign_.push_back(s);
    return static_cast<int>(basis_.code_count() + foreign_.size() - 1);
}

char GraphReducer::glyph(int code) const {
    const auto c = static_cast<std::size_t>(code);
    if (c < basis_.code_count())
        return basis_.code_glyph(code);
    return basis_.foreign_glyph(foreign_[c - basis_.code_count()]);
}

std::uint32_t GraphReducer::compile(const Term& t, int depth) {
    std::uint32_t cur;
    const Term* body = t.head.is_combinator() && !basis_.macros().empty() ? basis_.find_macro(t.head.name) : nullptr;
    if (body) {
        if (depth > 64)
            throw BasisError("macro expansion too deep");
        cur = compile(*body, depth + 1);
    } else {
        cur = atom(code_for(t.head));
    }
    for (const auto& a : t.args) {
        const std::uint32_t arg = compile(a, depth);
        cur = alloc({Kind::app, cur, arg});
    }
    return cur;
}

std::uint32_t GraphReducer::resolve(std::uint32_t n) {
    std::uint32_t target = n;
    while (nodes_[target].kind == Kind::ind)
        target = nodes_[target].a;
    // Path compression keeps repeated lookups short.
    while (nodes_[n].kind == Kind::ind && nodes_[n].a != target) {
        const std::uint32_t next = nodes_[n].a;
        nodes_[n].a = target;
        n = next;
    }
    return target;
}

GraphReducer::Whnf GraphReducer::whnf(std::uint32_t root, std::size_t position) {
    const int base_codes = static_cast<int>(basis_.code_count());
    while (true) {
        const std::uint32_t n = resolve(root);
        spine_.clear();
        std::uint32_t cur = n;
        while (nodes_[cur].kind == Kind::app) {
            spine_.push_back(cur);
            const std::uint32_t f = resolve(nodes_[cur].a);
            nodes_[cur].a = f;
            cur = f;
        }
        const int code = static_cast<int>(nodes_[cur].a);
        const int rule = code < base_codes ? basis_.code_rule(code) : -1;
        if (rule < 0)
            return Whnf::stable;
        const CompiledRule& cr = basis_.compiled(rule);
        const std::size_t m = spine_.size();
        const auto arity = static_cast<std::size_t>(cr.arity);
        if (m < arity)
            return Whnf::stable;
        if (steps_ >= budget_.max_steps)
            return Whnf::steps;

        // spine_[m-1] applies the head to its first argument.
        const std::uint32_t redex = spine_[m - arity];
        const std::uint32_t mark = static_cast<std::uint32_t>(nodes_.size());
        work_.clear();
        for (const auto& ins : cr.program) {
            switch (ins.op) {
            case CompiledRule::Op::push_var:
                work_.push_back(nodes_[spine_[m - 1 - static_cast<std::size_t>(ins.operand)]].b);
                break;
            case CompiledRule::Op::push_atom:
                work_.push_back(atom(ins.operand));
                break;
            case CompiledRule::Op::apply: {
                const std::uint32_t arg = work_.back();
                work_.pop_back();
                const std::uint32_t fn = work_.back();
                work_.back() = alloc({Kind::app, fn, arg});
                break;
            }
            }
        }
        const std::uint32_t result = work_.back();
        if (result >= mark && nodes_[result].kind == Kind::app)
            nodes_[redex] = nodes_[result];
        else
            nodes_[redex] = {Kind::ind, result, 0};

        if (trace_ && *trace_)
            (*trace_)({steps_, position, basis_.rules()[static_cast<std::size_t>(rule)].name});
        ++steps_;
        if (nodes_.size() > budget_.max_term_size)
            return Whnf::size;
    }
}

ReductionOutcome GraphReducer::stream(const Term& t, const ReductionBudget& budget, const TraceSink& trace) {
    budget_ = budget;
    trace_ = &trace;
    steps_ = 0;
    nodes_.clear();
    atoms_.clear();
    foreign_.clear();
    stack_.clear();

    ReductionOutcome out;
    auto finish = [&](ReductionStatus status, Limit limit) {
        out.status = status;
        out.limit = limit;
        out.steps_used = steps_;
        return out;
    };
    auto budget_stop = [&](Limit limit) {
        ReductionStatus s = limit == Limit::steps ? ReductionStatus::step_budget : ReductionStatus::size_budget;
        if (!out.output.empty())
            s = ReductionStatus::head_stable_prefix;
        return finish(s, limit);
    };

    if (budget.max_output == 0)
        return finish(ReductionStatus::output_cap, Limit::output);
    stack_.push_back(compile(t, 0));
    if (nodes_.size() > budget.max_term_size)
        return budget_stop(Limit::size);

    while (!stack_.empty()) {
        const std::uint32_t n = stack_.back();
        stack_.pop_back();
        switch (whnf(n, out.output.size())) {
        case Whnf::steps: return budget_stop(Limit::steps);
        case Whnf::size: return budget_stop(Limit::size);
        case Whnf::stable: break;
        }
        // whnf leaves the node's spine in spine_ (outermost first).
        std::uint32_t head = spine_.empty() ? resolve(n) : nodes_[spine_.back()].a;
        for (const std::uint32_t app : spine_)
            stack_.push_back(nodes_[app].b);
        if (const char g = glyph(static_cast<int>(nodes_[head].a))) {
            out.output.push_back(g);
            if (out.output.size() >= budget.max_output) {
                if (stack_.empty())
                    return finish(ReductionStatus::normal_form, Limit::none);
                return finish(ReductionStatus::output_cap, Limit::output);
            }
        }
    }
    return finish(ReductionStatus::normal_form, Limit::none);
}

ReductionOutcome stream_prefix(const Term& t, const Basis& basis, const ReductionBudget& budget,
                               const TraceSink& trace) {
    GraphReducer r(basis);
    return r.stream(t, budget, trace);
}

ReductionOutcome stream_prefix(const Term& t, const Basis& basis, const ReductionBudget& budget,
                               const OutputMode& mode, const TraceSink& trace) {
    if (mode == basis.output_mode())
        return stream_prefix(t, basis, budget, trace);
    const Basis view = basis.with_output_mode(mode);
    return stream_prefix(t, view, budget, trace);
}

}  // namespace clinduct
