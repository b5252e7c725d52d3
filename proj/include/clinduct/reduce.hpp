#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "clinduct/basis.hpp"
#include "clinduct/term.hpp"

namespace clinduct {

struct ReductionBudget {
    std::size_t max_steps = 3000;
    std::size_t max_term_size = 100000;
    std::size_t max_output = 64;
};

enum class ReductionStatus { normal_form, head_stable_prefix, step_budget, size_budget, output_cap };

/// Which limit stopped a reduction (none for a normal form).
enum class Limit { none, steps, size, output };

std::string_view to_string(ReductionStatus s);
std::string_view to_string(Limit l);

struct ReductionOutcome {
    std::string output;
    ReductionStatus status = ReductionStatus::normal_form;
    std::size_t steps_used = 0;
    Limit limit = Limit::none;
};

enum class Strategy { outermost, innermost };

struct TraceEvent {
    std::size_t step;
    std::size_t position;  // preorder index for tree reduction, output offset for streaming
    std::string_view rule;
};
using TraceSink = std::function<void(const TraceEvent&)>;

bool is_redex(const Term& t, const Basis& basis);

/// Rewrites the root redex; throws std::invalid_argument if `t` is not one.
Term step_at_root(const Term& t, const Basis& basis);

struct FullReduction {
    ReductionOutcome outcome;  // output is the planarized normal form, empty otherwise
    Term term;
};

/// Tree rewriting without sharing. Used for diagnostics and as the
/// reference for normal forms; induction uses stream_prefix.
FullReduction reduce_full(const Term& t, const Basis& basis, const ReductionBudget& budget,
                          Strategy strategy = Strategy::outermost, const TraceSink& trace = {});

/// Lazy leftmost-outermost emission over a shared graph. Each node is
/// rewritten at its root until head-stable, its head glyph is emitted, then
/// its arguments are visited left to right. Duplicated arguments are shared,
/// so a subterm is reduced at most once.
ReductionOutcome stream_prefix(const Term& t, const Basis& basis, const ReductionBudget& budget,
                               const TraceSink& trace = {});
ReductionOutcome stream_prefix(const Term& t, const Basis& basis, const ReductionBudget& budget,
                               const OutputMode& mode, const TraceSink& trace = {});

/// Preorder glyph string of `t` under `mode`.
std::string planarize(const Term& t, const OutputMode& mode);

/// Reusable graph workspace; one per thread of evaluation.
class GraphReducer {
public:
    explicit GraphReducer(const Basis& basis);

    ReductionOutcome stream(const Term& t, const ReductionBudget& budget, const TraceSink& trace = {});

private:
    enum class Kind : std::uint8_t { atom, app, ind };
    struct Node {
        Kind kind;
        std::uint32_t a;  // atom: code; app: function; ind: target
        std::uint32_t b;  // app: argument
    };
    enum class Whnf { stable, steps, size };

    std::uint32_t alloc(Node n);
    std::uint32_t atom(int code);
    std::uint32_t compile(const Term& t, int depth);
    int code_for(const Symbol& s);
    std::uint32_t resolve(std::uint32_t n);
    Whnf whnf(std::uint32_t n, std::size_t position);
    char glyph(int code) const;

    const Basis& basis_;
    ReductionBudget budget_;
    const TraceSink* trace_ = nullptr;
    std::size_t steps_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> atoms_;
    std::vector<Symbol> foreign_;
    std::vector<std::uint32_t> spine_;
    std::vector<std::uint32_t> stack_;
    std::vector<std::uint32_t> work_;
};

}  // namespace clinduct
