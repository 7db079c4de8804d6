#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "pbls/generator.hpp"
#include "pbls/model.hpp"
#include "pbls/rng.hpp"

namespace pbls::test {

inline Assignment bits(std::initializer_list<int> values) {
    Assignment a(static_cast<int>(values.size()));
    int v = 1;
    for (int b : values) a.set(v++, b);
    return a;
}

inline RawTerm term(std::int64_t coeff, int var, bool negated = false) {
    return {coeff, {var, negated}};
}

inline RawConstraint raw_ge(std::vector<RawTerm> terms, std::int64_t rhs) {
    return {std::move(terms), RelOp::Ge, rhs};
}

inline RawConstraint raw_le(std::vector<RawTerm> terms, std::int64_t rhs) {
    return {std::move(terms), RelOp::Le, rhs};
}

inline RawConstraint raw_eq(std::vector<RawTerm> terms, std::int64_t rhs) {
    return {std::move(terms), RelOp::Eq, rhs};
}

// Signed-arithmetic evaluation of a raw constraint, independent of the
// normalization path under test.
inline bool raw_satisfied(const RawConstraint& raw, const Assignment& a) {
    std::int64_t sum = 0;
    for (const RawTerm& t : raw.terms) {
        int value = a.value(t.lit.var);
        if (t.lit.negated) value = 1 - value;
        sum += t.coeff * value;
    }
    switch (raw.op) {
        case RelOp::Ge: return sum >= raw.rhs;
        case RelOp::Le: return sum <= raw.rhs;
        case RelOp::Eq: return sum == raw.rhs;
    }
    return false;
}

// Calls fn with every complete assignment over n variables.
template <typename Fn>
void for_each_assignment(int n, Fn&& fn) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        Assignment a(n);
        for (int v = 1; v <= n; ++v) a.set(v, (mask >> (v - 1)) & 1 ? 1 : 0);
        fn(a);
    }
}

// Instance over the given hard constraints and objective terms; ids and the
// variable count are filled in.
inline PBOInstance instance_of(std::vector<PBConstraint> hard, std::vector<Term> objective = {},
                               int num_vars = 0) {
    PBOInstance inst;
    for (std::size_t i = 0; i < hard.size(); ++i) {
        hard[i].id = static_cast<int>(i);
        for (const Term& t : hard[i].terms) num_vars = std::max(num_vars, t.lit.var);
    }
    for (const Term& t : objective) num_vars = std::max(num_vars, t.lit.var);
    inst.num_vars = num_vars;
    inst.hard = std::move(hard);
    inst.objective.terms = std::move(objective);
    inst.rebuild_occurrence_index();
    return inst;
}

inline PBConstraint hard_ge(std::vector<Term> terms, std::int64_t bound) {
    PBConstraint c;
    c.terms = std::move(terms);
    c.bound = bound;
    return c;
}

// Random instance that is feasible by construction: every bound is redrawn
// against a hidden witness assignment. Plain random conjunctions over few
// variables are almost always infeasible, which starves solver-facing sweeps.
inline PBOInstance planted_feasible_instance(const GenConfig& cfg) {
    PBOInstance inst = generate_random_instance(cfg);
    Rng rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 1);
    Assignment witness(inst.num_vars);
    for (int v = 1; v <= inst.num_vars; ++v) witness.set(v, rng.next_bit());
    for (PBConstraint& c : inst.hard) {
        std::int64_t sum = 0;
        for (const Term& t : c.terms)
            if (witness.is_true(t.lit)) sum += t.coeff;
        if (sum == 0) {
            Term& t = c.terms[rng.next_index(c.terms.size())];
            t.lit.negated = !t.lit.negated;
            sum = t.coeff;
        }
        c.bound = rng.next_in_range(1, sum);
    }
    inst.rebuild_occurrence_index();
    return inst;
}

}  // namespace pbls::test
