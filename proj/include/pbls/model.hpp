#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pbls {

// All coefficient/bound/weight arithmetic is 64-bit signed. Instances whose
// per-constraint or objective |coeff| sum exceeds kCoeffSumLimit are rejected
// at normalization time instead of silently wrapping.
inline constexpr std::int64_t kCoeffSumLimit = std::int64_t{1} << 62;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line_)
        : Error("parse error at line " + std::to_string(line_) + ": " + msg), line(line_) {}
    int line;
};

struct UnsupportedNonlinearError : ParseError {
    explicit UnsupportedNonlinearError(int line_)
        : ParseError("nonlinear term (product of variables) is not supported", line_) {}
};

struct TriviallyUnsatError : Error {
    explicit TriviallyUnsatError(int source_id_)
        : Error(source_id_ >= 0
                    ? "trivially unsatisfiable constraint at line " + std::to_string(source_id_) +
                          " (bound exceeds coefficient sum)"
                    : std::string("trivially unsatisfiable constraint (bound exceeds coefficient sum)")),
          source_id(source_id_) {}
    int source_id;
};

struct TooLargeError : Error {
    using Error::Error;
};

// A literal is a variable (1-based, OPB "x<k>") or its negation.
struct Literal {
    int var = 0;
    bool negated = false;

    Literal negation() const { return {var, !negated}; }
    friend bool operator==(const Literal&, const Literal&) = default;
};

// One coefficient-literal product. Coefficients are strictly positive after
// normalization.
struct Term {
    std::int64_t coeff = 0;
    Literal lit;

    friend bool operator==(const Term&, const Term&) = default;
};

enum class ConstraintKind { Hard, Objective };

// Normalized constraint: sum_i coeff_i * lit_i >= bound with all coeff_i >= 1,
// bound >= 1, and at most one term per variable. weight/care are search state
// owned by a single solver run.
struct PBConstraint {
    int id = -1;
    ConstraintKind kind = ConstraintKind::Hard;
    std::vector<Term> terms;
    std::int64_t bound = 0;
    std::int64_t weight = 1;
    std::int64_t care = 0;

    std::int64_t coeff_sum() const;
    bool inactive() const { return bound <= 0; }  // tautology marker

    friend bool operator==(const PBConstraint& a, const PBConstraint& b) {
        return a.terms == b.terms && a.bound == b.bound && a.kind == b.kind;
    }
};

// Linear minimization objective. constant_offset accumulates during
// normalization (negative input coefficients); the value of an assignment is
// constant_offset + sum of coefficients of true literals.
struct Objective {
    std::vector<Term> terms;
    std::int64_t constant_offset = 0;

    bool empty() const { return terms.empty(); }
    std::int64_t coeff_sum() const;
    std::int64_t min_value() const { return constant_offset; }
    std::int64_t max_value() const { return constant_offset + coeff_sum(); }

    friend bool operator==(const Objective&, const Objective&) = default;
};

// Complete 0/1 valuation, 1-based.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(int num_vars, int fill = 0)
        : values_(static_cast<std::size_t>(num_vars) + 1, static_cast<std::uint8_t>(fill)) {}

    int num_vars() const { return static_cast<int>(values_.size()) - 1; }
    int value(int var) const { return values_[static_cast<std::size_t>(var)]; }
    void set(int var, int v) { values_[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(v); }
    void flip(int var) { values_[static_cast<std::size_t>(var)] ^= 1; }
    bool is_true(Literal l) const { return (value(l.var) == 1) != l.negated; }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<std::uint8_t> values_;  // slot 0 unused
};

// Entry of the per-variable occurrence index: delta is the change of the
// constraint's true-coefficient sum when the variable goes 0 -> 1
// (+coeff for a positive literal, -coeff for a negated one).
struct Occurrence {
    int constraint_id = -1;
    std::int64_t delta = 0;
};

struct PBOInstance {
    int num_vars = 0;
    std::vector<PBConstraint> hard;
    Objective objective;
    std::vector<std::vector<Occurrence>> occurrences;  // 1-based, slot 0 unused

    void rebuild_occurrence_index();
    bool occurrence_index_consistent() const;
};

// Raw (pre-normalization) constraint material as parsed from OPB.
struct RawTerm {
    std::int64_t coeff = 0;
    Literal lit;
};

enum class RelOp { Ge, Le, Eq };

struct RawConstraint {
    std::vector<RawTerm> terms;
    RelOp op = RelOp::Ge;
    std::int64_t rhs = 0;
};

// Rewrites a raw relation into 0, 1, or 2 normalized >=-constraints:
// duplicate variables merged via the (not x) = 1-x identity, negative
// coefficients eliminated, "<=" negated, "=" split into a pair. Constraints
// whose normalized bound drops to <= 0 are tautologies and omitted. Throws
// TriviallyUnsatError (carrying source_id) when a normalized bound exceeds
// the coefficient sum, and TooLargeError past the 2^62 coefficient-sum guard.
std::vector<PBConstraint> normalize_constraint(const RawConstraint& raw, int source_id = -1);

// Same merging/positivity rewrite for the objective line.
Objective normalize_objective(const std::vector<RawTerm>& raw_terms);

// From-scratch evaluation: (sum of coefficients of true literals, sum >= bound).
std::pair<std::int64_t, bool> evaluate_constraint(const PBConstraint& c, const Assignment& a);

std::int64_t objective_value(const Objective& obj, const Assignment& a);

// The dynamic constraint standing in for "objective value <= k":
//   sum_i b_i * (not l_i) >= sum_i b_i - (k - constant_offset).
// A bound <= 0 marks the constraint inactive (k at or above the maximum).
PBConstraint build_objective_constraint(const Objective& obj, std::int64_t k);

// Just the bound of that constraint, clamped the same way.
std::int64_t objective_constraint_bound(const Objective& obj, std::int64_t k);

// Lowers the bound of an existing objective constraint to target k. Terms are
// untouched, so cached true-literal sums stay valid across the update.
void tighten_objective_bound(PBConstraint& c, const Objective& obj, std::int64_t k);

}  // namespace pbls
