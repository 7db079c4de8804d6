#include "pbls/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace pbls {

std::int64_t PBConstraint::coeff_sum() const {
    std::int64_t s = 0;
    for (const Term& t : terms) s += t.coeff;
    return s;
}

std::int64_t Objective::coeff_sum() const {
    std::int64_t s = 0;
    for (const Term& t : terms) s += t.coeff;
    return s;
}

void PBOInstance::rebuild_occurrence_index() {
    occurrences.assign(static_cast<std::size_t>(num_vars) + 1, {});
    for (const PBConstraint& c : hard)
        for (const Term& t : c.terms)
            occurrences[static_cast<std::size_t>(t.lit.var)].push_back(
                {c.id, t.lit.negated ? -t.coeff : t.coeff});
}

bool PBOInstance::occurrence_index_consistent() const {
    if (occurrences.size() != static_cast<std::size_t>(num_vars) + 1) return false;
    std::size_t listed = 0;
    for (int v = 1; v <= num_vars; ++v) {
        for (const Occurrence& o : occurrences[static_cast<std::size_t>(v)]) {
            if (o.constraint_id < 0 || o.constraint_id >= static_cast<int>(hard.size())) return false;
            const PBConstraint& c = hard[static_cast<std::size_t>(o.constraint_id)];
            bool found = false;
            for (const Term& t : c.terms)
                if (t.lit.var == v && (t.lit.negated ? -t.coeff : t.coeff) == o.delta) found = true;
            if (!found) return false;
            ++listed;
        }
    }
    std::size_t actual = 0;
    for (const PBConstraint& c : hard) actual += c.terms.size();
    return listed == actual;
}

namespace {

// Merges duplicate variables onto the positive literal (coeff * (not x) is
// rewritten as coeff - coeff * x) and tracks the accumulated constant.
// Returns terms as net signed coefficients on positive literals, sorted by
// variable, zero coefficients dropped.
struct MergeResult {
    std::vector<std::pair<int, std::int64_t>> net;  // (var, signed coeff on x)
    __int128 constant = 0;                          // moved-out constant part
};

MergeResult merge_on_positive(const std::vector<RawTerm>& raw) {
    std::map<int, __int128> acc;
    __int128 constant = 0;
    for (const RawTerm& t : raw) {
        if (t.lit.var < 1) throw Error("term references variable index < 1");
        if (t.coeff == 0) continue;
        if (t.lit.negated) {
            acc[t.lit.var] -= t.coeff;
            constant += t.coeff;
        } else {
            acc[t.lit.var] += t.coeff;
        }
    }
    MergeResult r;
    r.constant = constant;
    for (auto& [var, coeff] : acc) {
        if (coeff == 0) continue;
        if (coeff > kCoeffSumLimit || -coeff > kCoeffSumLimit)
            throw TooLargeError("coefficient magnitude exceeds the 2^62 limit");
        r.net.emplace_back(var, static_cast<std::int64_t>(coeff));
    }
    return r;
}

// Builds one normalized >=-constraint from net positive-literal coefficients
// and a rhs (both already merged). Returns nothing for a tautology.
std::vector<PBConstraint> normalize_ge(const MergeResult& merged, __int128 rhs, int source_id) {
    // sum_v net_v * x_v + constant >= rhs
    __int128 bound = rhs - merged.constant;
    std::vector<Term> terms;
    terms.reserve(merged.net.size());
    std::uint64_t coeff_sum = 0;
    for (auto [var, coeff] : merged.net) {
        if (coeff < 0) {
            // -c*x >= ...  becomes  c*(not x) >= ... + c
            terms.push_back({-coeff, {var, true}});
            bound += -static_cast<__int128>(coeff);
            coeff_sum += static_cast<std::uint64_t>(-coeff);
        } else {
            terms.push_back({coeff, {var, false}});
            coeff_sum += static_cast<std::uint64_t>(coeff);
        }
        if (coeff_sum > static_cast<std::uint64_t>(kCoeffSumLimit))
            throw TooLargeError("constraint coefficient sum exceeds the 2^62 limit");
    }
    if (bound <= 0) return {};  // tautology
    if (bound > static_cast<__int128>(coeff_sum)) throw TriviallyUnsatError(source_id);
    PBConstraint c;
    c.kind = ConstraintKind::Hard;
    c.terms = std::move(terms);
    c.bound = static_cast<std::int64_t>(bound);
    return {std::move(c)};
}

}  // namespace

std::vector<PBConstraint> normalize_constraint(const RawConstraint& raw, int source_id) {
    MergeResult merged = merge_on_positive(raw.terms);

    MergeResult flipped;  // negated form for Le and the <= half of Eq
    if (raw.op != RelOp::Ge) {
        flipped.constant = -merged.constant;
        flipped.net.reserve(merged.net.size());
        for (auto [var, coeff] : merged.net) flipped.net.emplace_back(var, -coeff);
    }

    std::vector<PBConstraint> out;
    switch (raw.op) {
        case RelOp::Ge:
            out = normalize_ge(merged, raw.rhs, source_id);
            break;
        case RelOp::Le:
            out = normalize_ge(flipped, -static_cast<__int128>(raw.rhs), source_id);
            break;
        case RelOp::Eq: {
            out = normalize_ge(merged, raw.rhs, source_id);
            auto le = normalize_ge(flipped, -static_cast<__int128>(raw.rhs), source_id);
            out.insert(out.end(), le.begin(), le.end());
            break;
        }
    }
    return out;
}

Objective normalize_objective(const std::vector<RawTerm>& raw_terms) {
    MergeResult merged = merge_on_positive(raw_terms);
    Objective obj;
    // merged form: sum net_v * x_v + constant. Negative coefficients move to
    // negated literals: -c*x = c*(not x) - c.
    __int128 offset = merged.constant;
    std::uint64_t coeff_sum = 0;
    for (auto [var, coeff] : merged.net) {
        if (coeff < 0) {
            obj.terms.push_back({-coeff, {var, true}});
            offset -= -static_cast<__int128>(coeff);
            coeff_sum += static_cast<std::uint64_t>(-coeff);
        } else {
            obj.terms.push_back({coeff, {var, false}});
            coeff_sum += static_cast<std::uint64_t>(coeff);
        }
        if (coeff_sum > static_cast<std::uint64_t>(kCoeffSumLimit))
            throw TooLargeError("objective coefficient sum exceeds the 2^62 limit");
    }
    if (offset > kCoeffSumLimit || offset < -static_cast<__int128>(kCoeffSumLimit))
        throw TooLargeError("objective constant offset exceeds the 2^62 limit");
    obj.constant_offset = static_cast<std::int64_t>(offset);
    return obj;
}

std::pair<std::int64_t, bool> evaluate_constraint(const PBConstraint& c, const Assignment& a) {
    std::int64_t sum = 0;
    for (const Term& t : c.terms)
        if (a.is_true(t.lit)) sum += t.coeff;
    return {sum, sum >= c.bound};
}

std::int64_t objective_value(const Objective& obj, const Assignment& a) {
    std::int64_t v = obj.constant_offset;
    for (const Term& t : obj.terms)
        if (a.is_true(t.lit)) v += t.coeff;
    return v;
}

std::int64_t objective_constraint_bound(const Objective& obj, std::int64_t k) {
    __int128 bound = static_cast<__int128>(obj.coeff_sum()) - (static_cast<__int128>(k) - obj.constant_offset);
    if (bound <= 0) return 0;  // inactive
    if (bound > kCoeffSumLimit) {
        // k far below the minimum; clamp keeps the constraint permanently
        // falsified without risking overflow downstream.
        return kCoeffSumLimit;
    }
    return static_cast<std::int64_t>(bound);
}

PBConstraint build_objective_constraint(const Objective& obj, std::int64_t k) {
    PBConstraint c;
    c.kind = ConstraintKind::Objective;
    c.terms.reserve(obj.terms.size());
    for (const Term& t : obj.terms) c.terms.push_back({t.coeff, t.lit.negation()});
    c.bound = objective_constraint_bound(obj, k);
    return c;
}

void tighten_objective_bound(PBConstraint& c, const Objective& obj, std::int64_t k) {
    c.bound = objective_constraint_bound(obj, k);
}

}  // namespace pbls
