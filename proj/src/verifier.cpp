#include "pbls/verifier.hpp"

#include <utility>

namespace pbls {

VerificationReport verify(const PBOInstance& inst, const Assignment& a) {
    VerificationReport rep;
    for (std::size_t i = 0; i < inst.hard.size(); ++i) {
        const PBConstraint& c = inst.hard[i];
        std::int64_t sum = 0;
        for (const Term& t : c.terms) {
            bool value = a.value(t.lit.var) == 1;
            if (value != t.lit.negated) sum += t.coeff;
        }
        if (sum < c.bound) rep.violated.push_back(c.id >= 0 ? c.id : static_cast<int>(i));
    }
    rep.feasible = rep.violated.empty();
    rep.objective = inst.objective.constant_offset;
    for (const Term& t : inst.objective.terms) {
        bool value = a.value(t.lit.var) == 1;
        if (value != t.lit.negated) rep.objective += t.coeff;
    }
    return rep;
}

namespace {

// Shared enumeration core: walks all 2^n assignments in lexicographic order
// (x1 is the most significant position) with incremental sum maintenance,
// calling on_feasible(assignment, objective) for each feasible one.
template <typename Fn>
void enumerate_feasible(const PBOInstance& inst, Fn&& on_feasible) {
    const int n = inst.num_vars;
    const std::size_t m = inst.hard.size();

    std::vector<std::int64_t> sums(m, 0);
    std::int64_t obj = inst.objective.constant_offset;

    // delta[v] = sum changes when v flips 0 -> 1; entry -1 targets the objective.
    std::vector<std::vector<std::pair<int, std::int64_t>>> delta(static_cast<std::size_t>(n) + 1);
    Assignment a(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (const Term& t : inst.hard[i].terms) {
            delta[static_cast<std::size_t>(t.lit.var)].emplace_back(static_cast<int>(i),
                                                                    t.lit.negated ? -t.coeff : t.coeff);
            if (t.lit.negated) sums[i] += t.coeff;  // all-zeros start
        }
    }
    for (const Term& t : inst.objective.terms) {
        delta[static_cast<std::size_t>(t.lit.var)].emplace_back(-1, t.lit.negated ? -t.coeff : t.coeff);
        if (t.lit.negated) obj += t.coeff;
    }

    std::size_t violated = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (sums[i] < inst.hard[i].bound) ++violated;

    auto flip_var = [&](int v) {
        bool to_true = a.value(v) == 0;
        a.set(v, to_true ? 1 : 0);
        for (auto [idx, d] : delta[static_cast<std::size_t>(v)]) {
            std::int64_t change = to_true ? d : -d;
            if (idx < 0) {
                obj += change;
                continue;
            }
            std::int64_t before = sums[static_cast<std::size_t>(idx)];
            std::int64_t after = before + change;
            sums[static_cast<std::size_t>(idx)] = after;
            std::int64_t bound = inst.hard[static_cast<std::size_t>(idx)].bound;
            violated += static_cast<std::size_t>(after < bound) - static_cast<std::size_t>(before < bound);
        }
    };

    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0;; ++mask) {
        if (violated == 0) on_feasible(a, obj);
        if (mask + 1 == total) break;
        // Binary increment: flip the run of trailing set bits plus the next
        // zero. Bit position b holds variable n - b, so x1 varies slowest.
        std::uint64_t changed = mask ^ (mask + 1);
        while (changed != 0) {
            int bit = __builtin_ctzll(changed);
            flip_var(n - bit);
            changed &= changed - 1;
        }
    }
}

}  // namespace

BruteForceResult brute_force_optimum(const PBOInstance& inst) {
    if (inst.num_vars > 25) throw TooLargeError("brute_force_optimum is guarded to 25 variables");
    BruteForceResult r;
    enumerate_feasible(inst, [&](const Assignment& a, std::int64_t obj) {
        if (!r.feasible || obj < r.optimum) {
            r.feasible = true;
            r.optimum = obj;
            r.best = a;
        }
    });
    return r;
}

ForcedLiteralReport forced_literal_oracle(const PBOInstance& inst) {
    if (inst.num_vars > 20) throw TooLargeError("forced_literal_oracle is guarded to 20 variables");
    ForcedLiteralReport rep;
    rep.status.assign(static_cast<std::size_t>(inst.num_vars) + 1, ForcedStatus::Free);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(inst.num_vars) + 1, 0);  // bit0: false seen, bit1: true seen
    enumerate_feasible(inst, [&](const Assignment& a, std::int64_t) {
        rep.feasible = true;
        for (int v = 1; v <= inst.num_vars; ++v)
            seen[static_cast<std::size_t>(v)] |= a.value(v) ? 2 : 1;
    });
    if (!rep.feasible) return rep;
    for (int v = 1; v <= inst.num_vars; ++v) {
        if (seen[static_cast<std::size_t>(v)] == 2) rep.status[static_cast<std::size_t>(v)] = ForcedStatus::ForcedTrue;
        if (seen[static_cast<std::size_t>(v)] == 1) rep.status[static_cast<std::size_t>(v)] = ForcedStatus::ForcedFalse;
    }
    return rep;
}

}  // namespace pbls
