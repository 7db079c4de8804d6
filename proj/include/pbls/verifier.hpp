#pragma once

#include <cstdint>
#include <vector>

#include "pbls/model.hpp"

namespace pbls {

struct VerificationReport {
    bool feasible = false;
    std::vector<int> violated;  // ids of falsified hard constraints
    std::int64_t objective = 0;
};

// From-scratch check of every hard constraint plus the objective. Deliberately
// shares nothing with the solver's incremental bookkeeping.
VerificationReport verify(const PBOInstance& inst, const Assignment& a);

struct BruteForceResult {
    bool feasible = false;
    std::int64_t optimum = 0;
    Assignment best;  // lexicographically smallest argmin
};

// Exhaustive enumeration in lexicographic assignment order (x1 varies
// slowest). Guard: num_vars <= 25, throws TooLargeError beyond.
BruteForceResult brute_force_optimum(const PBOInstance& inst);

enum class ForcedStatus { Free, ForcedTrue, ForcedFalse };

struct ForcedLiteralReport {
    bool feasible = false;
    std::vector<ForcedStatus> status;  // 1-based, slot 0 unused
};

// Variable v is forced to b iff every assignment satisfying all hard
// constraints has v = b. Guard: num_vars <= 20.
ForcedLiteralReport forced_literal_oracle(const PBOInstance& inst);

}  // namespace pbls
