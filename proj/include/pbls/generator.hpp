#pragma once

#include <cstdint>

#include "pbls/model.hpp"

namespace pbls {

struct GenConfig {
    int num_vars = 10;
    int num_constraints = 15;
    int min_terms = 2;
    int max_terms = 5;
    std::int64_t min_coeff = 1;
    std::int64_t max_coeff = 5;
    double objective_density = 0.5;  // chance each variable joins the objective
    std::uint64_t seed = 1;
};

// Deterministic random instance: every constraint gets distinct variables,
// coefficients in [min_coeff, max_coeff], random literal polarity, and a
// bound in [1, coefficient sum] so each constraint is individually
// satisfiable (the conjunction may still be infeasible).
PBOInstance generate_random_instance(const GenConfig& cfg);

}  // namespace pbls
