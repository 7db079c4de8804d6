#include "pbls/generator.hpp"

#include <algorithm>
#include <unordered_set>

#include "pbls/rng.hpp"

namespace pbls {

PBOInstance generate_random_instance(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    PBOInstance inst;
    inst.num_vars = cfg.num_vars;

    std::unordered_set<int> used;
    for (int i = 0; i < cfg.num_constraints; ++i) {
        int max_terms = std::min(cfg.max_terms, cfg.num_vars);
        int min_terms = std::min(cfg.min_terms, max_terms);
        int k = static_cast<int>(rng.next_in_range(min_terms, max_terms));

        PBConstraint c;
        c.id = i;
        used.clear();
        std::int64_t coeff_sum = 0;
        for (int j = 0; j < k; ++j) {
            int v;
            do {
                v = static_cast<int>(rng.next_in_range(1, cfg.num_vars));
            } while (!used.insert(v).second);
            std::int64_t coeff = rng.next_in_range(cfg.min_coeff, cfg.max_coeff);
            c.terms.push_back({coeff, {v, rng.next_bit() == 1}});
            coeff_sum += coeff;
        }
        std::sort(c.terms.begin(), c.terms.end(),
                  [](const Term& a, const Term& b) { return a.lit.var < b.lit.var; });
        c.bound = rng.next_in_range(1, coeff_sum);
        inst.hard.push_back(std::move(c));
    }

    for (int v = 1; v <= cfg.num_vars; ++v) {
        if (rng.next_double() >= cfg.objective_density) continue;
        inst.objective.terms.push_back({rng.next_in_range(1, cfg.max_coeff), {v, false}});
    }

    inst.rebuild_occurrence_index();
    return inst;
}

}  // namespace pbls
