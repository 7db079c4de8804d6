#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pbls/model.hpp"
#include "pbls/rng.hpp"

namespace pbls {

// Assignment origins recorded per variable.
inline constexpr int kOriginNone = -1;
inline constexpr int kOriginSoft = -2;      // objective soft-unit preference
inline constexpr int kOriginRandom = -3;    // random fallback branch
inline constexpr int kOriginConflict = -4;  // contradictory forcings, random value

struct Forcing {
    int var = 0;
    int value = 0;
    int origin = kOriginNone;  // >= 0: forcing hard constraint id
};

struct DecimationResult {
    Assignment assignment;
    std::vector<int> origin;  // 1-based, peer of assignment
    int hard_forcings = 0;
    int soft_choices = 0;
    int random_choices = 0;
    int conflict_assignments = 0;
    int contradictions = 0;        // variable-level conflicting forcings
    int falsified_residuals = 0;   // constraints dead under the partial assignment
    bool clean() const { return contradictions == 0 && falsified_residuals == 0; }
};

// Unit-propagation state over a partial assignment: per-constraint residual
// bound B' (bound minus satisfied coefficients) and residual sum S' (total
// coefficient mass still unassigned), plus the pool of pending forcings.
class DecimationState {
public:
    DecimationState(const PBOInstance& inst, Rng& rng);

    // Unassigned literal with the highest residual coefficient a, if forced:
    // S' - a < B' means the constraint cannot be satisfied without it. Ties
    // on the coefficient go to the lowest variable index. Retired and dead
    // constraints yield nothing.
    std::optional<Literal> detect_1ofall(int cid) const;

    // All unassigned literals, forced when S' = B' (nothing can be spared).
    // S' < B' flags the constraint falsified-residual instead.
    std::vector<Literal> detect_all_of_all(int cid);

    // Assigns var, updates every residual it appears in, runs detection on
    // the touched constraints and pools the resulting forcings. Conflicting
    // forcings are logged and resolved by a uniform random value, applied
    // iteratively within this call.
    void propagate_literal(int var, int value, int origin);

    // Detection pass over every constraint; call once before the main loop.
    void seed_detections();

    bool assigned(int var) const { return value_[static_cast<std::size_t>(var)] >= 0; }
    int value(int var) const { return value_[static_cast<std::size_t>(var)]; }
    int origin_of(int var) const { return origin_[static_cast<std::size_t>(var)]; }
    std::int64_t residual_bound(int cid) const { return residual_bound_[static_cast<std::size_t>(cid)]; }
    std::int64_t residual_sum(int cid) const { return residual_sum_[static_cast<std::size_t>(cid)]; }
    bool retired(int cid) const { return residual_bound_[static_cast<std::size_t>(cid)] <= 0; }
    bool falsified_residual(int cid) const { return falsified_residual_[static_cast<std::size_t>(cid)] != 0; }

    bool pool_empty() const { return pool_.empty(); }
    Forcing pop_random_forcing();

    int unassigned_count() const { return static_cast<int>(unassigned_.size()); }
    int pick_random_unassigned();  // does not assign

    // Weighted pick over still-unassigned objective terms, proportional to
    // their coefficients; preferred value makes the objective literal false.
    std::optional<Forcing> pick_soft_unit();

    struct Conflict {
        int var = 0;
        int origin_a = kOriginNone;
        int origin_b = kOriginNone;
    };
    const std::vector<Conflict>& conflict_log() const { return conflict_log_; }
    int contradictions() const { return static_cast<int>(conflict_log_.size()); }
    int falsified_residual_count() const { return falsified_count_; }
    int conflict_assignments() const { return conflict_assignments_; }

private:
    void enqueue(Forcing f);
    void refresh_and_detect(int cid);
    void drain_apply_stack();
    void log_conflict(int var, int origin_a, int origin_b);

    const PBOInstance& inst_;
    Rng& rng_;
    std::vector<std::int8_t> value_;   // -1 unassigned
    std::vector<int> origin_;
    std::vector<std::int64_t> residual_bound_;
    std::vector<std::int64_t> residual_sum_;
    std::vector<std::uint8_t> falsified_residual_;

    std::vector<Forcing> pool_;        // pending forcings, random pick
    std::vector<int> pool_slot_;       // per var: index into pool_ + 1, 0 = none
    std::vector<Forcing> apply_stack_; // conflict resolutions applied in-call

    std::vector<int> unassigned_;
    std::vector<int> unassigned_pos_;  // per var: index into unassigned_, -1 once assigned

    std::vector<std::uint64_t> fenwick_;  // soft-unit weights, 1-based over objective terms
    std::vector<int> soft_slot_;          // per var: objective term index + 1, 0 = none
    std::uint64_t soft_total_ = 0;

    std::vector<Conflict> conflict_log_;
    int falsified_count_ = 0;
    int conflict_assignments_ = 0;

    friend DecimationResult igup_decimation(const PBOInstance& inst, Rng& rng);
};

// Full initializer: propagate pooled hard forcings (uniform random pick),
// then soft units (coefficient-weighted pick), then random variables, until
// the assignment is complete. Contradictions never abort the run.
DecimationResult igup_decimation(const PBOInstance& inst, Rng& rng);

}  // namespace pbls
