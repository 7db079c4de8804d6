#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "pbls/decimation.hpp"
#include "pbls/model.hpp"
#include "pbls/rng.hpp"

namespace pbls {

struct SolveParams {
    double p = 0.5;  // probability of the random-falsified branch at a local optimum
    double cutoff_seconds = 300.0;
    std::uint64_t seed = 1;
    bool use_decimation = true;  // off: all-zeros initial assignment
    int bms = 0;                 // best-of-k sampling in pick_scoring_var, 0 = plain argmax
    std::int64_t hard_inc = 1;
    std::int64_t obj_inc = 1;
    std::int64_t gamma = 1000;   // objective weight cap
    std::uint64_t max_flips = std::numeric_limits<std::uint64_t>::max();
};

enum class SolveStatus { Feasible, Unknown };

struct SolveStats {
    std::uint64_t flips = 0;
    std::uint64_t local_optima = 0;
    int decimation_hard_forcings = 0;
    int decimation_soft_choices = 0;
    int decimation_random_choices = 0;
    int decimation_contradictions = 0;
    double time_to_first_feasible = -1.0;  // seconds, < 0 when none found
    double elapsed_seconds = 0.0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    Assignment best;  // meaningful only when status == Feasible
    std::int64_t best_cost = 0;
    Assignment initial;  // the decimation (or all-zeros) starting point
    SolveStats stats;
};

using ImprovementCallback = std::function<void(std::int64_t cost, double seconds)>;

// Weighted score-guided search state over one instance. Hard constraints keep
// their instance ids; a nonempty objective adds one dynamic constraint at
// index objective_index() standing in for "objective value <= k".
class SolverState {
public:
    SolverState(const PBOInstance& inst, const SolveParams& params, Rng& rng, const Assignment& initial);

    // Weighted benefit of flipping v: sum over constraints containing v of
    // w(c) * (sat-after - sat-before). Cached, updated incrementally.
    std::int64_t score(int v) const { return score_[static_cast<std::size_t>(v)]; }

    // Highest-score variable among those with positive score, ties uniform at
    // random; nothing at a local optimum. With params.bms = k > 0 and more
    // than k candidates, best of k uniform samples instead of a full scan.
    std::optional<int> pick_scoring_var();

    // At a local optimum: every falsified hard constraint gains hard_inc; if
    // none is falsified, a falsified active objective constraint gains
    // obj_inc up to the gamma cap. Scores are patched incrementally.
    void update_weights();

    // care(c) += 1 for every falsified hard constraint; same call sites as
    // update_weights.
    void update_care();

    // With probability p a uniform random falsified hard constraint, with
    // 1 - p the falsified one of maximal care (ties uniform). Falls back to
    // the objective constraint when no hard constraint is falsified.
    int select_stuck_constraint();

    // Highest-score variable inside constraint cid, ties uniform at random.
    int pick_var_in_constraint(int cid);

    void flip(int v);

    // Lowers the objective constraint bound to enforce "value <= k".
    void set_objective_target(std::int64_t k);

    // Records alpha as the new best when it is hard-feasible and improves on
    // best_cost(), tightening the objective target to best - 1. Returns
    // whether a record happened. flip() calls this; exposed for the initial
    // assignment.
    bool record_if_improved();

    bool hard_feasible() const { return falsified_hard_.empty(); }
    std::int64_t current_objective() const;  // offset + true objective terms, O(1)

    const Assignment& assignment() const { return alpha_; }
    bool has_best() const { return has_best_; }
    const Assignment& best_assignment() const { return best_; }
    std::int64_t best_cost() const { return best_cost_; }

    int num_constraints() const { return static_cast<int>(cstate_.size()); }
    int objective_index() const { return objective_index_; }  // -1 without objective
    std::int64_t constraint_sum(int cid) const { return cstate_[static_cast<std::size_t>(cid)].sum; }
    std::int64_t constraint_bound(int cid) const { return cstate_[static_cast<std::size_t>(cid)].bound; }
    std::int64_t constraint_weight(int cid) const { return cstate_[static_cast<std::size_t>(cid)].weight; }
    std::int64_t care(int cid) const { return care_[static_cast<std::size_t>(cid)]; }
    bool constraint_falsified(int cid) const {
        const ConstraintState& cs = cstate_[static_cast<std::size_t>(cid)];
        return cs.sum < cs.bound;
    }
    std::vector<int> falsified_hard() const { return falsified_hard_; }

    std::uint64_t local_optima() const { return local_optima_; }
    void count_local_optimum() { ++local_optima_; }

private:
    void add_score_contributions(int cid, std::int64_t multiplier);
    void apply_flip_score_delta(int cid, int v, std::int64_t s_old, std::int64_t s_new);
    void sync_goodvar(int v);
    void sync_touched_vars();
    void set_falsified_hard(int cid, bool falsified);

    const PBOInstance& inst_;
    const SolveParams& params_;
    Rng& rng_;

    // Constraint-major term layout; entries are (var, delta), delta being the
    // sum change when var goes 0 -> 1.
    std::vector<std::size_t> term_start_;
    std::vector<int> term_var_;
    std::vector<std::int64_t> term_delta_;
    // Variable-major mirror.
    std::vector<std::size_t> occ_start_;
    std::vector<int> occ_cid_;
    std::vector<std::int64_t> occ_delta_;

    // One row per constraint; everything a flip touches sits on one cache line.
    struct alignas(32) ConstraintState {
        std::int64_t sum;
        std::int64_t bound;
        std::int64_t weight;
        std::int64_t max_abs_delta;  // largest |term delta|, bounds one flip's reach
    };
    std::vector<ConstraintState> cstate_;
    std::vector<std::int64_t> care_;

    std::vector<int> falsified_hard_;  // stack of falsified hard constraint ids
    std::vector<int> falsified_pos_;   // per hard cid: stack index + 1, 0 = absent

    std::vector<std::int64_t> score_;
    std::vector<int> goodvar_;     // stack of positive-score variables
    std::vector<std::int64_t> goodvar_score_;  // mirror of score_ for the stack, scanned on picks
    std::vector<int> goodvar_pos_;

    Assignment alpha_;
    Assignment best_;
    std::int64_t best_cost_ = 0;
    bool has_best_ = false;

    int objective_index_ = -1;
    std::int64_t objective_coeff_sum_ = 0;

    std::uint64_t local_optima_ = 0;

    std::vector<int> scratch_;        // tie candidates
    std::vector<int> touched_vars_;   // score changes since the last goodvar sync
};

// Full anytime run: decimation (or all-zeros) initial assignment, then
// score-guided flips with weight/care updates at local optima, recording and
// tightening on every feasible improvement, until the cutoff or flip budget.
SolveResult solve(const PBOInstance& inst, const SolveParams& params,
                  const ImprovementCallback& on_improve = {});

}  // namespace pbls
