#include "pbls/solver.hpp"

#include <chrono>

namespace pbls {

SolverState::SolverState(const PBOInstance& inst, const SolveParams& params, Rng& rng,
                         const Assignment& initial)
    : inst_(inst), params_(params), rng_(rng), alpha_(initial) {
    std::size_t m = inst.hard.size();
    std::vector<const PBConstraint*> cons;
    cons.reserve(m + 1);
    for (const PBConstraint& c : inst.hard) cons.push_back(&c);

    PBConstraint objc;
    if (!inst.objective.empty()) {
        objective_coeff_sum_ = inst.objective.coeff_sum();
        // k0 = one below the worst possible value, so the constraint starts
        // active with bound 1.
        objc = build_objective_constraint(inst.objective,
                                          inst.objective.constant_offset + objective_coeff_sum_ - 1);
        objective_index_ = static_cast<int>(m);
        cons.push_back(&objc);
    }

    std::size_t total_cons = cons.size();
    term_start_.assign(total_cons + 1, 0);
    for (std::size_t c = 0; c < total_cons; ++c) term_start_[c + 1] = term_start_[c] + cons[c]->terms.size();
    term_var_.resize(term_start_.back());
    term_delta_.resize(term_start_.back());

    std::size_t nv = static_cast<std::size_t>(inst.num_vars) + 1;
    occ_start_.assign(nv + 1, 0);
    for (std::size_t c = 0; c < total_cons; ++c) {
        std::size_t base = term_start_[c];
        for (std::size_t i = 0; i < cons[c]->terms.size(); ++i) {
            const Term& t = cons[c]->terms[i];
            term_var_[base + i] = t.lit.var;
            term_delta_[base + i] = t.lit.negated ? -t.coeff : t.coeff;
            ++occ_start_[static_cast<std::size_t>(t.lit.var) + 1];
        }
    }
    for (std::size_t v = 1; v <= nv; ++v) occ_start_[v] += occ_start_[v - 1];
    occ_cid_.resize(term_start_.back());
    occ_delta_.resize(term_start_.back());
    std::vector<std::size_t> cursor(occ_start_.begin(), occ_start_.end() - 1);
    for (std::size_t c = 0; c < total_cons; ++c) {
        for (std::size_t i = term_start_[c]; i < term_start_[c + 1]; ++i) {
            std::size_t v = static_cast<std::size_t>(term_var_[i]);
            occ_cid_[cursor[v]] = static_cast<int>(c);
            occ_delta_[cursor[v]] = term_delta_[i];
            ++cursor[v];
        }
    }

    cstate_.assign(total_cons, {0, 0, 1, 0});
    care_.assign(total_cons, 0);
    for (std::size_t c = 0; c < total_cons; ++c) {
        ConstraintState& cs = cstate_[c];
        cs.bound = cons[c]->bound;
        for (std::size_t i = term_start_[c]; i < term_start_[c + 1]; ++i) {
            std::int64_t mag = term_delta_[i] > 0 ? term_delta_[i] : -term_delta_[i];
            cs.max_abs_delta = std::max(cs.max_abs_delta, mag);
            bool lit_true = (term_delta_[i] > 0) == (alpha_.value(term_var_[i]) == 1);
            if (lit_true) cs.sum += mag;
        }
    }

    falsified_pos_.assign(m, 0);
    for (std::size_t c = 0; c < m; ++c)
        if (cstate_[c].sum < cstate_[c].bound) set_falsified_hard(static_cast<int>(c), true);

    score_.assign(nv, 0);
    goodvar_pos_.assign(nv, 0);
    for (std::size_t c = 0; c < total_cons; ++c)
        add_score_contributions(static_cast<int>(c), cstate_[c].weight);
    touched_vars_.clear();
    for (int v = 1; v <= inst.num_vars; ++v) sync_goodvar(v);
}

void SolverState::add_score_contributions(int cid, std::int64_t multiplier) {
    std::size_t c = static_cast<std::size_t>(cid);
    std::int64_t s = cstate_[c].sum;
    std::int64_t b = cstate_[c].bound;
    int sat_now = s >= b ? 1 : 0;
    // No single flip can cross the bound from this far away; every chi is 0.
    if (sat_now ? s - b >= cstate_[c].max_abs_delta : b - s > cstate_[c].max_abs_delta) return;
    for (std::size_t i = term_start_[c]; i < term_start_[c + 1]; ++i) {
        int u = term_var_[i];
        std::int64_t d = alpha_.value(u) == 0 ? term_delta_[i] : -term_delta_[i];
        int chi = (s + d >= b ? 1 : 0) - sat_now;
        if (chi != 0) {
            score_[static_cast<std::size_t>(u)] += multiplier * chi;
            touched_vars_.push_back(u);
        }
    }
}

void SolverState::sync_touched_vars() {
    for (int u : touched_vars_) sync_goodvar(u);
    touched_vars_.clear();
}

void SolverState::sync_goodvar(int v) {
    std::size_t vi = static_cast<std::size_t>(v);
    bool in = goodvar_pos_[vi] != 0;
    bool should = score_[vi] > 0;
    if (should == in) {
        if (in) goodvar_score_[static_cast<std::size_t>(goodvar_pos_[vi] - 1)] = score_[vi];
        return;
    }
    if (should) {
        goodvar_.push_back(v);
        goodvar_score_.push_back(score_[vi]);
        goodvar_pos_[vi] = static_cast<int>(goodvar_.size());
    } else {
        int pos = goodvar_pos_[vi];
        goodvar_[static_cast<std::size_t>(pos - 1)] = goodvar_.back();
        goodvar_score_[static_cast<std::size_t>(pos - 1)] = goodvar_score_.back();
        goodvar_pos_[static_cast<std::size_t>(goodvar_.back())] = pos;
        goodvar_.pop_back();
        goodvar_score_.pop_back();
        goodvar_pos_[vi] = 0;
    }
}

void SolverState::set_falsified_hard(int cid, bool falsified) {
    std::size_t c = static_cast<std::size_t>(cid);
    bool in = falsified_pos_[c] != 0;
    if (falsified == in) return;
    if (falsified) {
        falsified_hard_.push_back(cid);
        falsified_pos_[c] = static_cast<int>(falsified_hard_.size());
    } else {
        int pos = falsified_pos_[c];
        falsified_hard_[static_cast<std::size_t>(pos - 1)] = falsified_hard_.back();
        falsified_pos_[static_cast<std::size_t>(falsified_hard_.back())] = pos;
        falsified_hard_.pop_back();
        falsified_pos_[c] = 0;
    }
}

std::optional<int> SolverState::pick_scoring_var() {
    if (goodvar_.empty()) return std::nullopt;
    if (params_.bms > 0 && goodvar_.size() > static_cast<std::size_t>(params_.bms)) {
        std::size_t best = rng_.next_index(goodvar_.size());
        for (int i = 1; i < params_.bms; ++i) {
            std::size_t cand = rng_.next_index(goodvar_.size());
            if (goodvar_score_[cand] > goodvar_score_[best]) best = cand;
        }
        return goodvar_[best];
    }
    std::int64_t best_score = goodvar_score_[0];
    scratch_.clear();
    scratch_.push_back(goodvar_[0]);
    for (std::size_t i = 1; i < goodvar_.size(); ++i) {
        std::int64_t s = goodvar_score_[i];
        if (s < best_score) continue;
        if (s > best_score) {
            best_score = s;
            scratch_.clear();
        }
        scratch_.push_back(goodvar_[i]);
    }
    if (scratch_.size() == 1) return scratch_[0];
    return scratch_[rng_.next_index(scratch_.size())];
}

void SolverState::update_weights() {
    if (!falsified_hard_.empty()) {
        touched_vars_.clear();
        std::size_t m = falsified_pos_.size();
        if (falsified_hard_.size() * 8 >= m) {
            // Dense stack: walking constraint ids in ascending order turns the
            // term-array accesses into a forward sweep.
            for (std::size_t c = 0; c < m; ++c) {
                if (falsified_pos_[c] == 0) continue;
                add_score_contributions(static_cast<int>(c), params_.hard_inc);
                cstate_[c].weight += params_.hard_inc;
            }
        } else {
            for (int cid : falsified_hard_) {
                add_score_contributions(cid, params_.hard_inc);
                cstate_[static_cast<std::size_t>(cid)].weight += params_.hard_inc;
            }
        }
        sync_touched_vars();
        return;
    }
    if (objective_index_ < 0) return;
    ConstraintState& oc = cstate_[static_cast<std::size_t>(objective_index_)];
    if (oc.bound <= 0 || oc.sum >= oc.bound) return;
    std::int64_t inc = params_.obj_inc;
    if (oc.weight + inc > params_.gamma) inc = params_.gamma - oc.weight;
    if (inc <= 0) return;
    touched_vars_.clear();
    add_score_contributions(objective_index_, inc);
    oc.weight += inc;
    sync_touched_vars();
}

void SolverState::update_care() {
    for (int cid : falsified_hard_) ++care_[static_cast<std::size_t>(cid)];
}

int SolverState::select_stuck_constraint() {
    if (falsified_hard_.empty()) return objective_index_;
    if (rng_.next_double() < params_.p)
        return falsified_hard_[rng_.next_index(falsified_hard_.size())];
    std::int64_t best_care = care_[static_cast<std::size_t>(falsified_hard_[0])];
    scratch_.clear();
    scratch_.push_back(falsified_hard_[0]);
    for (std::size_t i = 1; i < falsified_hard_.size(); ++i) {
        std::int64_t c = care_[static_cast<std::size_t>(falsified_hard_[i])];
        if (c < best_care) continue;
        if (c > best_care) {
            best_care = c;
            scratch_.clear();
        }
        scratch_.push_back(falsified_hard_[i]);
    }
    if (scratch_.size() == 1) return scratch_[0];
    return scratch_[rng_.next_index(scratch_.size())];
}

int SolverState::pick_var_in_constraint(int cid) {
    std::size_t c = static_cast<std::size_t>(cid);
    scratch_.clear();
    std::int64_t best_score = 0;
    for (std::size_t i = term_start_[c]; i < term_start_[c + 1]; ++i) {
        int u = term_var_[i];
        std::int64_t s = score(u);
        if (scratch_.empty() || s > best_score) {
            best_score = s;
            scratch_.clear();
            scratch_.push_back(u);
        } else if (s == best_score) {
            scratch_.push_back(u);
        }
    }
    if (scratch_.size() == 1) return scratch_[0];
    return scratch_[rng_.next_index(scratch_.size())];
}

void SolverState::flip(int v) {
    std::size_t vi = static_cast<std::size_t>(v);
    std::size_t first = occ_start_[vi];
    std::size_t last = occ_start_[vi + 1];
    bool to_true = alpha_.value(v) == 0;
    alpha_.flip(v);

    touched_vars_.clear();
    for (std::size_t i = first; i < last; ++i) {
        int cid = occ_cid_[i];
        ConstraintState& cs = cstate_[static_cast<std::size_t>(cid)];
        std::int64_t d = to_true ? occ_delta_[i] : -occ_delta_[i];
        std::int64_t s_old = cs.sum;
        std::int64_t s_new = s_old + d;
        cs.sum = s_new;
        if (cid != objective_index_) set_falsified_hard(cid, s_new < cs.bound);
        // If the sum stays at least max_abs_delta away from the bound on both
        // sides of the flip, no term's satisfiability contribution can change.
        std::int64_t lo = std::min(s_old, s_new);
        std::int64_t hi = std::max(s_old, s_new);
        if (lo - cs.max_abs_delta >= cs.bound || hi < cs.bound - cs.max_abs_delta) continue;
        apply_flip_score_delta(cid, v, s_old, s_new);
    }
    sync_touched_vars();

    record_if_improved();
}

// Net score update for one constraint crossing a flip of v, equivalent to
// removing all contributions at s_old under the pre-flip assignment and
// re-adding them at s_new under the post-flip one, in a single pass.
void SolverState::apply_flip_score_delta(int cid, int v, std::int64_t s_old, std::int64_t s_new) {
    std::size_t c = static_cast<std::size_t>(cid);
    std::int64_t b = cstate_[c].bound;
    std::int64_t w = cstate_[c].weight;
    int sat_old = s_old >= b ? 1 : 0;
    int sat_new = s_new >= b ? 1 : 0;
    for (std::size_t i = term_start_[c]; i < term_start_[c + 1]; ++i) {
        int u = term_var_[i];
        if (u == v) {
            // Flipping v again would undo the sum change, so its chi swaps
            // between the two satisfiability states.
            if (sat_old != sat_new) {
                score_[static_cast<std::size_t>(u)] += 2 * w * (sat_old - sat_new);
                touched_vars_.push_back(u);
            }
            continue;
        }
        std::int64_t d = alpha_.value(u) == 0 ? term_delta_[i] : -term_delta_[i];
        int chi_old = (s_old + d >= b ? 1 : 0) - sat_old;
        int chi_new = (s_new + d >= b ? 1 : 0) - sat_new;
        if (chi_old != chi_new) {
            score_[static_cast<std::size_t>(u)] += w * (chi_new - chi_old);
            touched_vars_.push_back(u);
        }
    }
}

std::int64_t SolverState::current_objective() const {
    if (objective_index_ < 0) return inst_.objective.constant_offset;
    // The objective constraint counts negated objective literals, so the
    // objective value is offset + coeff_sum - that sum.
    return inst_.objective.constant_offset + objective_coeff_sum_ -
           cstate_[static_cast<std::size_t>(objective_index_)].sum;
}

bool SolverState::record_if_improved() {
    if (!falsified_hard_.empty()) return false;
    std::int64_t cost = current_objective();
    if (has_best_ && cost >= best_cost_) return false;
    has_best_ = true;
    best_cost_ = cost;
    best_ = alpha_;
    set_objective_target(cost - 1);
    return true;
}

void SolverState::set_objective_target(std::int64_t k) {
    if (objective_index_ < 0) return;
    ConstraintState& oc = cstate_[static_cast<std::size_t>(objective_index_)];
    std::int64_t nb = objective_constraint_bound(inst_.objective, k);
    if (nb == oc.bound) return;
    touched_vars_.clear();
    add_score_contributions(objective_index_, -oc.weight);
    oc.bound = nb;
    add_score_contributions(objective_index_, oc.weight);
    sync_touched_vars();
}

SolveResult solve(const PBOInstance& inst, const SolveParams& params,
                  const ImprovementCallback& on_improve) {
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    Rng rng(params.seed);
    SolveResult result;
    DecimationResult init;
    if (params.use_decimation) {
        init = igup_decimation(inst, rng);
    } else {
        init.assignment = Assignment(inst.num_vars);
        init.origin.assign(static_cast<std::size_t>(inst.num_vars) + 1, kOriginNone);
    }
    result.initial = init.assignment;
    result.stats.decimation_hard_forcings = init.hard_forcings;
    result.stats.decimation_soft_choices = init.soft_choices;
    result.stats.decimation_random_choices = init.random_choices;
    result.stats.decimation_contradictions = init.contradictions;

    SolverState st(inst, params, rng, init.assignment);

    std::int64_t last_reported = 0;
    bool any_reported = false;
    auto note_improvement = [&] {
        if (!st.has_best()) return;
        if (any_reported && st.best_cost() >= last_reported) return;
        double sec = elapsed();
        if (!any_reported) result.stats.time_to_first_feasible = sec;
        any_reported = true;
        last_reported = st.best_cost();
        if (on_improve) on_improve(last_reported, sec);
    };

    std::uint64_t flips = 0;
    while (true) {
        if ((flips & 1023) == 0 && elapsed() >= params.cutoff_seconds) break;
        if (flips >= params.max_flips) break;

        if (st.record_if_improved()) note_improvement();
        if (st.hard_feasible() && st.objective_index() < 0) break;  // decision instance solved

        if (std::optional<int> v = st.pick_scoring_var()) {
            st.flip(*v);
        } else {
            st.count_local_optimum();
            bool objective_pressure = st.objective_index() >= 0 &&
                                      st.constraint_falsified(st.objective_index());
            if (st.hard_feasible() && !objective_pressure) break;  // nothing left to chase
            st.update_weights();
            st.update_care();
            int cid = st.select_stuck_constraint();
            st.flip(st.pick_var_in_constraint(cid));
        }
        ++flips;
        note_improvement();
    }

    result.stats.flips = flips;
    result.stats.local_optima = st.local_optima();
    result.stats.elapsed_seconds = elapsed();
    if (st.has_best()) {
        result.status = SolveStatus::Feasible;
        result.best = st.best_assignment();
        result.best_cost = st.best_cost();
    }
    return result;
}

}  // namespace pbls
