#include "pbls/decimation.hpp"

#include <cstdlib>

namespace pbls {

DecimationState::DecimationState(const PBOInstance& inst, Rng& rng) : inst_(inst), rng_(rng) {
    std::size_t nv = static_cast<std::size_t>(inst.num_vars) + 1;
    value_.assign(nv, -1);
    origin_.assign(nv, kOriginNone);
    pool_slot_.assign(nv, 0);
    soft_slot_.assign(nv, 0);
    unassigned_pos_.assign(nv, -1);
    unassigned_.reserve(static_cast<std::size_t>(inst.num_vars));
    for (int v = 1; v <= inst.num_vars; ++v) {
        unassigned_pos_[static_cast<std::size_t>(v)] = static_cast<int>(unassigned_.size());
        unassigned_.push_back(v);
    }

    residual_bound_.reserve(inst.hard.size());
    residual_sum_.reserve(inst.hard.size());
    for (const PBConstraint& c : inst.hard) {
        residual_bound_.push_back(c.bound);
        residual_sum_.push_back(c.coeff_sum());
    }
    falsified_residual_.assign(inst.hard.size(), 0);

    fenwick_.assign(inst.objective.terms.size() + 1, 0);
    for (std::size_t i = 0; i < inst.objective.terms.size(); ++i) {
        const Term& t = inst.objective.terms[i];
        soft_slot_[static_cast<std::size_t>(t.lit.var)] = static_cast<int>(i) + 1;
        std::uint64_t w = static_cast<std::uint64_t>(t.coeff);
        for (std::size_t j = i + 1; j < fenwick_.size(); j += j & (~j + 1)) fenwick_[j] += w;
        soft_total_ += w;
    }
}

std::optional<Literal> DecimationState::detect_1ofall(int cid) const {
    std::size_t c = static_cast<std::size_t>(cid);
    std::int64_t bound = residual_bound_[c];
    std::int64_t sum = residual_sum_[c];
    if (bound <= 0 || sum < bound) return std::nullopt;
    const Literal* best = nullptr;
    std::int64_t best_coeff = 0;
    for (const Term& t : inst_.hard[c].terms) {
        if (assigned(t.lit.var)) continue;
        if (t.coeff > best_coeff ||
            (t.coeff == best_coeff && best != nullptr && t.lit.var < best->var)) {
            best_coeff = t.coeff;
            best = &t.lit;
        }
    }
    if (best == nullptr || sum - best_coeff >= bound) return std::nullopt;
    return *best;
}

std::vector<Literal> DecimationState::detect_all_of_all(int cid) {
    std::size_t c = static_cast<std::size_t>(cid);
    std::int64_t bound = residual_bound_[c];
    std::int64_t sum = residual_sum_[c];
    if (bound <= 0) return {};
    if (sum < bound) {
        if (!falsified_residual_[c]) {
            falsified_residual_[c] = 1;
            ++falsified_count_;
        }
        return {};
    }
    if (sum != bound) return {};
    std::vector<Literal> forced;
    for (const Term& t : inst_.hard[c].terms)
        if (!assigned(t.lit.var)) forced.push_back(t.lit);
    return forced;
}

void DecimationState::log_conflict(int var, int origin_a, int origin_b) {
    conflict_log_.push_back({var, origin_a, origin_b});
}

void DecimationState::enqueue(Forcing f) {
    std::size_t v = static_cast<std::size_t>(f.var);
    if (assigned(f.var)) {
        if (value_[v] != f.value) log_conflict(f.var, origin_[v], f.origin);
        return;
    }
    if (int slot = pool_slot_[v]; slot != 0) {
        Forcing& pending = pool_[static_cast<std::size_t>(slot - 1)];
        if (pending.value == f.value) return;
        log_conflict(f.var, pending.origin, f.origin);
        // Contradictory forcings: the variable gets a uniform random value,
        // applied within the current propagation drain.
        pool_[static_cast<std::size_t>(slot - 1)] = pool_.back();
        pool_slot_[static_cast<std::size_t>(pool_.back().var)] = slot;
        pool_.pop_back();
        pool_slot_[v] = 0;
        apply_stack_.push_back({f.var, rng_.next_bit(), kOriginConflict});
        return;
    }
    pool_.push_back(f);
    pool_slot_[v] = static_cast<int>(pool_.size());
}

void DecimationState::refresh_and_detect(int cid) {
    if (retired(cid)) return;
    std::vector<Literal> all = detect_all_of_all(cid);
    if (!all.empty()) {
        for (Literal l : all) enqueue({l.var, l.negated ? 0 : 1, cid});
        return;
    }
    if (falsified_residual(cid)) return;
    if (std::optional<Literal> one = detect_1ofall(cid))
        enqueue({one->var, one->negated ? 0 : 1, cid});
}

void DecimationState::propagate_literal(int var, int value, int origin) {
    apply_stack_.push_back({var, value, origin});
    drain_apply_stack();
}

void DecimationState::drain_apply_stack() {
    while (!apply_stack_.empty()) {
        Forcing f = apply_stack_.back();
        apply_stack_.pop_back();
        std::size_t v = static_cast<std::size_t>(f.var);
        if (assigned(f.var)) {
            if (value_[v] != f.value) log_conflict(f.var, origin_[v], f.origin);
            continue;
        }
        value_[v] = static_cast<std::int8_t>(f.value);
        origin_[v] = f.origin;
        if (f.origin == kOriginConflict) ++conflict_assignments_;

        if (int slot = pool_slot_[v]; slot != 0) {  // stale pool entry for this var
            Forcing& pending = pool_[static_cast<std::size_t>(slot - 1)];
            if (pending.value != f.value) log_conflict(f.var, pending.origin, f.origin);
            pool_[static_cast<std::size_t>(slot - 1)] = pool_.back();
            pool_slot_[static_cast<std::size_t>(pool_.back().var)] = slot;
            pool_.pop_back();
            pool_slot_[v] = 0;
        }

        int pos = unassigned_pos_[v];
        unassigned_[static_cast<std::size_t>(pos)] = unassigned_.back();
        unassigned_pos_[static_cast<std::size_t>(unassigned_.back())] = pos;
        unassigned_.pop_back();
        unassigned_pos_[v] = -1;

        if (int slot = soft_slot_[v]; slot != 0) {
            std::uint64_t w = 0;  // point query: prefix(slot) - prefix(slot - 1)
            for (std::size_t j = static_cast<std::size_t>(slot); j != 0; j -= j & (~j + 1)) w += fenwick_[j];
            for (std::size_t j = static_cast<std::size_t>(slot - 1); j != 0; j -= j & (~j + 1)) w -= fenwick_[j];
            for (std::size_t j = static_cast<std::size_t>(slot); j < fenwick_.size(); j += j & (~j + 1))
                fenwick_[j] -= w;
            soft_total_ -= w;
            soft_slot_[v] = 0;
        }

        for (const Occurrence& o : inst_.occurrences[v]) {
            std::size_t c = static_cast<std::size_t>(o.constraint_id);
            std::int64_t coeff = o.delta < 0 ? -o.delta : o.delta;
            bool lit_true = (o.delta > 0) == (f.value == 1);
            residual_sum_[c] -= coeff;
            if (lit_true) residual_bound_[c] -= coeff;
        }
        for (const Occurrence& o : inst_.occurrences[v]) refresh_and_detect(o.constraint_id);
    }
}

void DecimationState::seed_detections() {
    for (std::size_t c = 0; c < inst_.hard.size(); ++c) refresh_and_detect(static_cast<int>(c));
    drain_apply_stack();
}

Forcing DecimationState::pop_random_forcing() {
    std::size_t idx = rng_.next_index(pool_.size());
    Forcing f = pool_[idx];
    pool_[idx] = pool_.back();
    pool_slot_[static_cast<std::size_t>(pool_.back().var)] = static_cast<int>(idx) + 1;
    pool_.pop_back();
    pool_slot_[static_cast<std::size_t>(f.var)] = 0;
    return f;
}

int DecimationState::pick_random_unassigned() {
    return unassigned_[rng_.next_index(unassigned_.size())];
}

std::optional<Forcing> DecimationState::pick_soft_unit() {
    if (soft_total_ == 0) return std::nullopt;
    std::uint64_t r = rng_.next_u64() % soft_total_;
    // Largest position with prefix sum <= r, then one past it.
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < fenwick_.size()) step *= 2;
    for (; step != 0; step /= 2) {
        std::size_t next = pos + step;
        if (next < fenwick_.size() && fenwick_[next] <= r) {
            pos = next;
            r -= fenwick_[next];
        }
    }
    const Term& t = inst_.objective.terms[pos];
    return Forcing{t.lit.var, t.lit.negated ? 1 : 0, kOriginSoft};
}

DecimationResult igup_decimation(const PBOInstance& inst, Rng& rng) {
    DecimationState st(inst, rng);
    st.seed_detections();
    while (st.unassigned_count() > 0) {
        if (!st.pool_empty()) {
            Forcing f = st.pop_random_forcing();
            st.propagate_literal(f.var, f.value, f.origin);
        } else if (std::optional<Forcing> soft = st.pick_soft_unit()) {
            st.propagate_literal(soft->var, soft->value, soft->origin);
        } else {
            int v = st.pick_random_unassigned();
            st.propagate_literal(v, rng.next_bit(), kOriginRandom);
        }
    }

    DecimationResult r;
    r.assignment = Assignment(inst.num_vars);
    r.origin.assign(static_cast<std::size_t>(inst.num_vars) + 1, kOriginNone);
    for (int v = 1; v <= inst.num_vars; ++v) {
        r.assignment.set(v, st.value(v));
        int origin = st.origin_of(v);
        r.origin[static_cast<std::size_t>(v)] = origin;
        if (origin >= 0) ++r.hard_forcings;
        else if (origin == kOriginSoft) ++r.soft_choices;
        else if (origin == kOriginRandom) ++r.random_choices;
    }
    r.conflict_assignments = st.conflict_assignments();
    r.contradictions = st.contradictions();
    r.falsified_residuals = st.falsified_residual_count();
    return r;
}

}  // namespace pbls
