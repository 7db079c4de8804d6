#include <map>
#include <set>

#include "doctest.h"
#include "pbls/generator.hpp"
#include "pbls/solver.hpp"
#include "pbls/verifier.hpp"
#include "test_util.hpp"

using namespace pbls;
using namespace pbls::test;

namespace {

std::int64_t scratch_constraint_sum(const PBOInstance& inst, const SolverState& st, int cid,
                                    const Assignment& a) {
    if (cid == st.objective_index()) {
        std::int64_t true_obj = 0;
        for (const Term& t : inst.objective.terms)
            if (a.is_true(t.lit)) true_obj += t.coeff;
        return static_cast<std::int64_t>(inst.objective.coeff_sum()) - true_obj;
    }
    std::int64_t s = 0;
    for (const Term& t : inst.hard[static_cast<std::size_t>(cid)].terms)
        if (a.is_true(t.lit)) s += t.coeff;
    return s;
}

std::int64_t scratch_score(const PBOInstance& inst, const SolverState& st, int v) {
    Assignment flipped = st.assignment();
    flipped.flip(v);
    std::int64_t total = 0;
    for (int c = 0; c < st.num_constraints(); ++c) {
        std::int64_t bound = st.constraint_bound(c);
        int before = scratch_constraint_sum(inst, st, c, st.assignment()) >= bound ? 1 : 0;
        int after = scratch_constraint_sum(inst, st, c, flipped) >= bound ? 1 : 0;
        total += st.constraint_weight(c) * (after - before);
    }
    return total;
}

void check_state_against_scratch(const PBOInstance& inst, const SolverState& st) {
    std::set<int> expected_falsified;
    for (int c = 0; c < st.num_constraints(); ++c) {
        std::int64_t s = scratch_constraint_sum(inst, st, c, st.assignment());
        CHECK(st.constraint_sum(c) == s);
        if (c != st.objective_index() && s < st.constraint_bound(c)) expected_falsified.insert(c);
    }
    std::vector<int> actual = st.falsified_hard();
    CHECK(std::set<int>(actual.begin(), actual.end()) == expected_falsified);
    CHECK(actual.size() == expected_falsified.size());
    for (int v = 1; v <= inst.num_vars; ++v) CHECK(st.score(v) == scratch_score(inst, st, v));
}

}  // namespace

TEST_CASE("score measures the weighted satisfaction delta of a flip") {
    SolveParams params;
    Rng rng(1);

    PBOInstance make = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 1)});
    SolverState st1(make, params, rng, bits({0, 0}));
    CHECK(st1.score(1) == 1);

    PBOInstance brk = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 1)});
    SolverState st2(brk, params, rng, bits({1, 0}));
    st2.update_weights();  // nothing falsified: no-op, weight stays 1
    CHECK(st2.constraint_weight(0) == 1);
    CHECK(st2.score(1) == -1);

    // same shape at weight 3: two weight updates while the constraint is down
    SolverState st3(brk, params, rng, bits({0, 0}));
    st3.update_weights();
    st3.update_weights();
    CHECK(st3.constraint_weight(0) == 3);
    st3.flip(1);  // alpha = (1,0): satisfied, flipping x1 back would break it
    CHECK(st3.score(1) == -3);
    CHECK(st3.score(1) == scratch_score(brk, st3, 1));
}

TEST_CASE("score adds up across constraints with distinct weights") {
    PBOInstance inst = instance_of({hard_ge({{5, {1, false}}, {1, {2, false}}}, 6),
                                    hard_ge({{1, {1, false}}, {1, {3, false}}}, 1)});
    SolveParams params;
    Rng rng(1);
    SolverState st(inst, params, rng, bits({0, 1, 1}));
    // only the first constraint is falsified here, so one update gives it
    // weight 2 while the second stays at 1
    st.update_weights();
    CHECK(st.constraint_weight(0) == 2);
    CHECK(st.constraint_weight(1) == 1);
    st.flip(3);  // alpha = (0,1,0): both constraints falsified
    CHECK(st.score(1) == 3);
    CHECK(st.score(1) == scratch_score(inst, st, 1));
    check_state_against_scratch(inst, st);
}

TEST_CASE("pick_scoring_var draws uniformly among top scorers") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 1),
                                    hard_ge({{1, {1, false}}, {1, {2, false}}}, 1),
                                    hard_ge({{1, {3, false}}}, 1)});
    SolveParams params;
    Rng rng(7);
    SolverState st(inst, params, rng, bits({0, 0, 1}));
    CHECK(st.score(1) == 2);
    CHECK(st.score(2) == 2);
    CHECK(st.score(3) == -1);

    std::map<int, int> counts;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
        std::optional<int> v = st.pick_scoring_var();
        REQUIRE(v.has_value());
        ++counts[*v];
    }
    CHECK(counts.size() == 2);
    CHECK(counts[1] + counts[2] == trials);
    CHECK(counts[1] > 800);
    CHECK(counts[2] > 800);
}

TEST_CASE("pick_scoring_var sees local optima and single candidates") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}}, 1), hard_ge({{1, {2, false}}}, 1)});
    SolveParams params;
    Rng rng(1);

    SolverState stuck(inst, params, rng, bits({1, 1}));
    CHECK(!stuck.pick_scoring_var().has_value());

    SolverState one(inst, params, rng, bits({0, 1}));
    CHECK(one.pick_scoring_var() == 1);
}

TEST_CASE("best-of-k sampling still returns only positive-score variables") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 1),
                                    hard_ge({{1, {1, false}}, {1, {2, false}}}, 1),
                                    hard_ge({{1, {3, false}}}, 1)});
    SolveParams params;
    params.bms = 1;
    Rng rng(5);
    SolverState st(inst, params, rng, bits({0, 0, 1}));
    std::set<int> seen;
    for (int i = 0; i < 200; ++i) {
        std::optional<int> v = st.pick_scoring_var();
        REQUIRE(v.has_value());
        CHECK(st.score(*v) > 0);
        seen.insert(*v);
    }
    CHECK(seen == std::set<int>{1, 2});
}

TEST_CASE("weight updates bump falsified hard constraints and refresh scores") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}}, 1), hard_ge({{1, {2, false}}}, 1)});
    SolveParams params;
    Rng rng(1);
    SolverState st(inst, params, rng, bits({0, 0}));
    CHECK(st.constraint_weight(0) == 1);
    CHECK(st.constraint_weight(1) == 1);
    st.update_weights();
    CHECK(st.constraint_weight(0) == 2);
    CHECK(st.constraint_weight(1) == 2);
    CHECK(st.score(1) == 2);
    check_state_against_scratch(inst, st);
}

TEST_CASE("the objective weight grows only without hard pressure, up to the cap") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}}, 1)}, {{1, {2, false}}});
    SolveParams params;
    params.gamma = 3;
    Rng rng(1);
    SolverState st(inst, params, rng, bits({1, 1}));
    int obj = st.objective_index();
    REQUIRE(obj >= 0);
    // objective starts active at bound 1 and is falsified while x2 = 1
    CHECK(st.constraint_falsified(obj));

    st.update_weights();
    CHECK(st.constraint_weight(obj) == 2);
    for (int i = 0; i < 10; ++i) st.update_weights();
    CHECK(st.constraint_weight(obj) == 3);
    check_state_against_scratch(inst, st);

    // with a falsified hard constraint, the objective weight is frozen
    st.flip(1);
    CHECK(!st.hard_feasible());
    st.update_weights();
    CHECK(st.constraint_weight(0) == 2);
    CHECK(st.constraint_weight(obj) == 3);
}

TEST_CASE("care counts falsified constraints per local optimum") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}}, 1), hard_ge({{1, {2, false}}}, 1)});
    SolveParams params;
    Rng rng(1);
    SolverState st(inst, params, rng, bits({0, 1}));
    CHECK(st.care(0) == 0);
    CHECK(st.care(1) == 0);
    st.update_care();
    st.update_care();
    st.update_care();
    CHECK(st.care(0) == 3);
    CHECK(st.care(1) == 0);
}

TEST_CASE("stuck-constraint selection follows the p branch, care branch, and fallback") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}}, 1), hard_ge({{1, {2, false}}}, 1)},
                                   {{1, {3, false}}});

    SUBCASE("p = 1 is uniform over the falsified set") {
        SolveParams params;
        params.p = 1.0;
        Rng rng(11);
        SolverState st(inst, params, rng, bits({0, 0, 0}));
        std::map<int, int> counts;
        const int trials = 4000;
        for (int i = 0; i < trials; ++i) ++counts[st.select_stuck_constraint()];
        CHECK(counts[0] + counts[1] == trials);
        CHECK(counts[0] > 1700);
        CHECK(counts[1] > 1700);
    }

    SUBCASE("p = 0 takes the care argmax") {
        SolveParams params;
        params.p = 0.0;
        Rng rng(11);
        SolverState st(inst, params, rng, bits({0, 1, 0}));
        for (int i = 0; i < 5; ++i) st.update_care();  // care(0) = 5
        st.flip(1);
        st.flip(2);  // alpha = (1,0,..): only c1 falsified
        for (int i = 0; i < 9; ++i) st.update_care();  // care(1) = 9
        CHECK(st.care(0) == 5);
        CHECK(st.care(1) == 9);
        st.flip(1);  // alpha = (0,0,..): both falsified
        for (int i = 0; i < 50; ++i) CHECK(st.select_stuck_constraint() == 1);
    }

    SUBCASE("care ties break uniformly") {
        SolveParams params;
        params.p = 0.0;
        Rng rng(11);
        SolverState st(inst, params, rng, bits({0, 0, 0}));
        std::map<int, int> counts;
        for (int i = 0; i < 2000; ++i) ++counts[st.select_stuck_constraint()];
        CHECK(counts[0] > 800);
        CHECK(counts[1] > 800);
    }

    SUBCASE("without falsified hard constraints the objective is selected") {
        SolveParams params;
        Rng rng(11);
        SolverState st(inst, params, rng, bits({1, 1, 1}));
        CHECK(st.hard_feasible());
        CHECK(st.select_stuck_constraint() == st.objective_index());
    }
}

TEST_CASE("ties inside a selected constraint break uniformly") {
    PBOInstance inst = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 2)});
    SolveParams params;
    Rng rng(13);
    SolverState st(inst, params, rng, bits({0, 0}));
    CHECK(st.score(1) == 0);
    CHECK(st.score(2) == 0);
    std::map<int, int> counts;
    for (int i = 0; i < 2000; ++i) ++counts[st.pick_var_in_constraint(0)];
    CHECK(counts[1] > 800);
    CHECK(counts[2] > 800);
}

TEST_CASE("flip maintains sums, the falsified set, and records improvements") {
    SolveParams params;
    Rng rng(1);

    PBOInstance unit = instance_of({hard_ge({{1, {1, false}}}, 1)});
    SolverState st(unit, params, rng, bits({0}));
    CHECK(!st.hard_feasible());
    st.flip(1);
    CHECK(st.assignment().value(1) == 1);
    CHECK(st.hard_feasible());
    CHECK(st.has_best());
    CHECK(st.best_assignment() == bits({1}));

    PBOInstance ex1 = instance_of(
        {hard_ge({{5, {1, false}}, {1, {2, false}}, {1, {3, false}}, {1, {4, false}}}, 6)});
    SolverState st2(ex1, params, rng, bits({1, 1, 0, 0}));
    CHECK(st2.constraint_sum(0) == 6);
    CHECK(st2.hard_feasible());
    st2.flip(1);
    CHECK(st2.constraint_sum(0) == 1);
    CHECK(st2.falsified_hard() == std::vector<int>{0});
    check_state_against_scratch(ex1, st2);
}

TEST_CASE("recording an improvement tightens the objective bound") {
    PBOInstance inst = instance_of({}, {{1, {1, false}},
                                        {1, {2, false}},
                                        {1, {3, false}},
                                        {1, {4, false}},
                                        {1, {5, false}},
                                        {1, {6, false}},
                                        {1, {7, false}}});
    SolveParams params;
    Rng rng(1);
    SolverState st(inst, params, rng, bits({1, 1, 1, 1, 1, 1, 1}));
    int obj = st.objective_index();
    CHECK(st.constraint_bound(obj) == 1);  // value <= 6 from the start

    REQUIRE(st.record_if_improved());
    CHECK(st.best_cost() == 7);

    st.flip(1);
    st.flip(2);
    st.flip(3);
    CHECK(st.best_cost() == 4);
    CHECK(st.constraint_bound(obj) == 4);  // enforces value <= 3
    CHECK(verify(inst, st.best_assignment()).objective == 4);
    check_state_against_scratch(inst, st);
}

TEST_CASE("solve finds forced optima and honors the flip budget") {
    SolveParams params;
    params.cutoff_seconds = 5.0;
    params.max_flips = 200000;

    SUBCASE("unique feasible point") {
        PBOInstance inst = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 2)},
                                       {{1, {1, false}}, {1, {2, false}}});
        SolveResult r = solve(inst, params);
        REQUIRE(r.status == SolveStatus::Feasible);
        CHECK(r.best == bits({1, 1}));
        CHECK(r.best_cost == 2);
        CHECK(r.stats.time_to_first_feasible >= 0.0);
        CHECK(verify(inst, r.best).feasible);
    }

    SUBCASE("known one-constraint optimum") {
        PBOInstance inst = instance_of(
            {hard_ge({{5, {1, false}}, {1, {2, false}}, {1, {3, false}}, {1, {4, false}}}, 6)},
            {{1, {2, false}}, {1, {3, false}}, {1, {4, false}}});
        BruteForceResult oracle = brute_force_optimum(inst);
        REQUIRE(oracle.feasible);
        CHECK(oracle.optimum == 1);
        SolveResult r = solve(inst, params);
        REQUIRE(r.status == SolveStatus::Feasible);
        CHECK(r.best_cost == 1);
        CHECK(verify(inst, r.best).objective == 1);
    }

    SUBCASE("infeasible instance stays unknown") {
        PBOInstance inst =
            instance_of({hard_ge({{1, {1, false}}}, 1), hard_ge({{1, {1, true}}}, 1)});
        SolveParams bounded = params;
        bounded.max_flips = 20000;
        SolveResult r = solve(inst, bounded);
        CHECK(r.status == SolveStatus::Unknown);
        CHECK(r.stats.flips == 20000);
    }

    SUBCASE("decision instances stop at the first feasible assignment") {
        PBOInstance inst = instance_of({hard_ge({{1, {1, false}}, {1, {2, false}}}, 1)});
        SolveResult r = solve(inst, params);
        REQUIRE(r.status == SolveStatus::Feasible);
        CHECK(verify(inst, r.best).feasible);
        CHECK(r.stats.flips < 1000);
    }
}

TEST_CASE("incremental caches match full recomputation along a random walk") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        GenConfig cfg;
        cfg.num_vars = 50;
        cfg.num_constraints = 80;
        cfg.max_terms = 6;
        cfg.objective_density = 0.5;
        cfg.seed = seed;
        PBOInstance inst = generate_random_instance(cfg);

        SolveParams params;
        Rng rng(seed);
        Assignment init(inst.num_vars);
        for (int v = 1; v <= inst.num_vars; ++v) init.set(v, static_cast<int>(rng.next_bit()));
        SolverState st(inst, params, rng, init);
        check_state_against_scratch(inst, st);

        for (int step = 1; step <= 10000; ++step) {
            st.flip(rng.next_in_range(1, inst.num_vars));
            if (step % 23 == 0) st.update_weights();
            if (step % 512 == 0) check_state_against_scratch(inst, st);
        }
        check_state_against_scratch(inst, st);
    }
}

TEST_CASE("reported objective values strictly decrease") {
    GenConfig cfg;
    cfg.num_vars = 30;
    cfg.num_constraints = 25;
    cfg.objective_density = 0.8;
    cfg.seed = 99;
    PBOInstance inst = generate_random_instance(cfg);

    SolveParams params;
    params.cutoff_seconds = 3.0;
    params.max_flips = 150000;
    std::vector<std::int64_t> reported;
    SolveResult r = solve(inst, params, [&](std::int64_t cost, double) { reported.push_back(cost); });
    for (std::size_t i = 1; i < reported.size(); ++i) CHECK(reported[i] < reported[i - 1]);
    if (r.status == SolveStatus::Feasible) {
        REQUIRE(!reported.empty());
        CHECK(reported.back() == r.best_cost);
        VerificationReport rep = verify(inst, r.best);
        CHECK(rep.feasible);
        CHECK(rep.objective == r.best_cost);
    }
}

TEST_CASE("solver output is always verifier-feasible and never beats the oracle") {
    int feasible_count = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenConfig cfg;
        cfg.num_vars = 12;
        cfg.num_constraints = 8;
        cfg.objective_density = 0.6;
        cfg.seed = seed + 400;
        PBOInstance inst = planted_feasible_instance(cfg);

        SolveParams params;
        params.seed = seed;
        params.cutoff_seconds = 5.0;
        params.max_flips = 60000;
        SolveResult r = solve(inst, params);
        BruteForceResult oracle = brute_force_optimum(inst);
        if (r.status == SolveStatus::Feasible) {
            ++feasible_count;
            REQUIRE(oracle.feasible);
            VerificationReport rep = verify(inst, r.best);
            CHECK(rep.feasible);
            CHECK(rep.objective == r.best_cost);
            CHECK(r.best_cost >= oracle.optimum);
        }
    }
    CHECK(feasible_count >= 8);
}

TEST_CASE("identical seeds give identical runs, decimation feeds the start point") {
    GenConfig cfg;
    cfg.num_vars = 25;
    cfg.num_constraints = 30;
    cfg.objective_density = 0.5;
    cfg.seed = 321;
    PBOInstance inst = generate_random_instance(cfg);

    SolveParams params;
    params.seed = 42;
    params.cutoff_seconds = 60.0;
    params.max_flips = 30000;
    SolveResult a = solve(inst, params);
    SolveResult b = solve(inst, params);
    CHECK(a.initial == b.initial);
    CHECK(a.stats.flips == b.stats.flips);
    CHECK(a.stats.local_optima == b.stats.local_optima);
    CHECK(a.status == b.status);
    if (a.status == SolveStatus::Feasible) {
        CHECK(a.best == b.best);
        CHECK(a.best_cost == b.best_cost);
    }

    SolveParams zeros = params;
    zeros.use_decimation = false;
    SolveResult c = solve(inst, zeros);
    CHECK(c.initial == Assignment(inst.num_vars));
    CHECK(c.stats.decimation_hard_forcings == 0);
}
