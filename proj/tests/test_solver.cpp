#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "stopval/cli.hpp"
#include "stopval/solver.hpp"

using namespace stopval;

namespace {

StoppingProblem two_state_problem(std::vector<double> payoff, bool outside, double discount,
                                  int horizon, double prior,
                                  std::vector<std::vector<double>> info) {
    return StoppingProblem(Matrix::from_rows({payoff}), outside, discount,
                           Horizon::finite(horizon), Belief({prior, 1.0 - prior}),
                           InfoStructure(Matrix::from_rows(info)));
}

}  // namespace

TEST_CASE("stopping payoff") {
    const auto bare = two_state_problem({6, -8}, false, 0.9, 2, 0.5, {{0.7, 0.3}, {0.3, 0.7}});
    const auto sd = stopping_payoff(Belief({0.5, 0.5}), bare);
    CHECK(sd.value == doctest::Approx(-1.0));
    CHECK(sd.action == 0);

    const auto outside = two_state_problem({6, -8}, true, 0.9, 2, 0.5, {{0.7, 0.3}, {0.3, 0.7}});
    const auto sd2 = stopping_payoff(Belief({0.5, 0.5}), outside);
    CHECK(sd2.value == doctest::Approx(0.0));
    CHECK(sd2.action == kOutsideAction);

    const auto walk = two_state_problem({100, -100}, false, 0.9, 2, 0.57,
                                        {{0.6, 0.4}, {0.4, 0.6}});
    CHECK(stopping_payoff(Belief({0.57, 0.43}), walk).value == doctest::Approx(14.0));
}

TEST_CASE("terminal layer is the stopping payoff floored at zero") {
    const auto problem =
        two_state_problem({6, -8}, true, 0.9, 2, 0.5, {{0.7, 0.3}, {0.3, 0.7}});
    const PwlcValue v = terminal_value(problem);
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        const Belief mu({x, 1.0 - x});
        CHECK(value_at(v, mu) ==
              doctest::Approx(std::max(6 * x - 8 * (1 - x), 0.0)).epsilon(1e-12));
    }
}

TEST_CASE("uninformative signals without discounting leave the value unchanged") {
    const auto problem =
        two_state_problem({6, -8}, true, 1.0, 2, 0.5, {{0.5, 0.5}, {0.5, 0.5}});
    const PwlcValue terminal = terminal_value(problem);
    const PwlcValue backed = backup(terminal, problem, 0.0);
    for (int i = 0; i <= 200; ++i) {
        const double x = i / 200.0;
        const Belief mu({x, 1.0 - x});
        CHECK(value_at(backed, mu) == doctest::Approx(value_at(terminal, mu)).epsilon(1e-12));
    }
}

TEST_CASE("three-period benchmark threshold sits above the myopic break-even") {
    const auto problem = cli::example_config("example2").to_problem();
    const FiniteSolution sol = solve_finite(problem, 0.0);
    REQUIRE(sol.layers[0].policy.has_threshold);
    CHECK(sol.layers[0].policy.threshold > 8.0 / 14.0 + 1e-4);
    CHECK(sol.layers[2].policy.threshold == doctest::Approx(8.0 / 14.0).epsilon(1e-5));

    // The tree solver agrees at the prior when fees vanish.
    const double oracle = test::best_strategy_value(problem, 0.0);
    CHECK(value_at(sol.value(0), problem.prior) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("five-period threshold table") {
    const auto prob_s = cli::example_config("example5").to_problem();
    const auto prob_t = cli::example_config("example5_t").to_problem();
    const FiniteSolution sol_s = solve_finite(prob_s, 0.0);
    const FiniteSolution sol_t = solve_finite(prob_t, 0.0);
    const double want_s[6] = {0.7376, 0.7335, 0.7335, 0.7201, 0.7055, 0.5714};
    const double want_t[6] = {0.7312, 0.7263, 0.7225, 0.7142, 0.6697, 0.5714};
    for (int n = 0; n <= 5; ++n) {
        CHECK(sol_s.layers[n].policy.threshold == doctest::Approx(want_s[n]).epsilon(8e-4));
        CHECK(sol_t.layers[n].policy.threshold == doctest::Approx(want_t[n]).epsilon(8e-4));
    }
}

TEST_CASE("zero-horizon problems stop everywhere") {
    const auto problem =
        two_state_problem({6, -8}, true, 0.9, 0, 0.5, {{0.7, 0.3}, {0.3, 0.7}});
    const FiniteSolution sol = solve_finite(problem, 0.0);
    REQUIRE(sol.layers.size() == 1);
    CHECK(value_at(sol.value(0), Belief({0.8, 0.2})) == doctest::Approx(3.2));
    CHECK(decide(sol.value(0), problem, Belief({0.8, 0.2}), true).kind == Decision::stop);
    CHECK(sol.layers[0].policy.threshold == doctest::Approx(8.0 / 14.0).epsilon(1e-5));
}

TEST_CASE("threshold orientation follows the favored state") {
    // Mirrored payoffs: investing pays when state 1 is likely.
    const auto mirrored =
        two_state_problem({-8, 6}, true, 0.85, 3, 0.5, {{0.5, 0.5}, {0.2, 0.8}});
    const FiniteSolution sol = solve_finite(mirrored, 0.0);
    for (const auto& layer : sol.layers) {
        REQUIRE(layer.policy.has_threshold);
        CHECK_FALSE(layer.policy.stop_above);
    }
    // The terminal break-even mirrors 8/14 on the state-0 axis.
    CHECK(sol.layers.back().policy.threshold == doctest::Approx(6.0 / 14.0).epsilon(1e-5));
}

TEST_CASE("grid convexity of every layer") {
    SplitRng rng(211);
    for (int trial = 0; trial < 30; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.states = trial % 3 == 0 ? 3 : 2;  // exercise the general backup too
        opt.signals = 2 + sub.next_u64() % 2;
        opt.horizon = 1 + int(sub.next_u64() % 3);
        opt.outside_option = sub.next_double() < 0.5;
        const StoppingProblem problem = test::random_problem(sub, opt);
        const FiniteSolution sol = solve_finite(problem, 0.0);
        for (const auto& layer : sol.layers) {
            for (int pair = 0; pair < 20; ++pair) {
                const Belief a = test::random_belief(sub, opt.states);
                const Belief b = test::random_belief(sub, opt.states);
                const double va = value_at(layer.value, a);
                const double vb = value_at(layer.value, b);
                for (int li = 1; li <= 9; ++li) {
                    const double lam = li / 10.0;
                    std::vector<double> mix(opt.states);
                    for (std::size_t t = 0; t < opt.states; ++t)
                        mix[t] = lam * a[t] + (1 - lam) * b[t];
                    CHECK(value_at(layer.value, Belief(mix)) <=
                          lam * va + (1 - lam) * vb + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("longer remaining horizon weakly helps under a constant fee") {
    SplitRng rng(223);
    for (int trial = 0; trial < 30; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.horizon = 2 + int(sub.next_u64() % 3);
        opt.outside_option = true;  // keeps the stopping payoff non-negative
        const StoppingProblem problem = test::random_problem(sub, opt);
        const double fee = sub.next_uniform(0.0, 0.5);
        const FiniteSolution sol = solve_finite(problem, fee);
        const auto grid = two_state_grid(201);
        for (std::size_t n = 0; n + 1 < sol.layers.size(); ++n) {
            for (const auto& mu : grid) {
                const double early = value_at(sol.value(int(n)), mu);
                const double late = value_at(sol.value(int(n) + 1), mu);
                CHECK(early >= late - 1e-9);
                // Stop sets nest: stopping now implies stopping later.
                const double pi = stopping_payoff(mu, problem).value;
                if (early - pi <= 1e-9) CHECK(late - pi <= 1e-9);
            }
        }
    }
}

TEST_CASE("better information lifts the value and shrinks the stop set") {
    SplitRng rng(227);
    for (int trial = 0; trial < 30; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.signals = 2 + sub.next_u64() % 2;
        opt.horizon = 1 + int(sub.next_u64() % 3);
        const StoppingProblem sharp = test::random_problem(sub, opt);
        const std::size_t kt = 2 + sub.next_u64() % 2;
        const StoppingProblem coarse = sharp.with_info(
            garble(sharp.info, test::random_stochastic(sub, opt.signals, kt)));
        const FiniteSolution sol_s = solve_finite(sharp, 0.0);
        const FiniteSolution sol_t = solve_finite(coarse, 0.0);
        const auto grid = two_state_grid(101);
        for (std::size_t n = 0; n < sol_s.layers.size(); ++n) {
            for (const auto& mu : grid) {
                const double vs = value_at(sol_s.value(int(n)), mu);
                const double vt = value_at(sol_t.value(int(n)), mu);
                CHECK(vs >= vt - 1e-9);
                const double pi = stopping_payoff(mu, sharp).value;
                if (vs - pi <= 1e-9) CHECK(vt - pi <= 1e-9);
            }
        }
    }
}

TEST_CASE("patience lifts the value and shrinks the stop set") {
    SplitRng rng(229);
    for (int trial = 0; trial < 30; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.horizon = 2 + int(sub.next_u64() % 3);
        const StoppingProblem patient = test::random_problem(sub, opt).with_discount(0.95);
        const StoppingProblem hasty = patient.with_discount(0.8);
        const FiniteSolution sol_p = solve_finite(patient, 0.0);
        const FiniteSolution sol_h = solve_finite(hasty, 0.0);
        const auto grid = two_state_grid(101);
        for (std::size_t n = 0; n < sol_p.layers.size(); ++n) {
            for (const auto& mu : grid) {
                const double vp = value_at(sol_p.value(int(n)), mu);
                const double vh = value_at(sol_h.value(int(n)), mu);
                CHECK(vp >= vh - 1e-9);
                const double pi = stopping_payoff(mu, patient).value;
                if (vp - pi <= 1e-9) CHECK(vh - pi <= 1e-9);
            }
        }
    }
}

TEST_CASE("exact recursion matches strategy enumeration") {
    SplitRng rng(233);
    for (int trial = 0; trial < 25; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.signals = 2 + sub.next_u64() % 2;
        opt.horizon = opt.signals == 2 ? 1 + int(sub.next_u64() % 4)
                                       : 1 + int(sub.next_u64() % 3);
        opt.outside_option = sub.next_double() < 0.5;
        const StoppingProblem problem = test::random_problem(sub, opt);
        const double fee = sub.next_double() < 0.5 ? 0.0 : sub.next_uniform(0.0, 0.3);
        const FiniteSolution sol = solve_finite(problem, fee);
        const double oracle = test::best_strategy_value(problem, fee);
        CHECK(value_at(sol.value(0), problem.prior) == doctest::Approx(oracle).epsilon(1e-11));
    }
}

TEST_CASE("value iteration contracts and approaches the finite-horizon limit") {
    SplitRng rng(239);
    for (int trial = 0; trial < 10; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.infinite = true;
        opt.discount_lo = 0.6;
        opt.discount_hi = 0.8;
        const StoppingProblem problem = test::random_problem(sub, opt);
        const double scale = problem.max_abs_payoff();
        const double tol = 0.5 * std::pow(problem.discount, 30) * scale;
        const InfiniteSolution inf = solve_infinite(problem, tol, 100000, 0.0);
        for (std::size_t t = 1; t < inf.sweep_deltas.size(); ++t)
            CHECK(inf.sweep_deltas[t] <= problem.discount * inf.sweep_deltas[t - 1] + 1e-12);

        const FiniteSolution fin = solve_finite(problem.with_horizon(Horizon::finite(30)), 0.0);
        const double bound = std::pow(problem.discount, 30) * scale / (1.0 - problem.discount);
        CHECK(sup_diff_two_state(inf.value, fin.value(0)) <= bound);
    }
}

TEST_CASE("fully uninformative signals make waiting worthless") {
    const StoppingProblem problem(Matrix::from_rows({{6.0, -8.0}}), true, 0.9,
                                  Horizon::infinite(), Belief({0.5, 0.5}),
                                  InfoStructure(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})));
    const InfiniteSolution inf = solve_infinite(problem, 1e-9);
    for (int i = 0; i <= 200; ++i) {
        const double x = i / 200.0;
        const Belief mu({x, 1.0 - x});
        CHECK(value_at(inf.value, mu) ==
              doctest::Approx(std::max(6 * x - 8 * (1 - x), 0.0)).epsilon(1e-8));
        CHECK(decide(inf.value, problem, mu, false).kind == Decision::stop);
    }
}

TEST_CASE("sweep cap raises a convergence error") {
    const auto problem = cli::example_config("example4").to_problem();
    CHECK_THROWS_AS(solve_infinite(problem, 1e-8, 3), NonConvergence);
}

TEST_CASE("infinite horizon rejects an undiscounted problem") {
    CHECK_THROWS_AS(StoppingProblem(Matrix::from_rows({{1.0, -1.0}}), false, 1.0,
                                    Horizon::infinite(), Belief({0.5, 0.5}),
                                    InfoStructure(Matrix::from_rows({{0.7, 0.3}, {0.3, 0.7}}))),
                    std::invalid_argument);
}
