#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "stopval/cli.hpp"
#include "stopval/fee_design.hpp"

using namespace stopval;

namespace {

const StoppingProblem& benchmark() {
    static const StoppingProblem problem = cli::example_config("example2").to_problem();
    return problem;
}

}  // namespace

TEST_CASE("fee scheme lookups") {
    const auto upfront = FeeScheme::upfront(2.0);
    CHECK(upfront.raw_fee({}) == doctest::Approx(2.0));
    CHECK(upfront.raw_fee({{0}}) == doctest::Approx(0.0));

    const auto flat = FeeScheme::flat(0.3);
    CHECK(flat.raw_fee({}) == doctest::Approx(0.0));
    CHECK(flat.raw_fee({{1}, {0}}) == doctest::Approx(0.3));

    const auto sched = FeeScheme::schedule({0.5, 0.1, 0.2});
    CHECK(sched.raw_fee({}) == doctest::Approx(0.5));
    CHECK(sched.raw_fee({{0}}) == doctest::Approx(0.1));
    CHECK(sched.raw_fee({{0}, {1}, {0}}) == doctest::Approx(0.0));

    const auto lump = FeeScheme::delayed_lump(2, 4.0);
    CHECK(lump.raw_fee({{0}}) == doctest::Approx(0.0));
    CHECK(lump.raw_fee({{0}, {1}}) == doctest::Approx(4.0));

    const auto tree = FeeScheme::explicit_tree({{{{0}}, 0.7}, {{{0}, {1}}, 0.2}});
    CHECK(tree.raw_fee({{0}}) == doctest::Approx(0.7));
    CHECK(tree.raw_fee({{0}, {1}}) == doctest::Approx(0.2));
    CHECK(tree.raw_fee({{1}}) == doctest::Approx(0.0));

    CHECK_THROWS_AS(FeeScheme::flat(-0.1), std::invalid_argument);
}

TEST_CASE("history tree agrees with the exact recursion at zero fees") {
    const HistoryTree tree = solve_history_tree(benchmark(), FeeScheme::zero());
    const FiniteSolution sol = solve_finite(benchmark(), 0.0);
    CHECK(tree.root_value() ==
          doctest::Approx(value_at(sol.value(0), benchmark().prior)).epsilon(1e-12));
}

TEST_CASE("prohibitive fees stop the process immediately") {
    const HistoryTree tree = solve_history_tree(benchmark(), FeeScheme::flat(1e6));
    CHECK(tree.root().decision == Decision::stop);
    const double pi0 = stopping_payoff(benchmark().prior, benchmark()).value;
    CHECK(tree.root_value() == doctest::Approx(std::max(pi0, 0.0)));
}

TEST_CASE("an upfront fee above the information value is declined") {
    const double phi = value_of_information(benchmark());
    const HistoryTree tree = solve_history_tree(benchmark(), FeeScheme::upfront(phi + 0.01));
    CHECK(tree.root().decision == Decision::stop);
    const FeeEvaluation eval = evaluate_fee(benchmark(), FeeScheme::upfront(phi + 0.01));
    CHECK_FALSE(eval.accepted);
    CHECK(eval.expected_total_fee == doctest::Approx(0.0));
}

TEST_CASE("small upfront fees shift the value one for one") {
    const double phi = value_of_information(benchmark());
    REQUIRE(phi > 0.0);
    const double charge = 0.5 * phi;
    const FeeEvaluation eval = evaluate_fee(benchmark(), FeeScheme::upfront(charge));
    CHECK(eval.accepted);
    CHECK(eval.expected_total_fee == doctest::Approx(charge).epsilon(1e-12));
    const double v0 = value_at(solve_finite(benchmark(), 0.0).value(0), benchmark().prior);
    CHECK(eval.dm_value == doctest::Approx(v0 - charge).epsilon(1e-12));
}

TEST_CASE("zero fees evaluate to the gross value") {
    const FeeEvaluation eval = evaluate_fee(benchmark(), FeeScheme::zero());
    CHECK(eval.expected_total_fee == doctest::Approx(0.0));
    CHECK(eval.dm_value == doctest::Approx(eval.gross_value));
}

TEST_CASE("small flat fees never extract more than the upfront value") {
    const double phi = value_of_information(benchmark());
    for (double c : {0.01, 0.05, 0.2}) {
        const FeeEvaluation eval = evaluate_fee(benchmark(), FeeScheme::flat(c));
        if (!eval.accepted) continue;
        CHECK(eval.expected_total_fee < phi + 1e-9);
    }
}

TEST_CASE("value decomposition holds for sampled schemes") {
    SplitRng rng(311);
    const double phi = value_of_information(benchmark());
    const auto sampler = uniform_tree_sampler(benchmark(), 2.0 * phi);
    for (int trial = 0; trial < 200; ++trial) {
        SplitRng sub = rng.substream(trial);
        const FeeScheme scheme = sampler(sub);
        const FeeEvaluation eval = evaluate_fee(benchmark(), scheme);
        CHECK(std::abs(eval.dm_value - (eval.gross_value - eval.expected_total_fee)) <= 1e-9);
        if (eval.accepted) CHECK(eval.expected_total_fee <= phi + 1e-9);
    }
}

TEST_CASE("upfront fees below the value do not distort the policy") {
    const double phi = value_of_information(benchmark());
    const HistoryTree base = solve_history_tree(benchmark(), FeeScheme::zero());
    const HistoryTree charged =
        solve_history_tree(benchmark(), FeeScheme::upfront(0.9 * phi));
    REQUIRE(base.nodes.size() == charged.nodes.size());
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        CHECK(base.nodes[i].decision == charged.nodes[i].decision);
        CHECK(base.nodes[i].action == charged.nodes[i].action);
    }
}

TEST_CASE("supremum audit") {
    const double phi = value_of_information(benchmark());

    SUBCASE("no trials, no report") {
        const auto report = supremum_check(benchmark(), uniform_tree_sampler(benchmark(), phi), 0);
        CHECK(report.trials == 0);
        CHECK(report.accepted == 0);
    }
    SUBCASE("near-supremum witness") {
        const auto sampler = [&](SplitRng&) { return FeeScheme::upfront(phi - 1e-6); };
        const auto report = supremum_check(benchmark(), sampler, 1);
        CHECK(report.accepted == 1);
        CHECK(report.max_fee_found == doctest::Approx(phi - 1e-6).epsilon(1e-9));
        CHECK(report.gap == doctest::Approx(1e-6).epsilon(1e-3));
    }
    SUBCASE("random history-keyed schemes stay below the bound") {
        const auto report =
            supremum_check(benchmark(), uniform_tree_sampler(benchmark(), 2.0 * phi), 1000);
        CHECK(report.trials == 1000);
        CHECK(report.accepted > 0);
        CHECK(report.max_fee_found <= phi + 1e-9);
    }
}

TEST_CASE("timing transforms preserve the evaluation") {
    const double delta = benchmark().discount;
    SUBCASE("zero stays zero") {
        const FeeScheme z = timing_transform(FeeScheme::zero(), delta);
        CHECK(z.is_zero());
        CHECK(z.timing() == FeeScheme::Timing::immediate);
    }
    SUBCASE("round trip restores the fees") {
        const FeeScheme flat = FeeScheme::flat(0.25);
        const FeeScheme back = timing_transform(timing_transform(flat, delta), delta);
        CHECK(back.timing() == FeeScheme::Timing::next_period);
        CHECK(back.raw_fee({{0}}) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("evaluations match across conventions") {
        SplitRng rng(331);
        const auto sampler = uniform_tree_sampler(benchmark(), 0.8);
        for (int trial = 0; trial < 50; ++trial) {
            SplitRng sub = rng.substream(trial);
            const FeeScheme scheme = sampler(sub);
            const FeeScheme flipped = timing_transform(scheme, delta);
            const FeeEvaluation a = evaluate_fee(benchmark(), scheme);
            const FeeEvaluation b = evaluate_fee(benchmark(), flipped);
            CHECK(a.dm_value == doctest::Approx(b.dm_value).epsilon(1e-9));
            CHECK(a.expected_total_fee ==
                  doctest::Approx(b.expected_total_fee).epsilon(1e-9));
            CHECK(a.accepted == b.accepted);
        }
    }
    SUBCASE("upfront component is timing-invariant") {
        const FeeScheme up = timing_transform(FeeScheme::upfront(1.5), delta);
        CHECK(up.raw_fee({}) == doctest::Approx(1.5));
    }
}

TEST_CASE("delayed lump-sum design") {
    const auto equal = optimal_delayed_lump(1.0, 0.9, 0.9, 10);
    CHECK(equal.delay == 0);
    CHECK(equal.payment == doctest::Approx(1.0));
    CHECK(equal.ip_value == doctest::Approx(1.0));

    const auto delayed = optimal_delayed_lump(1.0, 0.8, 0.9, 2);
    CHECK(delayed.delay == 2);
    CHECK(delayed.payment == doctest::Approx(1.5625));
    CHECK(delayed.ip_value == doctest::Approx(1.265625));

    const auto worthless = optimal_delayed_lump(0.0, 0.8, 0.9, 5);
    CHECK(worthless.payment == doctest::Approx(0.0));
    CHECK(worthless.ip_value == doctest::Approx(0.0));

    double prev = 1.0;  // K_bar = 0 reduces to the plain lump sum
    CHECK(optimal_delayed_lump(1.0, 0.8, 0.9, 0).ip_value == doctest::Approx(prev));
    for (int k = 1; k <= 8; ++k) {
        const double value = optimal_delayed_lump(1.0, 0.8, 0.9, k).ip_value;
        CHECK(value > prev);
        prev = value;
    }

    CHECK_THROWS_AS(optimal_delayed_lump(1.0, 1.2, 0.9, 3), InvalidDiscount);
}

TEST_CASE("quota-constrained purchases") {
    SUBCASE("single-signal quota on a one-period problem reduces exactly") {
        const StoppingProblem short_problem =
            benchmark().with_horizon(Horizon::finite(1));
        const QuotaTree quota =
            solve_multi_signal(short_problem, 1, 1, FeeScheme::zero());
        const HistoryTree tree = solve_history_tree(short_problem, FeeScheme::zero());
        CHECK(quota.root_value() == doctest::Approx(tree.root_value()).epsilon(1e-12));
    }
    SUBCASE("per-period cap one with a full quota reduces exactly") {
        const QuotaTree quota = solve_multi_signal(benchmark(), 1, 2, FeeScheme::zero());
        const HistoryTree tree = solve_history_tree(benchmark(), FeeScheme::zero());
        CHECK(quota.root_value() == doctest::Approx(tree.root_value()).epsilon(1e-12));
    }
    SUBCASE("front-loading is optimal for a time-invariant state") {
        const QuotaTree quota = solve_multi_signal(benchmark(), 2, 2, FeeScheme::zero());
        // Taking the whole batch at once is among the optimal root options.
        REQUIRE(quota.nodes.front().options.size() == 2);
        const double batch_now = quota.nodes.front().options[1].value;
        CHECK(quota.root_value() == doctest::Approx(batch_now).epsilon(1e-12));
        CHECK(batch_now + 1e-12 >= quota.nodes.front().options[0].value);
    }
    SUBCASE("no quota collapses to stopping now or waiting out") {
        const QuotaTree quota = solve_multi_signal(benchmark(), 1, 0, FeeScheme::zero());
        const double pi0 = stopping_payoff(benchmark().prior, benchmark()).value;
        CHECK(quota.root_value() == doctest::Approx(std::max(pi0, 0.0)));
        CHECK(quota.nodes.front().decision == Decision::stop);
    }
    SUBCASE("node budget is enforced") {
        CHECK_THROWS_AS(solve_multi_signal(benchmark(), 2, 2, FeeScheme::zero(), 5),
                        TreeTooLarge);
    }
}

TEST_CASE("batch purchases against direct enumeration") {
    // Two periods, quota two, cap two: enumerate all purchase plans by hand via
    // the strategy oracle on the equivalent single-shot problems.
    const StoppingProblem problem = benchmark();
    const QuotaTree quota = solve_multi_signal(problem, 2, 2, FeeScheme::zero());

    // Plan A: buy both signals now, then act at period 1 (quota exhausted, so
    // period-2 values collapse to max{pi, 0} discounted once more).
    const auto alpha_pairs = [&](const Belief& mu) {
        std::vector<std::pair<double, Belief>> out;
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2) {
                double marginal = 0.0;
                std::vector<double> post(2);
                for (std::size_t t = 0; t < 2; ++t) {
                    post[t] = mu[t] * problem.info.likelihood(t, s1) *
                              problem.info.likelihood(t, s2);
                    marginal += post[t];
                }
                for (double& p : post) p /= marginal;
                out.emplace_back(marginal, Belief(post));
            }
        return out;
    };
    double plan_batch = 0.0;
    for (const auto& [prob, post] : alpha_pairs(problem.prior)) {
        const double pi = stopping_payoff(post, problem).value;
        const double wait_out = problem.discount * std::max(pi, 0.0);
        plan_batch += prob * std::max(pi, wait_out);
    }
    plan_batch *= problem.discount;
    CHECK(quota.root_value() == doctest::Approx(plan_batch).epsilon(1e-12));
}
