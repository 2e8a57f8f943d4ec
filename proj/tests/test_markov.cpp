#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "stopval/cli.hpp"
#include "stopval/fee_design.hpp"
#include "stopval/markov.hpp"

using namespace stopval;

namespace {

StoppingProblem drifting_problem() { return cli::example_config("example1").to_problem(); }

}  // namespace

TEST_CASE("rejection value") {
    SUBCASE("identity transition never delays") {
        const auto problem = cli::example_config("example2").to_problem();
        CHECK(rejection_value(problem) ==
              doctest::Approx(stopping_payoff(problem.prior, problem).value));
    }
    SUBCASE("one push to the collapsing chain's fixed point") {
        StoppingProblem problem(Matrix::from_rows({{10.0, -10.0}}), false, 1.0,
                                Horizon::finite(2), Belief({0.1, 0.9}),
                                InfoStructure(Matrix::from_rows({{0.55, 0.45}, {0.45, 0.55}})),
                                MarkovTransition(Matrix::from_rows({{0.8, 0.2}, {0.8, 0.2}})));
        CHECK(rejection_value(problem) == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("drifting benchmark is worth only the outside option") {
        CHECK(rejection_value(drifting_problem()) == doctest::Approx(0.0));
    }
}

TEST_CASE("postponing the purchase beats buying immediately on the drifting benchmark") {
    const auto problem = drifting_problem();
    const MarkovSolution sol = solve_markov(problem, FeeScheme::zero(), kDefaultTreeBudget, 1);
    const auto& nodes = sol.tree.nodes;
    const auto& root = nodes.front();

    const auto& buy_s1 = nodes[root.acquire_children[0]];
    const auto& buy_s2 = nodes[root.acquire_children[1]];
    CHECK(buy_s1.belief[0] == doctest::Approx(0.47).epsilon(5e-3));
    CHECK(buy_s2.belief[0] == doctest::Approx(0.372).epsilon(5e-3));
    CHECK(nodes[buy_s1.wait_child].belief[0] == doctest::Approx(0.494).epsilon(5e-3));
    CHECK(nodes[buy_s2.wait_child].belief[0] == doctest::Approx(0.474).epsilon(5e-3));
    CHECK(root.acquire_value == doctest::Approx(0.0));

    const auto& wait1 = nodes[root.wait_child];
    CHECK(wait1.belief[0] == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(nodes[wait1.wait_child].belief[0] == doctest::Approx(0.484).epsilon(1e-12));
    const auto& late_s1 = nodes[wait1.acquire_children[0]];
    const auto& late_s2 = nodes[wait1.acquire_children[1]];
    CHECK(late_s1.belief[0] == doctest::Approx(0.534).epsilon(5e-3));
    CHECK(late_s2.belief[0] == doctest::Approx(0.434).epsilon(5e-3));
    CHECK(late_s1.edge_prob == doctest::Approx(0.498).epsilon(1e-3));
    CHECK(late_s2.edge_prob == doctest::Approx(0.502).epsilon(1e-3));
    CHECK(late_s1.value > 0.0);

    CHECK(root.wait_value > root.acquire_value + 1e-9);
    CHECK(root.decision == Decision::wait);
    CHECK(sol.accepted);
}

TEST_CASE("beliefs along every path compose the drift with the update") {
    const auto problem = drifting_problem();
    const MarkovSolution sol = solve_markov(problem, FeeScheme::zero(), kDefaultTreeBudget, 1);
    const auto& tau = *problem.transition;
    for (const auto& node : sol.tree.nodes) {
        const Belief pushed = markov_push(node.belief, tau);
        if (node.wait_child >= 0) {
            const auto& w = sol.tree.nodes[node.wait_child];
            for (std::size_t t = 0; t < 2; ++t)
                CHECK(w.belief[t] == doctest::Approx(pushed[t]).epsilon(1e-12));
        }
        for (std::size_t s = 0; s < node.acquire_children.size(); ++s) {
            if (node.acquire_children[s] < 0) continue;
            const Belief post = bayes_update(pushed, problem.info, s);
            const auto& child = sol.tree.nodes[node.acquire_children[s]];
            for (std::size_t t = 0; t < 2; ++t)
                CHECK(child.belief[t] == doctest::Approx(post[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("identity transition reduces to the history tree for any fee") {
    SplitRng rng(401);
    for (int trial = 0; trial < 25; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.horizon = 1 + int(sub.next_u64() % 3);
        opt.outside_option = true;  // waiting is then dominated for every fee
        StoppingProblem flat = test::random_problem(sub, opt);
        const StoppingProblem problem(flat.payoffs, flat.include_outside_option,
                                      flat.discount, flat.horizon, flat.prior, flat.info,
                                      MarkovTransition::identity(2));
        const auto sampler = uniform_tree_sampler(problem, 1.0);
        const FeeScheme fee = sub.next_double() < 0.3 ? FeeScheme::zero() : sampler(sub);
        const MarkovSolution markov = solve_markov(problem, fee);
        const HistoryTree tree = solve_history_tree(problem, fee);
        CHECK(markov.tree.root_value() == doctest::Approx(tree.root_value()).epsilon(1e-9));
    }
}

TEST_CASE("acceptance uses the weak inequality against the rejection value") {
    const auto problem = drifting_problem();
    const double voi = markov_value_of_information(problem, kDefaultTreeBudget, 1);
    CHECK(voi == doctest::Approx(0.9 * 0.9 * 0.4984 * 0.68226).epsilon(5e-3));
    CHECK(voi > 0.0);

    // Charging exactly the value keeps the decision maker weakly willing.
    const MarkovSolution at_value =
        solve_markov(problem, FeeScheme::upfront(voi), kDefaultTreeBudget, 1);
    CHECK(at_value.accepted);
    CHECK(at_value.tree.root_value() == doctest::Approx(at_value.rejection).epsilon(1e-9));

    const MarkovSolution above =
        solve_markov(problem, FeeScheme::upfront(voi + 1e-6), kDefaultTreeBudget, 1);
    CHECK_FALSE(above.accepted);
}

TEST_CASE("markov information value reduces under an identity transition") {
    SplitRng rng(419);
    for (int trial = 0; trial < 10; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.horizon = 1 + int(sub.next_u64() % 3);
        opt.outside_option = true;
        StoppingProblem flat = test::random_problem(sub, opt);
        const StoppingProblem problem(flat.payoffs, flat.include_outside_option,
                                      flat.discount, flat.horizon, flat.prior, flat.info,
                                      MarkovTransition::identity(2));
        CHECK(markov_value_of_information(problem) ==
              doctest::Approx(value_of_information(problem)).epsilon(1e-9));
    }
}

TEST_CASE("uninformative signals make acquisition worthless even with drift") {
    StoppingProblem problem(Matrix::from_rows({{10.0, -10.0}}), true, 0.9,
                            Horizon::finite(3), Belief({0.1, 0.9}),
                            InfoStructure(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})),
                            MarkovTransition(Matrix::from_rows({{0.6, 0.4}, {0.4, 0.6}})));
    CHECK(markov_value_of_information(problem) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("node budget is enforced") {
    CHECK_THROWS_AS(solve_markov(drifting_problem(), FeeScheme::zero(), 3), TreeTooLarge);
}
