#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "stopval/cli.hpp"
#include "stopval/stopping_time.hpp"
#include "stopval/wald.hpp"

using namespace stopval;

TEST_CASE("random walk first-passage masses") {
    const auto pmf = random_walk_hitting_pmf(0.6, 5);
    CHECK(pmf[0] == doctest::Approx(0.6));               // period 1
    CHECK(pmf[1] == doctest::Approx(0.144));             // period 3
    CHECK(pmf[2] == doctest::Approx(0.06912));           // period 5
    // Conditioning on the unfavorable state swaps p and 1-p.
    const auto down = random_walk_hitting_pmf(0.4, 3);
    CHECK(down[0] == doctest::Approx(0.4));
    CHECK(down[1] == doctest::Approx(0.096));  // (1!!/2!) * 2 * 0.4^2 * 0.6

    // Total mass approaches min(1, p/(1-p)).
    const auto tail = random_walk_hitting_pmf(0.3, 4000);
    double total = 0.0;
    for (double v : tail) total += v;
    CHECK(total <= 0.3 / 0.7 + 1e-12);
    CHECK(total == doctest::Approx(0.3 / 0.7).epsilon(1e-6));
}

TEST_CASE("closed form matches a simulated walk") {
    const auto pmf = random_walk_hitting_pmf(0.6, 5);
    const std::uint64_t trials = 200000;
    const auto sim = test::simulate_walk_first_passage(0.6, trials, 909, 9);
    for (std::size_t n = 1; n <= 5; ++n) {
        const double want = pmf[n - 1];
        const double got = sim[2 * n - 1];
        const double se = std::sqrt(want * (1.0 - want) / double(trials));
        CHECK(std::abs(got - want) <= 3.0 * se);
    }
}

TEST_CASE("one-step walk mixture") {
    const StoppingTimeDist dist = one_step_walk_distribution(0.6, 0.57, 200);
    CHECK(dist.pmf[0] == doctest::Approx(0.0));
    CHECK(dist.pmf[1] == doctest::Approx(0.514).epsilon(1e-12));
    CHECK(dist.pmf[2] == doctest::Approx(0.0));
    CHECK(dist.never_mass > 0.0);
    CHECK(dist.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact distribution under the stationary walk policies") {
    const auto prob_s = cli::example_config("example4").to_problem();
    const auto prob_t = cli::example_config("example4_t").to_problem();
    const InfiniteSolution inf_s = solve_infinite(prob_s, 1e-6);
    const InfiniteSolution inf_t = solve_infinite(prob_t, 1e-6);

    const StoppingTimeDist dist_s =
        exact_distribution(prob_s, StopPolicy::stationary(inf_s.value), 200);
    const StoppingTimeDist dist_t =
        exact_distribution(prob_t, StopPolicy::stationary(inf_t.value), 200);
    CHECK(dist_s.pmf[1] == doctest::Approx(0.514).epsilon(1e-9));
    CHECK(dist_t.pmf[1] == doctest::Approx(0.507).epsilon(1e-9));
    CHECK(dist_s.pmf[1] - dist_t.pmf[1] == doctest::Approx(0.007).epsilon(1e-7));
    CHECK(dist_s.total_mass() == doctest::Approx(1.0).epsilon(1e-9));

    // The sweep reproduces the closed-form walk masses period by period.
    const StoppingTimeDist closed = one_step_walk_distribution(0.6, 0.57, 200);
    for (std::size_t n = 0; n <= 20; ++n)
        CHECK(dist_s.pmf[n] == doctest::Approx(closed.pmf[n]).epsilon(1e-9));
}

TEST_CASE("point-mass policies") {
    const auto problem = cli::example_config("example2").to_problem();
    // Horizon-zero: everything resolves immediately.
    const auto now = problem.with_horizon(Horizon::finite(0));
    const StoppingTimeDist dist =
        exact_distribution(now, StopPolicy::finite(solve_finite(now, 0.0)), 0);
    CHECK(dist.pmf[0] == doctest::Approx(1.0));
    CHECK(dist.never_mass == doctest::Approx(0.0));
}

TEST_CASE("simulation agrees with the exact sweep") {
    const auto problem = cli::example_config("example2").to_problem();
    const StopPolicy policy = StopPolicy::finite(solve_finite(problem, 0.0));
    const StoppingTimeDist exact = exact_distribution(problem, policy, 2);
    const std::uint64_t trials = 100000;
    const StoppingTimeDist sim = simulate_distribution(problem, policy, trials, 77, 2);
    CHECK(sim.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const auto exact_cdf = exact.cdf();
    const auto sim_cdf = sim.cdf();
    for (std::size_t n = 0; n <= 2; ++n) {
        const double f = exact_cdf[n];
        const double se = std::sqrt(std::max(f * (1.0 - f), 1e-12) / double(trials));
        CHECK(std::abs(sim_cdf[n] - f) <= 3.0 * se);
    }
}

TEST_CASE("simulation is deterministic and thread-count independent") {
    const auto problem = cli::example_config("example2").to_problem();
    const StopPolicy policy = StopPolicy::finite(solve_finite(problem, 0.0));
    const StoppingTimeDist serial = simulate_distribution(problem, policy, 20000, 5, 2, 1);
    const StoppingTimeDist wide = simulate_distribution(problem, policy, 20000, 5, 2, 7);
    const StoppingTimeDist again = simulate_distribution(problem, policy, 20000, 5, 2, 7);
    CHECK(serial.pmf == wide.pmf);
    CHECK(wide.pmf == again.pmf);

    const StoppingTimeDist one = simulate_distribution(problem, policy, 1, 42, 2);
    CHECK(one.total_mass() == doctest::Approx(1.0));
    double top = 0.0;
    for (double v : one.pmf) top = std::max(top, v);
    CHECK(top == doctest::Approx(1.0));  // a single trial is a point mass
}

TEST_CASE("first-order dominance checks") {
    auto point_mass = [](std::size_t at, std::size_t len) {
        StoppingTimeDist d;
        d.pmf.assign(len + 1, 0.0);
        d.pmf[at] = 1.0;
        return d;
    };
    const auto late = point_mass(3, 4);
    const auto early = point_mass(1, 4);
    CHECK(fosd_check(late, late, 1e-9) == DominanceVerdict::equal);
    CHECK(fosd_check(late, early, 1e-9) == DominanceVerdict::P_dominates);
    CHECK(fosd_check(early, late, 1e-9) == DominanceVerdict::Q_dominates);

    // Patience delays stopping in the dominance order (distribution part).
    SplitRng rng(515);
    for (int trial = 0; trial < 25; ++trial) {
        SplitRng sub = rng.substream(trial);
        test::ProblemOptions opt;
        opt.horizon = 2 + int(sub.next_u64() % 3);
        const StoppingProblem patient = test::random_problem(sub, opt).with_discount(0.95);
        const StoppingProblem hasty = patient.with_discount(0.8);
        const auto dist_p = exact_distribution(
            patient, StopPolicy::finite(solve_finite(patient, 0.0)), opt.horizon);
        const auto dist_h = exact_distribution(
            hasty, StopPolicy::finite(solve_finite(hasty, 0.0)), opt.horizon);
        const auto verdict = fosd_check(dist_p, dist_h, 1e-9);
        const bool ok = verdict == DominanceVerdict::P_dominates ||
                        verdict == DominanceVerdict::equal;
        CHECK(ok);
    }
}

TEST_CASE("second-order dominance checks") {
    StoppingTimeDist spread;  // uniform on {1,3}
    spread.pmf = {0.0, 0.5, 0.0, 0.5};
    StoppingTimeDist middle;  // point mass at 2
    middle.pmf = {0.0, 0.0, 1.0, 0.0};
    CHECK(ssd_check(middle, spread, 1e-9) == DominanceVerdict::P_dominates);
    CHECK(ssd_check(spread, middle, 1e-9) == DominanceVerdict::Q_dominates);
    CHECK(ssd_check(spread, spread, 1e-9) == DominanceVerdict::equal);

    // The walk benchmark pair is ordered by neither criterion.
    const StoppingTimeDist dist_s = one_step_walk_distribution(0.6, 0.57, 200);
    const StoppingTimeDist dist_t = one_step_walk_distribution(0.55, 0.57, 200);
    CHECK(fosd_check(dist_s, dist_t, 1e-9) == DominanceVerdict::neither);
    CHECK(ssd_check(dist_s, dist_t, 1e-9) == DominanceVerdict::neither);
}

TEST_CASE("expected stopping time via the stopped-sum identity") {
    SUBCASE("closed form") {
        // unit state gap, unit noise, log-odds gap of two
        const double mu0 = 1.0 / (1.0 + std::exp(2.0));  // r0 = -2
        const double mu_bar = 0.5;                       // r_bar = 0
        const GaussianSetup setup(1.0, 0.0, 1.0, mu0, mu_bar);
        const auto est = wald_expected_stopping(setup, WaldMode::zero_overshoot());
        CHECK(est.expected_stopping == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("threshold already reached") {
        CHECK_THROWS_AS(wald_expected_stopping(GaussianSetup(1.0, 0.0, 1.0, 0.8, 0.7),
                                               WaldMode::zero_overshoot()),
                        InvalidSetup);
    }
    SUBCASE("vanishing gap") {
        const GaussianSetup setup(1.0, 0.0, 1.0, 0.6999, 0.7);
        const auto est = wald_expected_stopping(setup, WaldMode::zero_overshoot());
        CHECK(est.expected_stopping < 1e-2);
    }
    SUBCASE("monte carlo satisfies its own identity") {
        const GaussianSetup setup(1.0, 0.0, 1.5, 0.4, 0.75);
        const auto est = wald_expected_stopping(setup, WaldMode::monte_carlo(100000, 31));
        const double lhs = est.mean_eta * setup.increment_mean();
        const double rhs = est.mean_r_stop - setup.log_odds_prior();
        CHECK(std::abs(lhs - rhs) <= 3.0 * est.se_eta * setup.increment_mean() + 1e-9);
        // Overshoot makes the simulated time weakly longer than zero-overshoot.
        const auto zero = wald_expected_stopping(setup, WaldMode::zero_overshoot());
        CHECK(est.expected_stopping >= zero.expected_stopping - 1e-9);
    }
}

TEST_CASE("prior level where the expected stopping times cross") {
    SUBCASE("degenerate pair never crosses") {
        const GaussianSetup s(1.0, 0.0, 1.0, 0.3, 0.7);
        const auto res = crossing_prior(s, s);
        CHECK(res.outcome == CrossingResult::Outcome::no_crossing);
        CHECK(res.sign_changes == 0);
    }
    SUBCASE("crossing matches the linear solution") {
        const GaussianSetup s(1.0, 0.0, 1.0, 0.3, 0.8);
        const GaussianSetup t(1.0, 0.0, 2.0, 0.3, 0.7);
        const auto res = crossing_prior(s, t);
        REQUIRE(res.outcome == CrossingResult::Outcome::found);
        // r0* solves sigma_t^2 (r_bar_t - r0) = sigma_s^2 (r_bar_s - r0).
        const double r0 =
            (4.0 * std::log(0.7 / 0.3) - std::log(0.8 / 0.2)) / 3.0;
        const double want = 1.0 / (1.0 + std::exp(-r0));
        CHECK(res.prior == doctest::Approx(want).epsilon(1e-3));

        // The noisier source stops later below the crossing, earlier above it.
        auto eta = [](const GaussianSetup& g, double mu0) {
            const GaussianSetup probe(g.theta_high, g.theta_low, g.sigma, mu0, g.threshold);
            return wald_expected_stopping(probe, WaldMode::zero_overshoot())
                .expected_stopping;
        };
        const double below = res.prior * 0.5;
        const double above = 0.68;  // past the crossing, below both thresholds
        REQUIRE(above > res.prior);
        CHECK(eta(t, below) > eta(s, below));
        CHECK(eta(t, above) < eta(s, above));
    }
    SUBCASE("ordering violations are rejected") {
        const GaussianSetup s(1.0, 0.0, 2.0, 0.3, 0.8);
        const GaussianSetup t(1.0, 0.0, 1.0, 0.3, 0.7);
        CHECK_THROWS_AS(crossing_prior(s, t), std::invalid_argument);
    }
}
