#include "stopval/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>

#include "stopval/blackwell.hpp"
#include "stopval/errors.hpp"
#include "stopval/fee_design.hpp"
#include "stopval/markov.hpp"
#include "stopval/stopping_time.hpp"
#include "stopval/version.hpp"

namespace stopval::cli {

namespace {

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const TreeTooLarge& err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return kExitSolver;
    } catch (const NonConvergence& err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return kExitSolver;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    }
}

ProblemConfig load_with_overrides(const std::string& path, const Overrides& overrides) {
    ProblemConfig cfg = load_config(path);
    if (overrides.seed) cfg.solver.seed = *overrides.seed;
    if (overrides.tol) cfg.solver.tol = *overrides.tol;
    return cfg;
}

// Per-signal fee accepted by the exact PWLC path. Anything history-dependent
// needs the tree solver behind value-of-info.
double flat_fee_of(const ProblemConfig& cfg, const StoppingProblem& problem) {
    if (!cfg.fee) return 0.0;
    switch (cfg.fee->kind()) {
        case FeeScheme::Kind::zero: return 0.0;
        case FeeScheme::Kind::flat:
            return cfg.fee->effective_fee(History{{0}}, problem.discount);
        default:
            throw ConfigError("fee",
                              "solve expects a history-independent per-signal fee (zero or "
                              "flat); evaluate general schemes with value-of-info");
    }
}

std::string out_stem(const std::string& out_path) {
    if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv")
        return out_path.substr(0, out_path.size() - 4);
    return out_path;
}

std::vector<Belief> grid_for(const StoppingProblem& problem, int grid_points) {
    if (problem.states() == 2) return two_state_grid(std::size_t(grid_points));
    std::size_t sub = 1;
    auto count = [&](std::size_t s) {
        double c = 1.0;
        for (std::size_t i = 1; i < problem.states(); ++i)
            c *= double(s + i) / double(i);
        return c;
    };
    while (count(sub) < double(grid_points) && sub < 64) ++sub;
    return simplex_grid(problem.states(), sub);
}

std::string action_label(const ProblemConfig& cfg, const PolicyDecision& pd) {
    if (pd.kind == Decision::acquire) return "";
    if (pd.kind == Decision::forgo || pd.action == kOutsideAction) return "outside";
    return cfg.action_labels[std::size_t(pd.action)];
}

void append_value_rows(ResultTable& table, const ProblemConfig& cfg,
                       const StoppingProblem& problem, const PwlcValue& layer,
                       const std::string& period_label, bool terminal,
                       const std::vector<Belief>& grid) {
    for (const auto& mu : grid) {
        std::vector<std::string> row{period_label};
        for (std::size_t i = 0; i < mu.size(); ++i) row.push_back(format_cell(mu[i]));
        row.push_back(format_cell(value_at(layer, mu)));
        const PolicyDecision pd = decide(layer, problem, mu, terminal);
        row.push_back(to_string(pd.kind));
        row.push_back(action_label(cfg, pd));
        table.add_row(std::move(row));
    }
}

ResultTable threshold_table_header() {
    ResultTable t;
    t.header = {"period", "threshold", "orientation"};
    return t;
}

void append_threshold_row(ResultTable& table, const std::string& period,
                          const PolicyLayer& policy) {
    table.add_row({period, policy.has_threshold ? format_cell(policy.threshold) : "nan",
                   policy.stop_above ? "stop_above" : "stop_below"});
}

}  // namespace

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const Overrides& overrides) {
    return guarded([&] {
        const ProblemConfig cfg = load_with_overrides(config_path, overrides);
        const StoppingProblem problem = cfg.to_problem();
        const std::vector<Belief> grid = grid_for(problem, cfg.solver.grid_points);

        ResultTable values;
        values.header = {"period"};
        for (const auto& s : cfg.state_labels) values.header.push_back("mu_" + s);
        values.header.insert(values.header.end(), {"value", "decision", "action"});
        ResultTable thresholds = threshold_table_header();

        if (problem.horizon.is_infinite) {
            const InfiniteSolution inf = solve_infinite(problem, cfg.solver.tol);
            append_value_rows(values, cfg, problem, inf.value, "inf", false, grid);
            PolicyLayer pl;
            pl.has_threshold = inf.has_threshold;
            pl.threshold = inf.threshold;
            pl.stop_above = inf.stop_above;
            append_threshold_row(thresholds, "inf", pl);
            std::cout << "value iteration sweeps: " << inf.sweeps << "\n";
            if (inf.has_threshold)
                std::cout << "stationary threshold: " << format_cell(inf.threshold) << "\n";
        } else {
            const FiniteSolution sol = solve_finite(problem, flat_fee_of(cfg, problem));
            for (int n = 0; n <= sol.last_period(); ++n) {
                append_value_rows(values, cfg, problem, sol.layers[n].value,
                                  std::to_string(n), n == sol.last_period(), grid);
                append_threshold_row(thresholds, std::to_string(n), sol.layers[n].policy);
                if (sol.layers[n].policy.has_threshold)
                    std::cout << "period " << n << " threshold: "
                              << format_cell(sol.layers[n].policy.threshold) << " ("
                              << sol.layers[n].value.alphas.size() << " segments)\n";
            }
        }
        write_file(out_path, values.to_csv());
        write_file(out_stem(out_path) + "_thresholds.csv", thresholds.to_csv());
        write_sidecar(out_path, cfg.to_json_text(), cfg.solver.seed);
        return kExitOk;
    });
}

int cmd_value_of_info(const std::string& config_path, const Overrides& overrides) {
    return guarded([&] {
        const ProblemConfig cfg = load_with_overrides(config_path, overrides);
        const StoppingProblem problem = cfg.to_problem();
        const double pi0 = stopping_payoff(problem.prior, problem).value;
        double v0;
        if (problem.horizon.is_infinite)
            v0 = value_at(solve_infinite(problem, cfg.solver.tol).value, problem.prior);
        else
            v0 = value_at(solve_finite(problem, 0.0).value(0), problem.prior);
        const double phi = std::max(0.0, v0 - pi0);

        std::cout << "pi0 = " << format_cell(pi0) << "\n";
        std::cout << "V0 = " << format_cell(v0) << "\n";
        std::cout << "phi = " << format_cell(phi) << "\n";

        bool accepted;
        std::string scheme = "zero";
        if (cfg.fee) {
            scheme = to_string(cfg.fee->kind());
            if (!problem.horizon.is_infinite) {
                accepted = evaluate_fee(problem, *cfg.fee, cfg.solver.tree_budget).accepted;
            } else if (cfg.fee->kind() == FeeScheme::Kind::upfront ||
                       cfg.fee->kind() == FeeScheme::Kind::zero) {
                accepted = v0 - cfg.fee->amount() > pi0;
            } else {
                throw ConfigError("fee",
                                  "infinite-horizon acceptance supports zero or upfront fees");
            }
        } else {
            accepted = v0 > pi0;
        }
        std::cout << "fee_scheme = " << scheme << "\n";
        std::cout << "verdict = " << (accepted ? "accepted" : "declined") << "\n";
        return kExitOk;
    });
}

int cmd_compare(const std::string& config_s_path, const std::string& config_t_path,
                const std::string& out_path, const Overrides& overrides) {
    return guarded([&] {
        const ProblemConfig cfg_s = load_with_overrides(config_s_path, overrides);
        const ProblemConfig cfg_t = load_with_overrides(config_t_path, overrides);
        const StoppingProblem prob_s = cfg_s.to_problem();
        const StoppingProblem prob_t = cfg_t.to_problem();
        if (prob_s.states() != prob_t.states())
            throw ConfigError("info_structure", "state counts differ between the two configs");
        if (prob_s.horizon.is_infinite != prob_t.horizon.is_infinite)
            throw ConfigError("horizon", "horizons must both be finite or both infinite");

        const BlackwellVerdict verdict = blackwell_compare(prob_s.info, prob_t.info);
        std::cout << "blackwell = " << to_string(verdict.relation) << "\n";
        if (verdict.witness)
            std::cout << "garbling residual = " << format_cell(verdict.residual) << "\n";

        ResultTable table;
        table.header = {"period", "threshold_S", "threshold_T", "difference"};
        StopPolicy policy_s = StopPolicy::stationary({});
        StopPolicy policy_t = StopPolicy::stationary({});
        std::size_t n_max = cfg_s.solver.n_max;
        if (prob_s.horizon.is_infinite) {
            const InfiniteSolution inf_s = solve_infinite(prob_s, cfg_s.solver.tol);
            const InfiniteSolution inf_t = solve_infinite(prob_t, cfg_t.solver.tol);
            table.add_row({"inf", format_cell(inf_s.threshold), format_cell(inf_t.threshold),
                           format_cell(inf_s.threshold - inf_t.threshold)});
            policy_s = StopPolicy::stationary(inf_s.value);
            policy_t = StopPolicy::stationary(inf_t.value);
        } else {
            if (prob_s.horizon.periods != prob_t.horizon.periods)
                throw ConfigError("horizon", "finite horizons must match");
            const FiniteSolution sol_s = solve_finite(prob_s, flat_fee_of(cfg_s, prob_s));
            const FiniteSolution sol_t = solve_finite(prob_t, flat_fee_of(cfg_t, prob_t));
            for (int n = 0; n <= sol_s.last_period(); ++n) {
                const auto& ps = sol_s.layers[n].policy;
                const auto& pt = sol_t.layers[n].policy;
                table.add_row({std::to_string(n),
                               ps.has_threshold ? format_cell(ps.threshold) : "nan",
                               pt.has_threshold ? format_cell(pt.threshold) : "nan",
                               ps.has_threshold && pt.has_threshold
                                   ? format_cell(ps.threshold - pt.threshold)
                                   : "nan"});
            }
            policy_s = StopPolicy::finite(sol_s);
            policy_t = StopPolicy::finite(sol_t);
            n_max = std::size_t(prob_s.horizon.periods);
        }
        std::cout << table.to_csv();
        if (!out_path.empty()) {
            write_file(out_path, table.to_csv());
            write_sidecar(out_path, cfg_s.to_json_text() + cfg_t.to_json_text(),
                          cfg_s.solver.seed);
        }

        const StoppingTimeDist dist_s = exact_distribution(prob_s, policy_s, n_max);
        const StoppingTimeDist dist_t = exact_distribution(prob_t, policy_t, n_max);
        std::cout << "fosd = " << to_string(fosd_check(dist_s, dist_t, 1e-9)) << "\n";
        std::cout << "ssd = " << to_string(ssd_check(dist_s, dist_t, 1e-9)) << "\n";
        return kExitOk;
    });
}

int cmd_stopping_time(const std::string& config_path, const std::string& out_path,
                      const Overrides& overrides) {
    return guarded([&] {
        const ProblemConfig cfg = load_with_overrides(config_path, overrides);
        const StoppingProblem problem = cfg.to_problem();

        StopPolicy policy = StopPolicy::stationary({});
        std::size_t n_max = cfg.solver.n_max;
        if (problem.horizon.is_infinite) {
            policy = StopPolicy::stationary(solve_infinite(problem, cfg.solver.tol).value);
        } else {
            policy = StopPolicy::finite(solve_finite(problem, flat_fee_of(cfg, problem)));
            n_max = std::size_t(problem.horizon.periods);
        }
        const StoppingTimeDist exact = exact_distribution(problem, policy, n_max);

        const std::uint64_t trials = overrides.trials.value_or(0);
        std::optional<StoppingTimeDist> sim;
        if (trials > 0)
            sim = simulate_distribution(problem, policy, trials, cfg.solver.seed, n_max);

        ResultTable table;
        table.header = {"period", "pmf_exact", "cdf_exact"};
        if (sim) table.header.insert(table.header.end(), {"pmf_sim", "cdf_sim"});
        const std::vector<double> cdf = exact.cdf();
        const std::vector<double> sim_cdf = sim ? sim->cdf() : std::vector<double>{};
        for (std::size_t n = 0; n < exact.pmf.size(); ++n) {
            std::vector<std::string> row{std::to_string(n), format_cell(exact.pmf[n]),
                                         format_cell(cdf[n])};
            if (sim) {
                row.push_back(format_cell(sim->pmf[n]));
                row.push_back(format_cell(sim_cdf[n]));
            }
            table.add_row(std::move(row));
        }
        write_file(out_path, table.to_csv());
        write_sidecar(out_path, cfg.to_json_text(), cfg.solver.seed);
        std::cout << "never_mass_exact = " << format_cell(exact.never_mass) << "\n";
        if (sim) std::cout << "never_mass_sim = " << format_cell(sim->never_mass) << "\n";
        return kExitOk;
    });
}

namespace {

ProblemConfig base_two_state(std::vector<double> payoff_row, bool outside, double discount,
                             int horizon, std::vector<double> prior,
                             std::vector<std::vector<double>> info) {
    ProblemConfig cfg;
    cfg.state_labels = {"high", "low"};
    cfg.action_labels = {"invest"};
    cfg.payoffs = {std::move(payoff_row)};
    cfg.include_outside_option = outside;
    cfg.discount = discount;
    cfg.horizon = horizon;
    cfg.prior = std::move(prior);
    cfg.info_rows = std::move(info);
    return cfg;
}

}  // namespace

bool known_example(const std::string& id) {
    return id == "example1" || id == "example2" || id == "example4" || id == "example5";
}

ProblemConfig example_config(const std::string& id) {
    if (id == "example1") {
        ProblemConfig cfg = base_two_state({10, -10}, true, 0.9, 2, {0.1, 0.9},
                                           {{0.55, 0.45}, {0.45, 0.55}});
        cfg.transition_rows = {{0.6, 0.4}, {0.4, 0.6}};
        cfg.quota = QuotaOptions{1, 1};
        return cfg;
    }
    if (id == "example2")
        return base_two_state({6, -8}, true, 0.9, 2, {0.5, 0.5}, {{0.7, 0.3}, {0.3, 0.7}});
    if (id == "example2_t")
        return base_two_state({6, -8}, true, 0.9, 2, {0.5, 0.5},
                              {{0.6, 0.4}, {0.261, 0.739}});
    if (id == "example4") {
        ProblemConfig cfg = base_two_state({100, -100}, false, 0.9, 0, {0.57, 0.43},
                                           {{0.6, 0.4}, {0.4, 0.6}});
        cfg.horizon_infinite = true;
        return cfg;
    }
    if (id == "example4_t") {
        ProblemConfig cfg = base_two_state({100, -100}, false, 0.9, 0, {0.57, 0.43},
                                           {{0.55, 0.45}, {0.45, 0.55}});
        cfg.horizon_infinite = true;
        return cfg;
    }
    if (id == "example5")
        return base_two_state({6, -8}, true, 0.85, 5, {0.5, 0.5}, {{0.8, 0.2}, {0.5, 0.5}});
    if (id == "example5_t")
        return base_two_state({6, -8}, true, 0.85, 5, {0.5, 0.5}, {{0.6, 0.4}, {0.3, 0.7}});
    throw ConfigError("example", "unknown id '" + id + "'");
}

namespace {

struct Checker {
    bool all_ok = true;
    void check(bool ok, const std::string& label) {
        std::cout << (ok ? "PASS " : "FAIL ") << label << "\n";
        all_ok = all_ok && ok;
    }
};

bool near(double x, double want, double tol) { return std::abs(x - want) <= tol; }

int reproduce_example1(const std::string& out_dir) {
    const StoppingProblem problem = example_config("example1").to_problem();
    const MarkovSolution sol = solve_markov(problem, FeeScheme::zero(), kDefaultTreeBudget, 1);
    const auto& nodes = sol.tree.nodes;
    const auto& root = nodes.front();

    Checker c;
    const auto& buy0_s1 = nodes[root.acquire_children[0]];
    const auto& buy0_s2 = nodes[root.acquire_children[1]];
    c.check(near(buy0_s1.belief[0], 0.47, 5e-3) && near(buy0_s2.belief[0], 0.372, 5e-3),
            "first-period posteriors after buying immediately");
    const auto& drift_s1 = nodes[buy0_s1.wait_child];
    const auto& drift_s2 = nodes[buy0_s2.wait_child];
    c.check(near(drift_s1.belief[0], 0.494, 5e-3) && near(drift_s2.belief[0], 0.474, 5e-3),
            "second-period drifted beliefs after buying immediately");
    const auto& wait1 = nodes[root.wait_child];
    c.check(near(wait1.belief[0], 0.42, 5e-3), "first-period drifted belief when waiting");
    const auto& late_s1 = nodes[wait1.acquire_children[0]];
    const auto& late_s2 = nodes[wait1.acquire_children[1]];
    c.check(near(late_s1.belief[0], 0.534, 5e-3) && near(late_s2.belief[0], 0.434, 5e-3),
            "second-period posteriors after postponing the purchase");
    c.check(near(late_s1.edge_prob, 0.498, 1e-3) && near(late_s2.edge_prob, 0.502, 1e-3),
            "signal probabilities at the postponed purchase");
    c.check(root.wait_value > root.acquire_value + 1e-9,
            "postponing the purchase strictly beats buying immediately");

    ResultTable table;
    table.header = {"strategy", "period", "signal", "belief_high", "probability", "value"};
    table.add_row({"buy_now", "1", "s1", format_cell(buy0_s1.belief[0]),
                   format_cell(buy0_s1.edge_prob), format_cell(buy0_s1.value)});
    table.add_row({"buy_now", "1", "s2", format_cell(buy0_s2.belief[0]),
                   format_cell(buy0_s2.edge_prob), format_cell(buy0_s2.value)});
    table.add_row({"buy_now", "2", "s1", format_cell(drift_s1.belief[0]), "1",
                   format_cell(drift_s1.value)});
    table.add_row({"buy_now", "2", "s2", format_cell(drift_s2.belief[0]), "1",
                   format_cell(drift_s2.value)});
    table.add_row({"postpone", "1", "", format_cell(wait1.belief[0]), "1",
                   format_cell(wait1.value)});
    table.add_row({"postpone", "2", "s1", format_cell(late_s1.belief[0]),
                   format_cell(late_s1.edge_prob), format_cell(late_s1.value)});
    table.add_row({"postpone", "2", "s2", format_cell(late_s2.belief[0]),
                   format_cell(late_s2.edge_prob), format_cell(late_s2.value)});
    write_file(out_dir + "/example1_beliefs.csv", table.to_csv());
    return c.all_ok ? kExitOk : kExitAssertion;
}

int reproduce_example2(const std::string& out_dir) {
    const ProblemConfig cfg = example_config("example2");
    const StoppingProblem problem = cfg.to_problem();
    Checker c;

    const FiniteSolution sol = solve_finite(problem, 0.0);
    c.check(sol.layers[0].policy.has_threshold &&
                sol.layers[0].policy.threshold > 8.0 / 14.0 + 1e-6,
            "period-0 threshold strictly above the myopic break-even");

    const HistoryTree tree = solve_history_tree(problem, FeeScheme::zero());
    c.check(near(tree.root_value(), value_at(sol.value(0), problem.prior), 1e-9),
            "tree solver and exact recursion agree at zero fees");

    const StoppingTimeDist patient =
        exact_distribution(problem, StopPolicy::finite(sol), 2);
    const StoppingProblem hasty = problem.with_discount(0.7);
    const StoppingTimeDist hasty_dist =
        exact_distribution(hasty, StopPolicy::finite(solve_finite(hasty, 0.0)), 2);
    c.check(fosd_check(patient, hasty_dist, 1e-9) == DominanceVerdict::P_dominates,
            "higher discount stops later in the dominance order");

    const StoppingProblem coarse = example_config("example2_t").to_problem();
    c.check(blackwell_compare(problem.info, coarse.info).relation ==
                BlackwellRelation::S_dominates_T,
            "benchmark pair is ranked by the garbling order");

    ResultTable table;
    table.header = {"period", "threshold"};
    for (int n = 0; n <= sol.last_period(); ++n)
        table.add_row({std::to_string(n), format_cell(sol.layers[n].policy.threshold)});
    write_file(out_dir + "/example2_thresholds.csv", table.to_csv());
    return c.all_ok ? kExitOk : kExitAssertion;
}

int reproduce_example4(const std::string& out_dir) {
    const StoppingProblem prob_s = example_config("example4").to_problem();
    const StoppingProblem prob_t = example_config("example4_t").to_problem();
    Checker c;

    const InfiniteSolution inf_s = solve_infinite(prob_s, 1e-8);
    const InfiniteSolution inf_t = solve_infinite(prob_t, 1e-8);
    c.check(inf_s.has_threshold && near(inf_s.threshold, 0.66, 0.01),
            "stationary threshold under the sharper structure near 0.66");
    c.check(inf_t.has_threshold && near(inf_t.threshold, 0.59, 0.01),
            "stationary threshold under the noisier structure near 0.59");

    const std::size_t n_max = 200;
    const StoppingTimeDist dist_s = one_step_walk_distribution(0.6, 0.57, n_max);
    const StoppingTimeDist dist_t = one_step_walk_distribution(0.55, 0.57, n_max);
    c.check(near(dist_s.pmf[1] - dist_t.pmf[1], 0.007, 1e-9),
            "one-period stopping gap matches the closed form");
    c.check(fosd_check(dist_s, dist_t, 1e-9) == DominanceVerdict::neither,
            "no first-order dominance between the walk distributions");
    c.check(ssd_check(dist_s, dist_t, 1e-9) == DominanceVerdict::neither,
            "no second-order dominance between the walk distributions");

    ResultTable table;
    table.header = {"period", "cdf_S", "cdf_T"};
    const std::vector<double> cdf_s = dist_s.cdf();
    const std::vector<double> cdf_t = dist_t.cdf();
    for (std::size_t n = 0; n <= 25; ++n)
        table.add_row({std::to_string(n), format_cell(cdf_s[n]), format_cell(cdf_t[n])});
    write_file(out_dir + "/example4_cdfs.csv", table.to_csv());
    return c.all_ok ? kExitOk : kExitAssertion;
}

int reproduce_example5(const std::string& out_dir) {
    const StoppingProblem prob_s = example_config("example5").to_problem();
    const StoppingProblem prob_t = example_config("example5_t").to_problem();
    Checker c;

    const FiniteSolution sol_s = solve_finite(prob_s, 0.0);
    const FiniteSolution sol_t = solve_finite(prob_t, 0.0);
    const double want_s[6] = {0.7376, 0.7335, 0.7335, 0.7201, 0.7055, 0.5714};
    const double want_t[6] = {0.7312, 0.7263, 0.7225, 0.7142, 0.6697, 0.5714};
    bool ok_s = true, ok_t = true, ok_d = true;
    ResultTable table;
    table.header = {"period", "threshold_S", "threshold_T", "difference"};
    for (int n = 0; n <= 5; ++n) {
        const double ts = sol_s.layers[n].policy.threshold;
        const double tt = sol_t.layers[n].policy.threshold;
        ok_s = ok_s && near(ts, want_s[n], 5e-4);
        ok_t = ok_t && near(tt, want_t[n], 5e-4);
        ok_d = ok_d && near(ts - tt, want_s[n] - want_t[n], 5e-4);
        table.add_row({std::to_string(n), format_cell(ts), format_cell(tt),
                       format_cell(ts - tt)});
    }
    c.check(ok_s, "five-period thresholds under the first structure");
    c.check(ok_t, "five-period thresholds under the second structure");
    c.check(ok_d, "per-period threshold differences");
    c.check(blackwell_compare(prob_s.info, prob_t.info).relation ==
                BlackwellRelation::incomparable,
            "structures are not ranked by the garbling order");
    write_file(out_dir + "/example5_thresholds.csv", table.to_csv());
    return c.all_ok ? kExitOk : kExitAssertion;
}

}  // namespace

int cmd_reproduce(const std::string& id, const std::string& out_dir) {
    if (!known_example(id)) {
        std::cerr << "unknown reproduction id '" << id
                  << "'; expected one of: example1 example2 example4 example5\n";
        return kExitConfig;
    }
    return guarded([&] {
        std::filesystem::create_directories(out_dir);
        if (id == "example1") return reproduce_example1(out_dir);
        if (id == "example2") return reproduce_example2(out_dir);
        if (id == "example4") return reproduce_example4(out_dir);
        return reproduce_example5(out_dir);
    });
}

}  // namespace stopval::cli
