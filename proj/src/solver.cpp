#include "stopval/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "stopval/errors.hpp"

namespace stopval {

namespace {

// Highest payoff over real actions only (the outside option excluded).
double best_real_payoff(const Belief& mu, const StoppingProblem& problem) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < problem.actions(); ++a) {
        double v = 0.0;
        for (std::size_t t = 0; t < problem.states(); ++t) v += problem.payoffs(a, t) * mu[t];
        best = std::max(best, v);
    }
    return best;
}

std::vector<AlphaVector> stop_alphas(const StoppingProblem& problem) {
    std::vector<AlphaVector> alphas;
    for (std::size_t a = 0; a < problem.actions(); ++a) {
        AlphaVector v;
        v.coeffs.assign(problem.payoffs.row(a).begin(), problem.payoffs.row(a).end());
        v.tag = {AlphaTag::Kind::stop, int(a)};
        alphas.push_back(std::move(v));
    }
    if (problem.include_outside_option) {
        AlphaVector v;
        v.coeffs.assign(problem.states(), 0.0);
        v.tag = {AlphaTag::Kind::outside, kOutsideAction};
        alphas.push_back(std::move(v));
    }
    return alphas;
}

}  // namespace

const char* to_string(Decision d) {
    switch (d) {
        case Decision::stop: return "stop";
        case Decision::acquire: return "acquire";
        case Decision::wait: return "wait";
        case Decision::forgo: return "forgo";
    }
    return "?";
}

PwlcValue terminal_value(const StoppingProblem& problem) {
    PwlcValue v;
    v.alphas = stop_alphas(problem);
    AlphaVector zero;
    zero.coeffs.assign(problem.states(), 0.0);
    zero.tag = {AlphaTag::Kind::horizon, kOutsideAction};
    v.alphas.push_back(std::move(zero));
    return prune(std::move(v));
}

namespace {

// Two-state backup in O(k n log n): the continuation value is piecewise
// linear with kinks only at the Bayes preimages of the next layer's kinks, so
// only the signal-branch combos active on some segment are materialized.
PwlcValue backup_two_state(const PwlcValue& next, const StoppingProblem& problem,
                           double flat_fee) {
    const std::size_t k = problem.signals();
    const double delta = problem.discount;
    // Drift of the state-0 probability before the signal: p(x) = a x + b.
    double push_a = 1.0, push_b = 0.0;
    if (problem.has_transition()) {
        const auto& tau = *problem.transition;
        push_a = tau(0, 0) - tau(1, 0);
        push_b = tau(1, 0);
    }

    const std::vector<PwlSegment> segs = envelope_segments(next);
    std::vector<double> cuts = {0.0, 1.0};
    for (std::size_t s = 0; s < k; ++s) {
        const double f0 = problem.info.likelihood(0, s);
        const double f1 = problem.info.likelihood(1, s);
        if (f0 <= 0.0 || f1 <= 0.0) continue;  // posterior is constant in x
        for (std::size_t i = 1; i < segs.size(); ++i) {
            const double q = segs[i].from;
            if (!(q > 0.0) || !(q < 1.0)) continue;
            const double p = q * f1 / (f0 * (1.0 - q) + q * f1);
            if (std::abs(push_a) < 1e-300) continue;
            const double x = (p - push_b) / push_a;
            if (x > 0.0 && x < 1.0) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto piece_at = [&segs](double q) {
        std::size_t lo = 0, hi = segs.size();
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            (segs[mid].from <= q ? lo : hi) = mid;
        }
        return segs[lo].alpha_index;
    };

    PwlcValue out;
    out.alphas = stop_alphas(problem);
    std::vector<std::size_t> prev_combo;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double xm = 0.5 * (cuts[c] + cuts[c + 1]);
        const double p = push_a * xm + push_b;
        std::vector<std::size_t> combo(k);
        for (std::size_t s = 0; s < k; ++s) {
            const double f0 = problem.info.likelihood(0, s);
            const double f1 = problem.info.likelihood(1, s);
            const double alpha_s = p * f0 + (1.0 - p) * f1;
            combo[s] = alpha_s > 1e-300 ? piece_at(p * f0 / alpha_s) : 0;
        }
        if (combo == prev_combo && !out.alphas.empty() &&
            out.alphas.back().tag.kind == AlphaTag::Kind::acquire)
            continue;
        AlphaVector v;
        v.coeffs.assign(2, 0.0);
        for (std::size_t s = 0; s < k; ++s) {
            const auto& alpha = next.alphas[combo[s]].coeffs;
            if (problem.has_transition()) {
                const auto& tau = *problem.transition;
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j)
                        v.coeffs[i] += tau(i, j) * problem.info.likelihood(j, s) * alpha[j];
            } else {
                for (std::size_t i = 0; i < 2; ++i)
                    v.coeffs[i] += problem.info.likelihood(i, s) * alpha[i];
            }
        }
        for (std::size_t i = 0; i < 2; ++i) v.coeffs[i] = delta * (v.coeffs[i] - flat_fee);
        v.tag = {AlphaTag::Kind::acquire, 0};
        out.alphas.push_back(std::move(v));
        prev_combo = std::move(combo);
    }
    return prune(std::move(out));
}

}  // namespace

PwlcValue backup(const PwlcValue& next, const StoppingProblem& problem, double flat_fee) {
    if (flat_fee < 0.0) throw std::invalid_argument("backup: negative fee");
    if (problem.states() == 2) return backup_two_state(next, problem, flat_fee);
    const std::size_t m = problem.states();
    const std::size_t k = problem.signals();
    const double delta = problem.discount;

    // Signal-branch vectors g[s][a](i) = sum_j tau(i,j) f_j(s) alpha_a(j); with
    // no transition this is just the alpha weighted by the signal likelihoods.
    std::vector<std::vector<std::vector<double>>> branch(k);
    for (std::size_t s = 0; s < k; ++s) {
        branch[s].reserve(next.alphas.size());
        for (const auto& alpha : next.alphas) {
            std::vector<double> g(m, 0.0);
            if (problem.has_transition()) {
                const auto& tau = *problem.transition;
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        g[i] += tau(i, j) * problem.info.likelihood(j, s) * alpha.coeffs[j];
            } else {
                for (std::size_t i = 0; i < m; ++i)
                    g[i] = problem.info.likelihood(i, s) * alpha.coeffs[i];
            }
            branch[s].push_back(std::move(g));
        }
    }

    // Incremental cross-sum over signals, pruning between stages.
    std::vector<std::vector<double>> partial = {std::vector<double>(m, 0.0)};
    for (std::size_t s = 0; s < k; ++s) {
        PwlcValue stage;
        stage.alphas.reserve(partial.size() * branch[s].size());
        for (const auto& base : partial)
            for (const auto& g : branch[s]) {
                AlphaVector v;
                v.coeffs.resize(m);
                for (std::size_t i = 0; i < m; ++i) v.coeffs[i] = base[i] + g[i];
                v.tag = {AlphaTag::Kind::acquire, 0};
                stage.alphas.push_back(std::move(v));
            }
        stage = prune(std::move(stage));
        partial.clear();
        for (auto& a : stage.alphas) partial.push_back(std::move(a.coeffs));
    }

    PwlcValue out;
    out.alphas = stop_alphas(problem);
    for (auto& c : partial) {
        AlphaVector v;
        v.coeffs.resize(m);
        for (std::size_t i = 0; i < m; ++i) v.coeffs[i] = delta * (c[i] - flat_fee);
        v.tag = {AlphaTag::Kind::acquire, 0};
        out.alphas.push_back(std::move(v));
    }
    return prune(std::move(out));
}

FiniteSolution solve_finite(const StoppingProblem& problem, double flat_fee) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("solve_finite: problem has an infinite horizon");
    const int n_periods = problem.horizon.periods;
    FiniteSolution sol;
    sol.layers.resize(n_periods + 1);
    sol.layers[n_periods].value = terminal_value(problem);
    for (int n = n_periods - 1; n >= 0; --n)
        sol.layers[n].value = backup(sol.layers[n + 1].value, problem, flat_fee);
    for (int n = 0; n <= n_periods; ++n)
        sol.layers[n].policy = extract_threshold(sol.layers[n].value, problem, n);
    return sol;
}

InfiniteSolution solve_infinite(const StoppingProblem& problem, double tol, int sweep_cap,
                                double keep_margin) {
    if (!problem.horizon.is_infinite)
        throw std::invalid_argument("solve_infinite: problem has a finite horizon");
    const double delta = problem.discount;
    const double target = tol * (1.0 - delta) / (2.0 * delta);
    if (keep_margin < 0.0) keep_margin = 0.5 * tol * (1.0 - delta);

    const bool two_state = problem.states() == 2;
    std::vector<Belief> grid;
    if (!two_state) grid = simplex_grid(problem.states(), 24);

    InfiniteSolution sol;
    PwlcValue v = terminal_value(problem);
    for (int sweep = 0; sweep < sweep_cap; ++sweep) {
        PwlcValue next = backup(v, problem, 0.0);
        if (two_state && keep_margin > 0.0)
            next = simplify_two_state(std::move(next), keep_margin);
        const double delta_sup =
            two_state ? sup_diff_two_state(next, v) : sup_diff_on_grid(next, v, grid);
        sol.sweep_deltas.push_back(delta_sup);
        v = std::move(next);
        sol.sweeps = sweep + 1;
        if (delta_sup <= target) {
            sol.value = std::move(v);
            const PolicyLayer pl = extract_threshold(sol.value, problem, 0);
            sol.has_threshold = pl.has_threshold;
            sol.threshold = pl.threshold;
            sol.stop_above = pl.stop_above;
            return sol;
        }
    }
    throw NonConvergence("solve_infinite: sweep cap reached before tolerance");
}

PolicyDecision decide(const PwlcValue& layer, const StoppingProblem& problem, const Belief& mu,
                      bool terminal, double tie_tol) {
    const StopDecision sd = stopping_payoff(mu, problem);
    if (terminal) {
        if (sd.value >= 0.0) return {Decision::stop, sd.action};
        return {Decision::forgo, kOutsideAction};
    }
    double continuation = -std::numeric_limits<double>::infinity();
    for (const auto& alpha : layer.alphas)
        if (alpha.tag.kind == AlphaTag::Kind::acquire)
            continuation = std::max(continuation, dot(alpha.coeffs, mu));
    if (sd.value >= continuation - tie_tol) return {Decision::stop, sd.action};
    return {Decision::acquire, 0};
}

PolicyLayer extract_threshold(const PwlcValue& layer, const StoppingProblem& problem,
                              int period) {
    PolicyLayer pl;
    pl.period = period;
    if (problem.states() != 2) return pl;

    const Belief vertex0({1.0, 0.0});
    const Belief vertex1({0.0, 1.0});
    pl.stop_above = best_real_payoff(vertex0, problem) >= best_real_payoff(vertex1, problem);

    // Gap between the value function and the best real action; zero exactly
    // where stopping with a real action is optimal. Coordinates are flipped so
    // the favored vertex sits at x = 1.
    auto gap = [&](double x) {
        const double p0 = pl.stop_above ? x : 1.0 - x;
        const Belief mu({p0, 1.0 - p0});
        return value_at(layer, mu) - best_real_payoff(mu, problem);
    };
    constexpr double kRegionTol = 1e-9;
    if (gap(1.0) > kRegionTol) return pl;  // stopping never optimal, no boundary

    const int grid_n = 1024;
    double lo = -1.0;
    for (int i = grid_n; i >= 0; --i) {
        const double x = double(i) / grid_n;
        if (gap(x) > kRegionTol) {
            lo = x;
            break;
        }
    }
    double boundary = 0.0;
    if (lo >= 0.0) {
        double hi = std::min(1.0, lo + 1.0 / grid_n);
        while (hi - lo > 1e-7) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) > kRegionTol ? lo : hi) = mid;
        }
        boundary = 0.5 * (lo + hi);
    }
    pl.has_threshold = true;
    pl.threshold = pl.stop_above ? boundary : 1.0 - boundary;
    return pl;
}

std::vector<Belief> simplex_grid(std::size_t states, std::size_t subdivisions) {
    // All compositions of `subdivisions` into `states` parts.
    std::vector<Belief> grid;
    std::vector<double> point(states, 0.0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t idx,
                                                            std::size_t remaining) {
        if (idx + 1 == states) {
            point[idx] = double(remaining) / double(subdivisions);
            grid.emplace_back(point);
            return;
        }
        for (std::size_t c = 0; c <= remaining; ++c) {
            point[idx] = double(c) / double(subdivisions);
            rec(idx + 1, remaining - c);
        }
    };
    rec(0, subdivisions);
    return grid;
}

}  // namespace stopval
