#include "stopval/stopping_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "stopval/rng.hpp"

namespace stopval {

std::vector<double> StoppingTimeDist::cdf() const {
    std::vector<double> out(pmf.size());
    double run = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        run += pmf[i];
        out[i] = run;
    }
    return out;
}

double StoppingTimeDist::total_mass() const {
    double s = never_mass;
    for (double p : pmf) s += p;
    return s;
}

StopPolicy StopPolicy::finite(const FiniteSolution& solution) {
    StopPolicy p;
    p.stationary_ = false;
    for (const auto& layer : solution.layers) p.layers_.push_back(layer.value);
    return p;
}

StopPolicy StopPolicy::stationary(PwlcValue value) {
    StopPolicy p;
    p.stationary_ = true;
    p.layers_.push_back(std::move(value));
    return p;
}

bool StopPolicy::stops(const Belief& mu, int period, const StoppingProblem& problem,
                       double tie_tol) const {
    if (!stationary_ && period >= int(layers_.size()) - 1)
        return true;  // terminal period: stopping or waiting out both end the problem
    const PwlcValue& layer = stationary_ ? layers_.front() : layers_[period];
    return decide(layer, problem, mu, false, tie_tol).kind != Decision::acquire;
}

namespace {

struct BeliefKey {
    std::vector<long long> quantized;
    bool operator<(const BeliefKey& o) const { return quantized < o.quantized; }
};

BeliefKey key_of(const Belief& mu) {
    BeliefKey k;
    k.quantized.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        k.quantized[i] = llround(mu[i] * 1e12);
    return k;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("STOPVAL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

}  // namespace

StoppingTimeDist exact_distribution(const StoppingProblem& problem, const StopPolicy& policy,
                                    std::size_t n_max) {
    if (problem.has_transition() && !problem.transition->is_identity(1e-15))
        throw std::invalid_argument(
            "exact_distribution: only time-invariant states are supported");
    const std::size_t m = problem.states();

    StoppingTimeDist dist;
    dist.source = StoppingTimeDist::Source::exact;
    dist.pmf.assign(n_max + 1, 0.0);
    dist.pmf_by_state.assign(m, std::vector<double>(n_max + 1, 0.0));

    // Active buckets: belief -> mass conditional on each initial state.
    std::map<BeliefKey, std::pair<Belief, std::vector<double>>> active;
    active.emplace(key_of(problem.prior),
                   std::make_pair(problem.prior, std::vector<double>(m, 1.0)));

    for (std::size_t n = 0; n <= n_max && !active.empty(); ++n) {
        std::map<BeliefKey, std::pair<Belief, std::vector<double>>> next;
        for (const auto& [key, entry] : active) {
            const auto& [mu, mass] = entry;
            if (policy.stops(mu, int(n), problem)) {
                for (std::size_t t = 0; t < m; ++t) dist.pmf_by_state[t][n] += mass[t];
                continue;
            }
            if (n == n_max) {  // truncation: survivors become never-mass
                for (std::size_t t = 0; t < m; ++t)
                    dist.never_mass += problem.prior[t] * mass[t];
                continue;
            }
            const std::vector<double> alpha = signal_marginal(mu, problem.info);
            for (std::size_t s = 0; s < problem.signals(); ++s) {
                if (alpha[s] <= 1e-15) continue;
                const Belief post = bayes_update(mu, problem.info, s);
                std::vector<double> child_mass(m);
                for (std::size_t t = 0; t < m; ++t)
                    child_mass[t] = mass[t] * problem.info.likelihood(t, s);
                auto [it, inserted] =
                    next.emplace(key_of(post), std::make_pair(post, child_mass));
                if (!inserted)
                    for (std::size_t t = 0; t < m; ++t) it->second.second[t] += child_mass[t];
            }
        }
        active = std::move(next);
    }
    for (std::size_t n = 0; n <= n_max; ++n)
        for (std::size_t t = 0; t < m; ++t)
            dist.pmf[n] += problem.prior[t] * dist.pmf_by_state[t][n];
    return dist;
}

StoppingTimeDist simulate_distribution(const StoppingProblem& problem,
                                       const StopPolicy& policy, std::uint64_t trials,
                                       std::uint64_t seed, std::size_t n_max,
                                       unsigned threads) {
    if (trials == 0) throw std::invalid_argument("simulate_distribution: need trials >= 1");
    const unsigned n_threads = std::min<std::uint64_t>(resolve_threads(threads), trials);
    const SplitRng master(seed);

    std::vector<std::vector<std::uint64_t>> counts(n_threads,
                                                   std::vector<std::uint64_t>(n_max + 2, 0));
    auto worker = [&](unsigned widx, std::uint64_t lo, std::uint64_t hi) {
        auto& local = counts[widx];
        for (std::uint64_t trial = lo; trial < hi; ++trial) {
            SplitRng rng = master.substream(trial);
            std::size_t state = rng.next_index(problem.prior.probs());
            Belief mu = problem.prior;
            bool stopped = false;
            for (std::size_t n = 0; n <= n_max; ++n) {
                if (policy.stops(mu, int(n), problem)) {
                    ++local[n];
                    stopped = true;
                    break;
                }
                if (problem.has_transition()) {
                    // The state itself drifts before the next signal.
                    std::vector<double> row(problem.states());
                    for (std::size_t j = 0; j < problem.states(); ++j)
                        row[j] = (*problem.transition)(state, j);
                    state = rng.next_index(row);
                    mu = markov_push(mu, *problem.transition);
                }
                std::vector<double> like(problem.signals());
                for (std::size_t s = 0; s < problem.signals(); ++s)
                    like[s] = problem.info.likelihood(state, s);
                const std::size_t signal = rng.next_index(like);
                mu = bayes_update(mu, problem.info, signal);
            }
            if (!stopped) ++local[n_max + 1];
        }
    };

    if (n_threads <= 1) {
        worker(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (trials + n_threads - 1) / n_threads;
        for (unsigned w = 0; w < n_threads; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    StoppingTimeDist dist;
    dist.source = StoppingTimeDist::Source::monte_carlo;
    dist.trials = trials;
    dist.seed = seed;
    dist.pmf.assign(n_max + 1, 0.0);
    std::uint64_t never = 0;
    for (const auto& local : counts) {
        for (std::size_t n = 0; n <= n_max; ++n) dist.pmf[n] += double(local[n]);
        never += local[n_max + 1];
    }
    for (double& p : dist.pmf) p /= double(trials);
    dist.never_mass = double(never) / double(trials);
    return dist;
}

std::vector<double> random_walk_hitting_pmf(double p, std::size_t n_terms) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("random_walk_hitting_pmf: p must lie in (0,1)");
    std::vector<double> masses;
    masses.reserve(n_terms);
    double mass = p;  // P(1) = p
    for (std::size_t n = 1; n <= n_terms; ++n) {
        masses.push_back(mass);
        // P(2(n+1)-1) / P(2n-1) = 2 p (1-p) (2n-1)/(n+1).
        mass *= 2.0 * p * (1.0 - p) * double(2 * n - 1) / double(n + 1);
    }
    return masses;
}

StoppingTimeDist one_step_walk_distribution(double p, double mu0, std::size_t n_max) {
    if (!(mu0 >= 0.0) || !(mu0 <= 1.0))
        throw std::invalid_argument("one_step_walk_distribution: prior outside [0,1]");
    const std::size_t terms = n_max / 2 + 1;
    const std::vector<double> up = random_walk_hitting_pmf(p, terms);
    const std::vector<double> down = random_walk_hitting_pmf(1.0 - p, terms);
    StoppingTimeDist dist;
    dist.source = StoppingTimeDist::Source::closed_form;
    dist.pmf.assign(n_max + 1, 0.0);
    for (std::size_t n = 1; 2 * n - 1 <= n_max; ++n)
        dist.pmf[2 * n - 1] = mu0 * up[n - 1] + (1.0 - mu0) * down[n - 1];
    double total = 0.0;
    for (double v : dist.pmf) total += v;
    dist.never_mass = std::max(0.0, 1.0 - total);
    return dist;
}

namespace {

struct CdfPair {
    std::vector<double> p, q;
};

CdfPair padded_cdfs(const StoppingTimeDist& p, const StoppingTimeDist& q) {
    CdfPair c{p.cdf(), q.cdf()};
    const std::size_t n = std::max(c.p.size(), c.q.size());
    const double pl = c.p.empty() ? 0.0 : c.p.back();
    const double ql = c.q.empty() ? 0.0 : c.q.back();
    c.p.resize(n, pl);
    c.q.resize(n, ql);
    return c;
}

DominanceVerdict verdict_from(bool p_le, bool p_strict, bool q_le, bool q_strict) {
    if (p_le && q_le) return DominanceVerdict::equal;
    if (p_le && p_strict) return DominanceVerdict::P_dominates;
    if (q_le && q_strict) return DominanceVerdict::Q_dominates;
    return DominanceVerdict::neither;
}

}  // namespace

const char* to_string(DominanceVerdict v) {
    switch (v) {
        case DominanceVerdict::P_dominates: return "P_dominates";
        case DominanceVerdict::Q_dominates: return "Q_dominates";
        case DominanceVerdict::equal: return "equal";
        case DominanceVerdict::neither: return "neither";
    }
    return "?";
}

DominanceVerdict fosd_check(const StoppingTimeDist& p, const StoppingTimeDist& q,
                            double tol) {
    const CdfPair c = padded_cdfs(p, q);
    bool p_le = true, q_le = true, p_strict = false, q_strict = false;
    for (std::size_t i = 0; i < c.p.size(); ++i) {
        if (c.p[i] > c.q[i] + tol) p_le = false;
        if (c.q[i] > c.p[i] + tol) q_le = false;
        if (c.p[i] < c.q[i] - tol) p_strict = true;
        if (c.q[i] < c.p[i] - tol) q_strict = true;
    }
    return verdict_from(p_le, p_strict, q_le, q_strict);
}

DominanceVerdict ssd_check(const StoppingTimeDist& p, const StoppingTimeDist& q, double tol) {
    const CdfPair c = padded_cdfs(p, q);
    bool p_le = true, q_le = true, p_strict = false, q_strict = false;
    double ip = 0.0, iq = 0.0;
    for (std::size_t i = 0; i < c.p.size(); ++i) {
        ip += c.p[i];
        iq += c.q[i];
        if (ip > iq + tol) p_le = false;
        if (iq > ip + tol) q_le = false;
        if (ip < iq - tol) p_strict = true;
        if (iq < ip - tol) q_strict = true;
    }
    // Beyond the grid both integrals grow linearly at the terminal CDF levels;
    // a steeper slope eventually violates the inequality.
    const double slope_p = c.p.empty() ? 0.0 : c.p.back();
    const double slope_q = c.q.empty() ? 0.0 : c.q.back();
    if (slope_p > slope_q + tol) {
        p_le = false;
        q_strict = true;
    } else if (slope_q > slope_p + tol) {
        q_le = false;
        p_strict = true;
    }
    return verdict_from(p_le, p_strict, q_le, q_strict);
}

}  // namespace stopval
