#include "stopval/pwlc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stopval/simplex.hpp"

namespace stopval {

double dot(const std::vector<double>& alpha, const Belief& mu) {
    double v = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) v += alpha[i] * mu[i];
    return v;
}

double value_at(const PwlcValue& v, const Belief& mu) {
    if (v.alphas.empty()) throw std::invalid_argument("value_at: empty alpha set");
    double best = dot(v.alphas.front().coeffs, mu);
    for (std::size_t i = 1; i < v.alphas.size(); ++i)
        best = std::max(best, dot(v.alphas[i].coeffs, mu));
    return best;
}

std::size_t best_alpha(const PwlcValue& v, const Belief& mu, double tie_tol) {
    std::size_t best = 0;
    double best_val = dot(v.alphas.front().coeffs, mu);
    for (std::size_t i = 1; i < v.alphas.size(); ++i) {
        const double val = dot(v.alphas[i].coeffs, mu);
        if (val > best_val + tie_tol) {
            best = i;
            best_val = val;
        }
    }
    return best;
}

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i] - tol) return false;
    return true;
}

// Upper envelope of the lines value(x) = c1 + (c0 - c1) x. Returns the hull in
// slope order together with the x where each line starts to lead. Earlier
// alphas win exact ties, which keeps stopping vectors ahead of continuation
// vectors.
struct EnvelopeLine {
    double slope, inter;
    std::size_t idx;
};

struct Envelope {
    std::vector<EnvelopeLine> hull;
    std::vector<double> from;  // from[i]: x where hull[i] starts to lead
};

Envelope upper_envelope(const PwlcValue& v) {
    std::vector<EnvelopeLine> lines;
    lines.reserve(v.alphas.size());
    for (std::size_t i = 0; i < v.alphas.size(); ++i)
        lines.push_back({v.alphas[i].coeffs[0] - v.alphas[i].coeffs[1],
                         v.alphas[i].coeffs[1], i});
    std::sort(lines.begin(), lines.end(), [](const EnvelopeLine& a, const EnvelopeLine& b) {
        if (a.slope != b.slope) return a.slope < b.slope;
        if (a.inter != b.inter) return a.inter > b.inter;
        return a.idx < b.idx;
    });

    Envelope env;
    auto crossing = [](const EnvelopeLine& a, const EnvelopeLine& b) {
        return (a.inter - b.inter) / (b.slope - a.slope);
    };
    for (const EnvelopeLine& l : lines) {
        if (!env.hull.empty() && l.slope == env.hull.back().slope) continue;
        double x = -std::numeric_limits<double>::infinity();
        while (!env.hull.empty()) {
            x = crossing(env.hull.back(), l);
            if (env.hull.size() > 1 && x <= env.from.back()) {
                env.hull.pop_back();
                env.from.pop_back();
            } else {
                break;
            }
        }
        env.from.push_back(env.hull.empty() ? -std::numeric_limits<double>::infinity() : x);
        env.hull.push_back(l);
    }
    return env;
}

// Exact two-state prune: keep exactly the lines on the upper envelope whose
// leading interval meets [0,1].
PwlcValue prune_two_state(PwlcValue v) {
    const Envelope env = upper_envelope(v);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < env.hull.size(); ++i) {
        const double lo = env.from[i];
        const double hi = i + 1 < env.hull.size() ? env.from[i + 1]
                                                  : std::numeric_limits<double>::infinity();
        if (hi >= 0.0 && lo <= 1.0) keep.push_back(env.hull[i].idx);
    }
    std::sort(keep.begin(), keep.end());
    PwlcValue out;
    out.alphas.reserve(keep.size());
    for (std::size_t idx : keep) out.alphas.push_back(std::move(v.alphas[idx]));
    return out;
}

}  // namespace

std::vector<PwlSegment> envelope_segments(const PwlcValue& v) {
    const Envelope env = upper_envelope(v);
    std::vector<PwlSegment> segs;
    segs.reserve(env.hull.size());
    for (std::size_t i = 0; i < env.hull.size(); ++i) {
        const double lo = env.from[i];
        const double hi = i + 1 < env.hull.size() ? env.from[i + 1]
                                                  : std::numeric_limits<double>::infinity();
        if (hi < 0.0 || lo > 1.0) continue;
        segs.push_back({lo, env.hull[i].idx});
    }
    return segs;
}

PwlcValue simplify_two_state(PwlcValue v, double max_loss) {
    if (v.states() != 2 || v.alphas.size() <= 2 || !(max_loss > 0.0)) return v;
    const std::vector<PwlSegment> segs = envelope_segments(v);
    if (segs.size() <= 2) return v;

    auto line_at = [&](std::size_t seg, double x) {
        const auto& c = v.alphas[segs[seg].alpha_index].coeffs;
        return c[1] + (c[0] - c[1]) * x;
    };
    auto crossing_x = [&](std::size_t a, std::size_t c) {
        const auto& ca = v.alphas[segs[a].alpha_index].coeffs;
        const auto& cc = v.alphas[segs[c].alpha_index].coeffs;
        const double denom = (cc[0] - cc[1]) - (ca[0] - ca[1]);
        if (std::abs(denom) < 1e-300) return 0.5;
        return std::clamp((ca[1] - cc[1]) / denom, 0.0, 1.0);
    };

    std::vector<std::size_t> keep = {0};
    std::size_t i = 1;
    while (i < segs.size()) {
        if (i + 1 == segs.size()) {
            keep.push_back(i);
            break;
        }
        const std::size_t a = keep.back();
        const double x = crossing_x(a, i + 1);
        const double loss = line_at(i, x) - std::max(line_at(a, x), line_at(i + 1, x));
        if (loss < max_loss) {
            keep.push_back(i + 1);  // drop piece i, pin its right neighbor
            i += 2;
        } else {
            keep.push_back(i);
            ++i;
        }
    }

    std::vector<std::size_t> alpha_ids;
    alpha_ids.reserve(keep.size());
    for (std::size_t s : keep) alpha_ids.push_back(segs[s].alpha_index);
    std::sort(alpha_ids.begin(), alpha_ids.end());
    PwlcValue out;
    out.alphas.reserve(alpha_ids.size());
    for (std::size_t idx : alpha_ids) out.alphas.push_back(std::move(v.alphas[idx]));
    return out;
}

namespace {

// Best achievable margin of `candidate` over every vector in `others`:
//   max d  s.t.  mu.(candidate - other) >= d  for all others,  mu in simplex.
double witness_margin(const std::vector<double>& candidate,
                      const std::vector<AlphaVector>& others,
                      const std::vector<std::size_t>& other_idx) {
    const std::size_t m = candidate.size();
    const std::size_t k = other_idx.size();
    // Variables: mu (m), d+, d-, surplus per opponent (k).
    LinearProgram lp;
    lp.a = Matrix(k + 1, m + 2 + k);
    lp.b.assign(k + 1, 0.0);
    lp.c.assign(m + 2 + k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
        const auto& other = others[other_idx[r]].coeffs;
        for (std::size_t i = 0; i < m; ++i) lp.a(r, i) = candidate[i] - other[i];
        lp.a(r, m) = -1.0;
        lp.a(r, m + 1) = 1.0;
        lp.a(r, m + 2 + r) = -1.0;
    }
    for (std::size_t i = 0; i < m; ++i) lp.a(k, i) = 1.0;
    lp.b[k] = 1.0;
    lp.c[m] = -1.0;  // maximize d = d+ - d-
    lp.c[m + 1] = 1.0;

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) return 0.0;  // keep on numerical trouble
    return -sol.objective;
}

}  // namespace

PwlcValue prune(PwlcValue v, double witness_tol) {
    if (v.alphas.size() <= 1) return v;
    if (v.states() == 2) return prune_two_state(std::move(v));

    // Pass 1: duplicates and pointwise domination.
    std::vector<AlphaVector> kept;
    for (auto& cand : v.alphas) {
        bool drop = false;
        for (const auto& k : kept)
            if (dominates(k.coeffs, cand.coeffs, kProbTolerance)) {
                drop = true;
                break;
            }
        if (drop) continue;
        std::erase_if(kept, [&](const AlphaVector& k) {
            return dominates(cand.coeffs, k.coeffs, kProbTolerance) &&
                   !dominates(k.coeffs, cand.coeffs, kProbTolerance);
        });
        kept.push_back(std::move(cand));
    }
    if (kept.size() <= 1) return PwlcValue{std::move(kept)};

    // Pass 2: LP witness. An alpha survives only if it attains the envelope
    // somewhere with margin above -witness_tol.
    std::vector<bool> alive(kept.size(), true);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i && alive[j]) others.push_back(j);
        if (others.empty()) continue;
        if (witness_margin(kept[i].coeffs, kept, others) < -witness_tol) alive[i] = false;
    }
    PwlcValue out;
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (alive[i]) out.alphas.push_back(std::move(kept[i]));
    return out;
}

double sup_diff_two_state(const PwlcValue& a, const PwlcValue& b) {
    if (a.states() != 2 || b.states() != 2)
        throw std::invalid_argument("sup_diff_two_state: needs two-state value functions");
    // Both values are convex piecewise-linear, so their difference is linear
    // between envelope breakpoints; the sup is attained at a breakpoint of
    // either envelope or at an endpoint.
    std::vector<double> xs = {0.0, 1.0};
    for (const PwlcValue* v : {&a, &b}) {
        const Envelope env = upper_envelope(*v);
        for (double x : env.from)
            if (x > 0.0 && x < 1.0) xs.push_back(x);
    }
    double worst = 0.0;
    for (double x : xs) {
        const Belief mu({x, 1.0 - x});
        worst = std::max(worst, std::abs(value_at(a, mu) - value_at(b, mu)));
    }
    return worst;
}

double sup_diff_on_grid(const PwlcValue& a, const PwlcValue& b,
                        const std::vector<Belief>& grid) {
    double worst = 0.0;
    for (const auto& mu : grid)
        worst = std::max(worst, std::abs(value_at(a, mu) - value_at(b, mu)));
    return worst;
}

std::vector<Belief> two_state_grid(std::size_t points) {
    std::vector<Belief> grid;
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = points == 1 ? 0.5 : double(i) / double(points - 1);
        grid.emplace_back(std::vector<double>{x, 1.0 - x});
    }
    return grid;
}

}  // namespace stopval
