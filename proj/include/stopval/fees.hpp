#pragma once

#include <map>
#include <vector>

#include "stopval/errors.hpp"

namespace stopval {

/// One purchase event: the signals received in that period (size 1 except in
/// the multi-signal extension).
using SignalBatch = std::vector<int>;

/// Sequence of purchase events; the empty history is period 0 before any
/// acquisition.
using History = std::vector<SignalBatch>;

History extend(History h, SignalBatch batch);

/// Non-negative payment attached to each signal history. Under the default
/// `next_period` timing the fee keyed by h_{n+1} is paid in period n+1 after
/// acquiring at period n; the fee at the empty history is a lump sum paid at
/// period 0 upon acceptance. `immediate` timing pays the same keyed fee one
/// period earlier, which is equivalent to a next-period scheme scaled by
/// 1/discount (the period-0 lump sum is unaffected).
class FeeScheme {
  public:
    enum class Kind { zero, upfront, flat, schedule, delayed_lump, explicit_tree };
    enum class Timing { next_period, immediate };

    static FeeScheme zero();
    static FeeScheme upfront(double phi);
    static FeeScheme flat(double per_signal);
    /// fees[n] is charged at every history of length n; fees[0] is the lump sum.
    static FeeScheme schedule(std::vector<double> fees);
    /// Single payment `phi` at every length-K history (K = 0 is an upfront fee).
    static FeeScheme delayed_lump(int delay_periods, double phi);
    static FeeScheme explicit_tree(std::map<History, double> fees);

    Kind kind() const { return kind_; }
    Timing timing() const { return timing_; }
    FeeScheme& set_timing(Timing t) {
        timing_ = t;
        return *this;
    }

    /// Fee as quoted for the given history (zero for unknown tree histories).
    double raw_fee(const History& h) const;

    /// Next-period-equivalent fee used by every solver: immediate-timing fees
    /// at non-empty histories are scaled by 1/discount.
    double effective_fee(const History& h, double discount) const;

    bool is_zero() const;

    double amount() const { return amount_; }
    int delay() const { return delay_; }
    const std::vector<double>& schedule_fees() const { return schedule_; }
    const std::map<History, double>& tree_fees() const { return tree_; }

  private:
    FeeScheme(Kind k) : kind_(k) {}

    Kind kind_ = Kind::zero;
    Timing timing_ = Timing::next_period;
    double amount_ = 0.0;
    int delay_ = 0;
    std::vector<double> schedule_;
    std::map<History, double> tree_;
};

/// Re-expresses a scheme under the other payment-timing convention, scaling
/// fees so that evaluation is unchanged: next_period -> immediate multiplies
/// non-lump fees by delta, the reverse divides. Round-tripping restores the
/// original fees exactly.
FeeScheme timing_transform(const FeeScheme& fee, double delta);

const char* to_string(FeeScheme::Kind k);
const char* to_string(FeeScheme::Timing t);

}  // namespace stopval
