#include "stopval/fees.hpp"

#include <stdexcept>

namespace stopval {

namespace {

void require_nonneg(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string("fee scheme: negative ") + what);
}

}  // namespace

History extend(History h, SignalBatch batch) {
    h.push_back(std::move(batch));
    return h;
}

FeeScheme FeeScheme::zero() { return FeeScheme(Kind::zero); }

FeeScheme FeeScheme::upfront(double phi) {
    require_nonneg(phi, "upfront fee");
    FeeScheme f(Kind::upfront);
    f.amount_ = phi;
    return f;
}

FeeScheme FeeScheme::flat(double per_signal) {
    require_nonneg(per_signal, "flat fee");
    FeeScheme f(Kind::flat);
    f.amount_ = per_signal;
    return f;
}

FeeScheme FeeScheme::schedule(std::vector<double> fees) {
    for (double v : fees) require_nonneg(v, "schedule entry");
    FeeScheme f(Kind::schedule);
    f.schedule_ = std::move(fees);
    return f;
}

FeeScheme FeeScheme::delayed_lump(int delay_periods, double phi) {
    if (delay_periods < 0) throw std::invalid_argument("fee scheme: negative delay");
    require_nonneg(phi, "lump payment");
    FeeScheme f(Kind::delayed_lump);
    f.delay_ = delay_periods;
    f.amount_ = phi;
    return f;
}

FeeScheme FeeScheme::explicit_tree(std::map<History, double> fees) {
    for (const auto& [h, v] : fees) require_nonneg(v, "tree entry");
    FeeScheme f(Kind::explicit_tree);
    f.tree_ = std::move(fees);
    return f;
}

double FeeScheme::raw_fee(const History& h) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::upfront: return h.empty() ? amount_ : 0.0;
        case Kind::flat: return h.empty() ? 0.0 : amount_;
        case Kind::schedule:
            return h.size() < schedule_.size() ? schedule_[h.size()] : 0.0;
        case Kind::delayed_lump: return int(h.size()) == delay_ ? amount_ : 0.0;
        case Kind::explicit_tree: {
            auto it = tree_.find(h);
            return it == tree_.end() ? 0.0 : it->second;
        }
    }
    return 0.0;
}

double FeeScheme::effective_fee(const History& h, double discount) const {
    const double raw = raw_fee(h);
    if (h.empty() || timing_ == Timing::next_period) return raw;
    return raw / discount;
}

bool FeeScheme::is_zero() const {
    switch (kind_) {
        case Kind::zero: return true;
        case Kind::upfront:
        case Kind::flat:
        case Kind::delayed_lump: return amount_ == 0.0;
        case Kind::schedule:
            for (double v : schedule_)
                if (v != 0.0) return false;
            return true;
        case Kind::explicit_tree:
            for (const auto& [h, v] : tree_)
                if (v != 0.0) return false;
            return true;
    }
    return false;
}

FeeScheme timing_transform(const FeeScheme& fee, double delta) {
    if (!(delta > 0.0) || delta > 1.0)
        throw InvalidDiscount("timing_transform: discount must lie in (0, 1]");
    const bool to_immediate = fee.timing() == FeeScheme::Timing::next_period;
    const double scale = to_immediate ? delta : 1.0 / delta;
    const auto new_timing =
        to_immediate ? FeeScheme::Timing::immediate : FeeScheme::Timing::next_period;

    FeeScheme out = fee;
    switch (fee.kind()) {
        case FeeScheme::Kind::zero:
        case FeeScheme::Kind::upfront:
            break;  // lump sum at the empty history is timing-invariant
        case FeeScheme::Kind::flat:
            out = FeeScheme::flat(fee.amount() * scale);
            break;
        case FeeScheme::Kind::schedule: {
            std::vector<double> fees = fee.schedule_fees();
            for (std::size_t n = 1; n < fees.size(); ++n) fees[n] *= scale;
            out = FeeScheme::schedule(std::move(fees));
            break;
        }
        case FeeScheme::Kind::delayed_lump:
            out = fee.delay() == 0 ? fee
                                   : FeeScheme::delayed_lump(fee.delay(), fee.amount() * scale);
            break;
        case FeeScheme::Kind::explicit_tree: {
            std::map<History, double> fees = fee.tree_fees();
            for (auto& [h, v] : fees)
                if (!h.empty()) v *= scale;
            out = FeeScheme::explicit_tree(std::move(fees));
            break;
        }
    }
    out.set_timing(new_timing);
    return out;
}

const char* to_string(FeeScheme::Kind k) {
    switch (k) {
        case FeeScheme::Kind::zero: return "zero";
        case FeeScheme::Kind::upfront: return "upfront";
        case FeeScheme::Kind::flat: return "flat";
        case FeeScheme::Kind::schedule: return "schedule";
        case FeeScheme::Kind::delayed_lump: return "delayed_lump";
        case FeeScheme::Kind::explicit_tree: return "explicit_tree";
    }
    return "?";
}

const char* to_string(FeeScheme::Timing t) {
    return t == FeeScheme::Timing::next_period ? "next_period" : "immediate";
}

}  // namespace stopval
