#include "stopval/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stopval/version.hpp"

namespace stopval {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing");
    return j.at(key);
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(path, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::vector<double>> number_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a matrix (array of rows)");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_list(j.at(i), path + "[" + std::to_string(i) + "]"));
    for (const auto& row : out)
        if (row.size() != out.front().size()) throw ConfigError(path, "ragged matrix rows");
    return out;
}

FeeScheme parse_fee(const json& j) {
    if (!j.is_object()) throw ConfigError("fee", "expected an object");
    const std::string variant = require(j, "variant", "fee").get<std::string>();
    FeeScheme fee = FeeScheme::zero();
    try {
        if (variant == "zero") {
            fee = FeeScheme::zero();
        } else if (variant == "upfront") {
            fee = FeeScheme::upfront(require(j, "amount", "fee").get<double>());
        } else if (variant == "flat") {
            fee = FeeScheme::flat(require(j, "amount", "fee").get<double>());
        } else if (variant == "schedule") {
            fee = FeeScheme::schedule(number_list(require(j, "fees", "fee"), "fee.fees"));
        } else if (variant == "delayed_lump") {
            fee = FeeScheme::delayed_lump(require(j, "delay", "fee").get<int>(),
                                          require(j, "amount", "fee").get<double>());
        } else if (variant == "explicit_tree") {
            std::map<History, double> fees;
            const json& entries = require(j, "fees", "fee");
            if (!entries.is_array()) throw ConfigError("fee.fees", "expected an array");
            for (const auto& e : entries) {
                History h;
                for (const auto& batch : require(e, "history", "fee.fees")) {
                    SignalBatch b;
                    for (const auto& s : batch) b.push_back(s.get<int>());
                    h.push_back(std::move(b));
                }
                fees[h] = require(e, "fee", "fee.fees").get<double>();
            }
            fee = FeeScheme::explicit_tree(std::move(fees));
        } else {
            throw ConfigError("fee.variant", "unknown variant '" + variant + "'");
        }
    } catch (const std::invalid_argument& err) {
        throw ConfigError("fee", err.what());
    }
    if (j.contains("timing")) {
        const std::string timing = j.at("timing").get<std::string>();
        if (timing == "immediate")
            fee.set_timing(FeeScheme::Timing::immediate);
        else if (timing == "next_period")
            fee.set_timing(FeeScheme::Timing::next_period);
        else
            throw ConfigError("fee.timing", "expected 'next_period' or 'immediate'");
    }
    return fee;
}

json fee_to_json(const FeeScheme& fee) {
    json j;
    j["variant"] = to_string(fee.kind());
    j["timing"] = to_string(fee.timing());
    switch (fee.kind()) {
        case FeeScheme::Kind::zero: break;
        case FeeScheme::Kind::upfront:
        case FeeScheme::Kind::flat: j["amount"] = fee.amount(); break;
        case FeeScheme::Kind::schedule: j["fees"] = fee.schedule_fees(); break;
        case FeeScheme::Kind::delayed_lump:
            j["delay"] = fee.delay();
            j["amount"] = fee.amount();
            break;
        case FeeScheme::Kind::explicit_tree: {
            json entries = json::array();
            for (const auto& [h, v] : fee.tree_fees()) {
                json e;
                e["history"] = h;
                e["fee"] = v;
                entries.push_back(std::move(e));
            }
            j["fees"] = std::move(entries);
            break;
        }
    }
    return j;
}

}  // namespace

StoppingProblem ProblemConfig::to_problem() const {
    try {
        Belief mu = [&] {
            try {
                return Belief(prior);
            } catch (const std::invalid_argument& err) {
                throw ConfigError("prior", err.what());
            }
        }();
        InfoStructure s = [&] {
            try {
                return InfoStructure(Matrix::from_rows(info_rows));
            } catch (const std::invalid_argument& err) {
                throw ConfigError("info_structure", err.what());
            }
        }();
        std::optional<MarkovTransition> tau;
        if (transition_rows) {
            try {
                tau = MarkovTransition(Matrix::from_rows(*transition_rows));
            } catch (const std::invalid_argument& err) {
                throw ConfigError("transition", err.what());
            }
        }
        return StoppingProblem(Matrix::from_rows(payoffs), include_outside_option, discount,
                               horizon_infinite ? Horizon::infinite() : Horizon::finite(horizon),
                               std::move(mu), std::move(s), std::move(tau));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& err) {
        throw ConfigError("problem", err.what());
    }
}

ProblemConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError("", std::string("invalid JSON: ") + err.what());
    }
    ProblemConfig cfg;

    const json& states = require(j, "states", "");
    if (!states.is_array() || states.size() < 2)
        throw ConfigError("states", "need at least two state labels");
    for (const auto& s : states) cfg.state_labels.push_back(s.get<std::string>());

    const json& actions = require(j, "actions", "");
    for (const auto& a : require(actions, "labels", "actions"))
        cfg.action_labels.push_back(a.get<std::string>());
    cfg.payoffs = number_matrix(require(actions, "payoffs", "actions"), "actions.payoffs");
    if (cfg.payoffs.size() != cfg.action_labels.size())
        throw ConfigError("actions.payoffs", "one payoff row per action label required");
    for (const auto& row : cfg.payoffs)
        if (row.size() != cfg.state_labels.size())
            throw ConfigError("actions.payoffs", "payoff columns must match the state count");

    if (j.contains("include_outside_option"))
        cfg.include_outside_option = j.at("include_outside_option").get<bool>();

    const json& discount = require(j, "discount", "");
    if (!discount.is_number()) throw ConfigError("discount", "expected a number");
    cfg.discount = discount.get<double>();
    if (!(cfg.discount > 0.0) || cfg.discount > 1.0)
        throw ConfigError("discount", "must lie in (0, 1]");

    const json& horizon = require(j, "horizon", "");
    if (horizon.is_string() && horizon.get<std::string>() == "inf") {
        cfg.horizon_infinite = true;
    } else if (horizon.is_number_integer() && horizon.get<int>() >= 0) {
        cfg.horizon = horizon.get<int>();
    } else {
        throw ConfigError("horizon", "expected a non-negative integer or \"inf\"");
    }

    cfg.prior = number_list(require(j, "prior", ""), "prior");
    if (cfg.prior.size() != cfg.state_labels.size())
        throw ConfigError("prior", "length must match the state count");
    {
        double sum = 0.0;
        for (double p : cfg.prior) {
            if (p < 0.0) throw ConfigError("prior", "negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw ConfigError("prior", "entries sum to " + std::to_string(sum) + ", expected 1");
    }

    cfg.info_rows = number_matrix(require(j, "info_structure", ""), "info_structure");
    if (cfg.info_rows.size() != cfg.state_labels.size())
        throw ConfigError("info_structure", "one row per state required");

    if (j.contains("transition"))
        cfg.transition_rows = number_matrix(j.at("transition"), "transition");
    if (j.contains("fee")) cfg.fee = parse_fee(j.at("fee"));
    if (j.contains("quota")) {
        QuotaOptions q;
        q.per_period = require(j.at("quota"), "K", "quota").get<int>();
        q.total = require(j.at("quota"), "L", "quota").get<int>();
        if (q.per_period < 1) throw ConfigError("quota.K", "must be >= 1");
        if (q.total < 0) throw ConfigError("quota.L", "must be >= 0");
        cfg.quota = q;
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        if (s.contains("grid_points")) cfg.solver.grid_points = s.at("grid_points").get<int>();
        if (s.contains("tol")) cfg.solver.tol = s.at("tol").get<double>();
        if (s.contains("tree_budget"))
            cfg.solver.tree_budget = s.at("tree_budget").get<std::size_t>();
        if (s.contains("seed")) cfg.solver.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("n_max")) cfg.solver.n_max = s.at("n_max").get<std::size_t>();
        if (cfg.solver.grid_points < 2) throw ConfigError("solver.grid_points", "must be >= 2");
        if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    }

    cfg.to_problem();  // surface any residual inconsistency with a field path
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string ProblemConfig::to_json_text() const {
    json j;
    j["states"] = state_labels;
    j["actions"]["labels"] = action_labels;
    j["actions"]["payoffs"] = payoffs;
    j["include_outside_option"] = include_outside_option;
    j["discount"] = discount;
    if (horizon_infinite)
        j["horizon"] = "inf";
    else
        j["horizon"] = horizon;
    j["prior"] = prior;
    j["info_structure"] = info_rows;
    if (transition_rows) j["transition"] = *transition_rows;
    if (fee) j["fee"] = fee_to_json(*fee);
    if (quota) {
        j["quota"]["K"] = quota->per_period;
        j["quota"]["L"] = quota->total;
    }
    j["solver"]["grid_points"] = solver.grid_points;
    j["solver"]["tol"] = solver.tol;
    j["solver"]["tree_budget"] = solver.tree_budget;
    j["solver"]["seed"] = solver.seed;
    j["solver"]["n_max"] = solver.n_max;
    return j.dump(2) + "\n";
}

std::string ResultTable::to_csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string format_cell(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_sidecar(const std::string& csv_path, const std::string& config_text,
                   std::uint64_t seed) {
    json meta;
    meta["config_hash"] = config_hash(config_text);
    meta["version"] = kLibraryVersion;
    meta["seed"] = seed;
    write_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace stopval
