#include "dirflow/spec_io.hpp"

#include <fstream>
#include <set>

namespace dirflow {

namespace {

using nlohmann::json;

void require_fields(const json& j, const std::string& where,
                    const std::set<std::string>& allowed,
                    const std::set<std::string>& required) {
    if (!j.is_object()) throw Error(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw Error(where + " has unknown field \"" + key + "\"");
    }
    for (const auto& key : required)
        if (!j.contains(key)) throw Error(where + " is missing field \"" + key + "\"");
}

int to_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw Error(where + " must be an integer");
    return j.get<int>();
}

std::vector<int> per_time_list(const json& j, int horizon, const std::string& where) {
    if (j.is_number_integer())
        return std::vector<int>(static_cast<std::size_t>(horizon), j.get<int>());
    if (!j.is_array()) throw Error(where + " must be an integer or a per-time list");
    if (static_cast<int>(j.size()) != horizon)
        throw Error(where + " must have one entry per time (" + std::to_string(horizon) + ")");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(to_int(e, where));
    return out;
}

std::vector<int> symbol_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(where + " must be a list of symbols");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(to_int(e, where));
    return out;
}

std::uint64_t to_weight(const json& j, const std::string& where) {
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0))
        return j.get<std::uint64_t>();
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw Error(where + " has a non-numeric weight string \"" + s + "\"");
        return std::stoull(s);
    }
    throw Error(where + " weights must be nonnegative integers");
}

std::vector<std::string> split_partition_group(const std::string& group) {
    std::vector<std::string> out;
    for (char c : group) out.push_back(std::string(1, c));
    return out;
}

}  // namespace

SystemSpec spec_from_json(const json& j) {
    require_fields(j, "spec", {"horizon", "signals", "delays", "blocks", "exogenous"},
                   {"horizon", "signals", "delays", "blocks", "exogenous"});

    SystemSpec spec;
    spec.horizon = to_int(j.at("horizon"), "horizon");
    if (spec.horizon < 1) throw Error("horizon must be >= 1");

    const json& signals = j.at("signals");
    std::set<std::string> signal_names = {"r", "p", "s", "q", "e", "x", "y", "u"};
    require_fields(signals, "signals", signal_names, signal_names);
    for (const auto& name : signal_names)
        spec.alphabets[name] = per_time_list(signals.at(name), spec.horizon,
                                             "signals." + name);

    const json& delays = j.at("delays");
    require_fields(delays, "delays", {"s1", "s2", "s3", "s4"}, {"s1", "s2", "s3", "s4"});
    for (int b = 0; b < 4; ++b) {
        auto values = per_time_list(delays.at(kBlockWiring[b].name), spec.horizon,
                                    std::string("delays.") + kBlockWiring[b].name);
        for (int d : values)
            if (d < 0)
                throw Error(std::string("delays.") + kBlockWiring[b].name +
                            " must be nonnegative");
        spec.delays[b] = DelaySchedule(values);
    }

    const json& blocks = j.at("blocks");
    require_fields(blocks, "blocks", {"s1", "s2", "s3", "s4"}, {"s1", "s2", "s3", "s4"});
    for (int b = 0; b < 4; ++b) {
        const std::string where = std::string("blocks.") + kBlockWiring[b].name;
        const json& rows = blocks.at(kBlockWiring[b].name);
        if (!rows.is_array()) throw Error(where + " must be a list of rows");
        CausalBlock block;
        block.name = kBlockWiring[b].name;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 4)
                throw Error(where + " rows must be [time, input-prefix, exogenous-prefix, output]");
            int time = to_int(row[0], where + " time");
            auto input = symbol_list(row[1], where + " input prefix");
            auto exog = symbol_list(row[2], where + " exogenous prefix");
            int output = to_int(row[3], where + " output");
            auto key = std::make_tuple(time, std::move(input), std::move(exog));
            if (block.table.count(key))
                throw Error(where + " has a duplicate row for time " + std::to_string(time));
            block.table.emplace(std::move(key), output);
        }
        spec.blocks[b] = std::move(block);
    }

    const json& exo = j.at("exogenous");
    require_fields(exo, "exogenous", {"partition", "groups"}, {"partition", "groups"});
    const json& partition = exo.at("partition");
    const json& groups = exo.at("groups");
    if (!partition.is_array() || !groups.is_array() || partition.size() != groups.size())
        throw Error("exogenous.partition and exogenous.groups must be lists of equal length");

    for (std::size_t g = 0; g < partition.size(); ++g) {
        if (!partition[g].is_string())
            throw Error("exogenous.partition entries must be strings such as \"rp\"");
        auto signals_in_group = split_partition_group(partition[g].get<std::string>());
        if (signals_in_group.empty()) throw Error("exogenous partition group is empty");

        std::vector<Variable> vars;
        for (const auto& sig : signals_in_group) {
            if (!spec.alphabets.count(sig))
                throw Error("exogenous partition names unknown signal " + sig);
            for (int t = 1; t <= spec.horizon; ++t)
                vars.push_back({{sig, t}, spec.alphabet_of(sig, t)});
        }

        const json& weights = groups[g];
        if (!weights.is_array())
            throw Error("exogenous.groups entries must be weight lists");
        std::vector<std::uint64_t> w;
        for (const auto& e : weights)
            w.push_back(to_weight(e, "exogenous.groups[" + std::to_string(g) + "]"));
        spec.exogenous.push_back(
            {signals_in_group, JointTable::from_dense_weights(std::move(vars), w)});
    }

    return spec;
}

SystemSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open spec file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("spec file " + path + " is not valid JSON: " + e.what());
    }
    return spec_from_json(j);
}

json spec_to_json(const SystemSpec& spec) {
    json j;
    j["horizon"] = spec.horizon;

    json signals = json::object();
    for (const auto& [name, sizes] : spec.alphabets) signals[name] = sizes;
    j["signals"] = signals;

    json delays = json::object();
    for (int b = 0; b < 4; ++b) delays[kBlockWiring[b].name] = spec.delays[b].values();
    j["delays"] = delays;

    json blocks = json::object();
    for (int b = 0; b < 4; ++b) {
        json rows = json::array();
        for (const auto& [key, output] : spec.blocks[b].table) {
            const auto& [time, input, exog] = key;
            rows.push_back(json::array({time, input, exog, output}));
        }
        blocks[kBlockWiring[b].name] = rows;
    }
    j["blocks"] = blocks;

    json partition = json::array();
    json groups = json::array();
    for (const auto& g : spec.exogenous) {
        std::string name;
        for (const auto& sig : g.signals) name += sig;
        partition.push_back(name);

        std::uint64_t span = 1;
        for (const auto& v : g.joint.variables())
            span *= static_cast<std::uint64_t>(v.alphabet);
        std::vector<std::uint64_t> weights(span, 0);
        for (const auto& [key, w] : g.joint.support()) weights[key] = w;
        groups.push_back(weights);
    }
    j["exogenous"] = json{{"partition", partition}, {"groups", groups}};
    return j;
}

void save_spec_file(const SystemSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write spec file " + path);
    out << spec_to_json(spec).dump(2) << "\n";
}

std::uint64_t spec_hash(const SystemSpec& spec) {
    std::string bytes = spec_to_json(spec).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace dirflow
