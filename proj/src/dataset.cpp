#include "pessiq/dataset.hpp"

#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "pessiq/errors.hpp"

namespace pessiq {

namespace {

constexpr const char* kSchema = "offline-rl-v1";

using nlohmann::json;

// Exact key set check; the format has no optional fields.
void require_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object())
        throw ValidationError(where + ": expected a JSON object");
    for (const char* k : keys)
        if (!j.contains(k))
            throw ValidationError(fmt::format("{}: missing field \"{}\"", where, k));
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* allowed : keys)
            known = known || k == allowed;
        if (!known)
            throw ValidationError(fmt::format("{}: unknown field \"{}\"", where, k));
    }
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("{}: bad field \"{}\": {}", where, key, e.what()));
    }
}

} // namespace

void BatchDataset::validate() const {
    if (meta.S < 1 || meta.A < 1 || meta.H < 1)
        throw ValidationError(fmt::format("dataset dimensions must be positive (S={}, A={}, H={})", meta.S, meta.A,
                                          meta.H));
    if (meta.K < 1)
        throw ValidationError("dataset must contain at least one episode");
    if (episodes.size() != meta.K)
        throw ValidationError(fmt::format("episode count mismatch: header K={} but {} episodes", meta.K,
                                          episodes.size()));
    const auto H = static_cast<std::size_t>(meta.H);
    for (std::size_t k = 0; k < episodes.size(); ++k) {
        const auto& e = episodes[k];
        if (e.states.size() != H || e.actions.size() != H || e.rewards.size() != H)
            throw ValidationError(fmt::format("episode {}: length mismatch, expected H={}", k, H));
        for (std::size_t h = 0; h < H; ++h) {
            if (e.states[h] < 0 || e.states[h] >= meta.S)
                throw ValidationError(fmt::format("episode {} step {}: state out of range: {}", k, h, e.states[h]));
            if (e.actions[h] < 0 || e.actions[h] >= meta.A)
                throw ValidationError(fmt::format("episode {} step {}: action out of range: {}", k, h, e.actions[h]));
            if (!(e.rewards[h] >= 0.0 && e.rewards[h] <= 1.0))
                throw ValidationError(fmt::format("episode {} step {}: reward out of range: {}", k, h, e.rewards[h]));
        }
    }
}

VisitCounts visit_counts(const BatchDataset& ds) {
    VisitCounts c;
    c.H = ds.meta.H;
    c.S = ds.meta.S;
    c.A = ds.meta.A;
    c.N.assign(static_cast<std::size_t>(c.H) * c.S * c.A, 0);
    for (const auto& e : ds.episodes)
        for (int h = 0; h < c.H; ++h)
            ++c.N[(static_cast<std::size_t>(h) * c.S + e.states[h]) * c.A + e.actions[h]];
    return c;
}

void write_dataset(const BatchDataset& ds, std::ostream& out) {
    ds.validate();
    json header = {{"schema", kSchema},
                   {"S", ds.meta.S},
                   {"A", ds.meta.A},
                   {"H", ds.meta.H},
                   {"K", ds.meta.K},
                   {"seed", ds.meta.seed},
                   {"behavior_policy_id", ds.meta.behavior_policy_id}};
    out << header.dump() << '\n';
    for (std::size_t k = 0; k < ds.episodes.size(); ++k) {
        const auto& e = ds.episodes[k];
        json line = {{"k", k}, {"s", e.states}, {"a", e.actions}, {"r", e.rewards}};
        out << line.dump() << '\n';
    }
    if (!out)
        throw IoError("failed writing dataset stream");
}

void write_dataset(const BatchDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    write_dataset(ds, out);
}

BatchDataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("malformed header: empty dataset file");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed header: ") + e.what());
    }
    require_keys(header, {"schema", "S", "A", "H", "K", "seed", "behavior_policy_id"}, "dataset header");
    const auto schema = get_as<std::string>(header, "schema", "dataset header");
    if (schema != kSchema)
        throw ValidationError(fmt::format("malformed header: unknown schema \"{}\"", schema));

    BatchDataset ds;
    ds.meta.S = get_as<int>(header, "S", "dataset header");
    ds.meta.A = get_as<int>(header, "A", "dataset header");
    ds.meta.H = get_as<int>(header, "H", "dataset header");
    ds.meta.K = get_as<std::size_t>(header, "K", "dataset header");
    ds.meta.seed = get_as<std::uint64_t>(header, "seed", "dataset header");
    ds.meta.behavior_policy_id = get_as<std::string>(header, "behavior_policy_id", "dataset header");

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::string where = fmt::format("dataset line {}", lineno);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + ": " + e.what());
        }
        require_keys(rec, {"k", "s", "a", "r"}, where);
        const auto k = get_as<std::size_t>(rec, "k", where);
        if (k != ds.episodes.size())
            throw ValidationError(fmt::format("{}: episode index {} out of order (expected {})", where, k,
                                              ds.episodes.size()));
        Trajectory t;
        t.states = get_as<std::vector<int>>(rec, "s", where);
        t.actions = get_as<std::vector<int>>(rec, "a", where);
        t.rewards = get_as<std::vector<double>>(rec, "r", where);
        ds.episodes.push_back(std::move(t));
    }
    if (in.bad())
        throw IoError("failed reading dataset stream");
    ds.validate();
    return ds;
}

BatchDataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    return read_dataset(in);
}

} // namespace pessiq
