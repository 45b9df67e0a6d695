#include "pessiq/serialization.hpp"

#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pessiq/errors.hpp"

namespace pessiq {

namespace {

using nlohmann::json;

constexpr const char* kMdpSchema = "tabular-mdp-v1";
constexpr const char* kPolicySchema = "policy-v1";

json parse_document(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed JSON: {}", what, e.what()));
    }
}

void require_object_with(const json& j, std::initializer_list<const char*> keys, const char* what) {
    if (!j.is_object())
        throw ValidationError(fmt::format("{}: expected a JSON object", what));
    for (const char* k : keys)
        if (!j.contains(k))
            throw ValidationError(fmt::format("{}: missing field \"{}\"", what, k));
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* allowed : keys)
            known = known || k == allowed;
        if (!known)
            throw ValidationError(fmt::format("{}: unknown field \"{}\"", what, k));
    }
}

void require_schema(const json& j, const char* expected, const char* what) {
    if (!j.at("schema").is_string() || j.at("schema").get<std::string>() != expected)
        throw ValidationError(fmt::format("{}: unknown schema {}", what, j.at("schema").dump()));
}

int positive_int(const json& j, const char* key, const char* what) {
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 1)
        throw ValidationError(fmt::format("{}: \"{}\" must be a positive integer", what, key));
    return j.at(key).get<int>();
}

// Walks a nested array of the given shape and appends its leaves in order.
template <typename T>
void flatten(const json& j, std::span<const int> shape, std::vector<T>& out, const std::string& path) {
    if (shape.empty()) {
        if (!j.is_number())
            throw ValidationError(fmt::format("{}: expected a number", path));
        if constexpr (std::is_integral_v<T>) {
            if (!j.is_number_integer())
                throw ValidationError(fmt::format("{}: expected an integer", path));
        }
        out.push_back(j.get<T>());
        return;
    }
    if (!j.is_array() || j.size() != static_cast<std::size_t>(shape[0]))
        throw ValidationError(fmt::format("{}: expected an array of length {}", path, shape[0]));
    for (std::size_t i = 0; i < j.size(); ++i)
        flatten(j[i], shape.subspan(1), out, fmt::format("{}[{}]", path, i));
}

} // namespace

std::string mdp_to_json(const TabularMDP& mdp) {
    const int S = mdp.states(), A = mdp.actions(), H = mdp.horizon();
    json P = json::array(), r = json::array();
    for (int h = 0; h < H; ++h) {
        json Ph = json::array(), rh = json::array();
        for (int s = 0; s < S; ++s) {
            json Phs = json::array(), rhs = json::array();
            for (int a = 0; a < A; ++a) {
                const auto row = mdp.P(h, s, a);
                Phs.push_back(std::vector<double>(row.begin(), row.end()));
                rhs.push_back(mdp.r(h, s, a));
            }
            Ph.push_back(std::move(Phs));
            rh.push_back(std::move(rhs));
        }
        P.push_back(std::move(Ph));
        r.push_back(std::move(rh));
    }
    json doc = {{"schema", kMdpSchema},
                {"S", S},
                {"A", A},
                {"H", H},
                {"P", std::move(P)},
                {"r", std::move(r)},
                {"rho", std::vector<double>(mdp.rho().begin(), mdp.rho().end())}};
    return doc.dump() + "\n";
}

TabularMDP mdp_from_json(const std::string& text) {
    const json j = parse_document(text, "mdp");
    require_object_with(j, {"schema", "S", "A", "H", "P", "r", "rho"}, "mdp");
    require_schema(j, kMdpSchema, "mdp");
    const int S = positive_int(j, "S", "mdp");
    const int A = positive_int(j, "A", "mdp");
    const int H = positive_int(j, "H", "mdp");
    std::vector<double> P, r, rho;
    const int shapeP[] = {H, S, A, S};
    const int shapeR[] = {H, S, A};
    const int shapeRho[] = {S};
    flatten(j.at("P"), shapeP, P, "P");
    flatten(j.at("r"), shapeR, r, "r");
    flatten(j.at("rho"), shapeRho, rho, "rho");
    TabularMDP mdp(S, A, H, std::move(P), std::move(r), std::move(rho));
    require_valid(mdp);
    return mdp;
}

void write_mdp(const TabularMDP& mdp, const std::string& path) {
    write_text_file(path, mdp_to_json(mdp));
}

TabularMDP read_mdp(const std::string& path) {
    return mdp_from_json(read_text_file(path));
}

std::string policy_to_json(const Policy& pi) {
    const int H = pi.horizon(), S = pi.states(), A = pi.actions();
    json table = json::array();
    for (int h = 0; h < H; ++h) {
        json row = json::array();
        for (int s = 0; s < S; ++s) {
            if (pi.is_deterministic()) {
                row.push_back(pi.action(h, s));
            } else {
                const auto p = pi.row(h, s);
                row.push_back(std::vector<double>(p.begin(), p.begin() + A));
            }
        }
        table.push_back(std::move(row));
    }
    json doc = {{"schema", kPolicySchema},
                {"kind", pi.is_deterministic() ? "deterministic" : "stochastic"},
                {"table", std::move(table)}};
    return doc.dump() + "\n";
}

Policy policy_from_json(const std::string& text) {
    const json j = parse_document(text, "policy");
    require_object_with(j, {"schema", "kind", "table"}, "policy");
    require_schema(j, kPolicySchema, "policy");
    const json& table = j.at("table");
    if (!table.is_array() || table.empty() || !table[0].is_array() || table[0].empty())
        throw ValidationError("policy: table must be a non-empty [h][s] array");
    const int H = static_cast<int>(table.size());
    const int S = static_cast<int>(table[0].size());
    const auto kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : std::string();
    if (kind == "deterministic") {
        std::vector<int> actions;
        const int shape[] = {H, S};
        flatten(table, shape, actions, "table");
        // The file does not record A; the smallest consistent action count is
        // used and widened against an MDP on use (see with_action_count).
        int A = 1;
        for (int a : actions)
            A = std::max(A, a + 1);
        return Policy::deterministic(H, S, A, std::move(actions));
    }
    if (kind == "stochastic") {
        if (!table[0][0].is_array() || table[0][0].empty())
            throw ValidationError("policy: stochastic table must be [h][s][a]");
        const int A = static_cast<int>(table[0][0].size());
        std::vector<double> probs;
        const int shape[] = {H, S, A};
        flatten(table, shape, probs, "table");
        return Policy::stochastic(H, S, A, std::move(probs));
    }
    throw ValidationError(fmt::format("policy: unknown kind {}", j.at("kind").dump()));
}

Policy with_action_count(const Policy& pi, int A) {
    if (pi.actions() == A)
        return pi;
    if (!pi.is_deterministic())
        throw ValidationError(fmt::format("policy has {} actions, expected {}", pi.actions(), A));
    return Policy::deterministic(pi.horizon(), pi.states(), A, pi.action_table());
}

void write_policy(const Policy& pi, const std::string& path) {
    write_text_file(path, policy_to_json(pi));
}

Policy read_policy(const std::string& path) {
    return policy_from_json(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out)
        throw IoError("failed writing: " + path);
}

} // namespace pessiq
