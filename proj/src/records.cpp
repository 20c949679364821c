#include "fiet/records.hpp"

#include <sstream>

#include "fiet/error.hpp"

namespace fiet {

nlohmann::ordered_json fiet_to_json(const FlipIET& f) {
    nlohmann::ordered_json j;
    j["perm"] = f.perm().to_string();
    std::vector<std::string> lengths;
    for (const auto& x : f.lengths().values()) lengths.push_back(x.to_string());
    j["lengths"] = lengths;
    j["backend"] = f.lengths().backend().tag();
    return j;
}

FlipIET fiet_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object() || !j.contains("perm") || !j.contains("lengths"))
            throw ParseError("fIET record needs \"perm\" and \"lengths\"");
        Backend b;
        if (j.contains("backend")) b = Backend::parse(j.at("backend").get<std::string>());
        return make_fiet(j.at("perm").get<std::string>(), j.at("lengths").get<std::vector<std::string>>(), b);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad fIET record: ") + e.what());
    }
}

FlipIET fiet_from_json_text(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad fIET record: ") + e.what());
    }
    return fiet_from_json(j);
}

std::string path_to_jsonl(const RauzyPath& path) {
    std::string out;
    for (const auto& a : path.arrows()) {
        nlohmann::ordered_json j;
        j["case"] = std::string(to_string(a.which));
        j["winner"] = a.winner + 1;
        j["loser"] = a.loser + 1;
        j["from"] = a.from.to_string();
        j["to"] = a.to.to_string();
        out += j.dump();
        out += '\n';
    }
    return out;
}

RauzyPath path_from_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::optional<RauzyPath> path;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            RauzyArrow a{parse_permutation(j.at("from").get<std::string>()),
                         parse_permutation(j.at("to").get<std::string>()),
                         parse_case(j.at("case").get<std::string>()),
                         static_cast<Symbol>(j.at("winner").get<int>() - 1),
                         static_cast<Symbol>(j.at("loser").get<int>() - 1)};
            if (a.winner < 0 || a.loser < 0 || static_cast<std::size_t>(a.winner) >= a.from.size() ||
                static_cast<std::size_t>(a.loser) >= a.from.size())
                throw ParseError("arrow symbol out of range");
            if (!path) path.emplace(a.from);
            path->append(std::move(a));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad path record: ") + e.what());
        }
    }
    if (!path) throw ParseError("empty path");
    return *path;
}

}  // namespace fiet
