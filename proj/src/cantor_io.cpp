#include "fdyn/cantor_io.hpp"

#include "fdyn/errors.hpp"

#include <fstream>
#include <sstream>

namespace fdyn {

Rational json_rational(const nlohmann::json& v, const std::string& what)
{
    if (v.is_string())
        return parse_rational(v.get<std::string>());
    if (v.is_number_integer() || v.is_number_unsigned())
        return parse_rational(v.dump());
    if (v.is_number_float())
        return parse_rational(v.dump());
    throw ValidationError(what + ": expected a number or a \"p/q\" string");
}

namespace {

std::pair<Rational, Rational> json_pair(const nlohmann::json& v, const std::string& what)
{
    if (!v.is_array() || v.size() != 2)
        throw ValidationError(what + ": expected a two-element array");
    return {json_rational(v[0], what), json_rational(v[1], what)};
}

const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ValidationError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

BranchMap parse_map(const nlohmann::json& m, const std::string& where)
{
    const auto type = field(m, "type", where).get<std::string>();
    if (type == "affine")
        return AffineMap{json_rational(field(m, "slope", where), where + ".slope"),
                         json_rational(field(m, "offset", where), where + ".offset")};
    if (type == "analytic") {
        AnalyticMap a;
        a.name = field(m, "name", where).get<std::string>();
        for (const auto& p : field(m, "params", where))
            a.params.push_back(json_rational(p, where + ".params"));
        auto [lo, hi] = json_pair(field(m, "deriv_range", where), where + ".deriv_range");
        if (hi < lo)
            throw ValidationError(where + ".deriv_range: lower end above upper end");
        a.deriv_range = Interval(to_double_down(lo), to_double_up(hi));
        return a;
    }
    throw ValidationError(where + ": unknown map type '" + type + "'");
}

nlohmann::ordered_json rational_json(const Rational& q)
{
    return to_string(q);
}

} // namespace

CantorSystem cantor_from_json(const nlohmann::json& j)
{
    try {
        auto [lo, hi] = json_pair(field(j, "hull", "model"), "hull");
        std::vector<BranchSpec> branches;
        const auto& arr = field(j, "branches", "model");
        if (!arr.is_array())
            throw ValidationError("branches: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& b = arr[i];
            const std::string where = "branches[" + std::to_string(i) + "]";
            BranchSpec spec;
            spec.label = field(b, "label", where).get<std::string>();
            std::tie(spec.lo, spec.hi) = json_pair(field(b, "domain", where), where + ".domain");
            spec.map = parse_map(field(b, "map", where), where + ".map");
            branches.push_back(std::move(spec));
        }
        std::vector<std::pair<std::string, std::string>> markov;
        if (j.contains("markov")) {
            for (const auto& p : j.at("markov")) {
                if (!p.is_array() || p.size() != 2)
                    throw ValidationError("markov: each entry must be [from, to]");
                markov.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
            }
        } else {
            for (const auto& a : branches)
                for (const auto& b : branches)
                    markov.emplace_back(a.label, b.label);
        }
        return make_cantor_system(std::move(lo), std::move(hi), std::move(branches), markov);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
}

nlohmann::json parse_json_text(std::string_view text, const std::string& source)
{
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << source << ": malformed JSON at line " << line << ", column " << col;
        throw ValidationError(msg.str());
    }
}

CantorSystem parse_cantor_json(std::string_view text)
{
    return cantor_from_json(parse_json_text(text));
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CantorSystem load_cantor_file(const std::string& path)
{
    return cantor_from_json(parse_json_text(read_text_file(path), path));
}

nlohmann::ordered_json cantor_to_json(const CantorSystem& k)
{
    nlohmann::ordered_json j;
    j["hull"] = {rational_json(k.hull_lo()), rational_json(k.hull_hi())};
    auto& arr = j["branches"] = nlohmann::ordered_json::array();
    for (const auto& b : k.branches()) {
        nlohmann::ordered_json e;
        e["label"] = b.label;
        e["domain"] = {rational_json(b.lo), rational_json(b.hi)};
        if (const auto* a = std::get_if<AffineMap>(&b.map)) {
            e["map"] = {{"type", "affine"}, {"slope", rational_json(a->slope)}, {"offset", rational_json(a->offset)}};
        } else {
            const auto& an = std::get<AnalyticMap>(b.map);
            nlohmann::ordered_json m;
            m["type"] = "analytic";
            m["name"] = an.name;
            m["params"] = nlohmann::ordered_json::array();
            for (const auto& p : an.params)
                m["params"].push_back(rational_json(p));
            m["deriv_range"] = {an.deriv_range.lo(), an.deriv_range.hi()};
            e["map"] = std::move(m);
        }
        arr.push_back(std::move(e));
    }
    auto& mk = j["markov"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : markov_pairs(k))
        mk.push_back({a, b});
    return j;
}

} // namespace fdyn
