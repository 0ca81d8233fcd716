#include "fdyn/report.hpp"

#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fdyn {

ojson num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

ojson interval_json(const Interval& x)
{
    return ojson::array({num(x.lo()), num(x.hi())});
}

ojson bracket_json(const DimensionBracket& b)
{
    return {{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"width", num(b.upper - b.lower)},
            {"depth_used", b.depth_used}, {"tolerance", num(b.tolerance)}};
}

ojson versions()
{
    return {{"fdyn", kVersion},
            {"boost", BOOST_LIB_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

namespace {

std::string now_utc()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string cell(const ojson& v)
{
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + "\"";
    }
    if (v.is_null())
        return "";
    return v.dump();
}

ojson table_json(const Table& t)
{
    ojson rows = ojson::array();
    for (const auto& r : t.rows) {
        ojson o = ojson::object();
        for (std::size_t i = 0; i < t.columns.size() && i < r.size(); ++i)
            o[t.columns[i]] = r[i];
        rows.push_back(std::move(o));
    }
    return rows;
}

} // namespace

std::string to_json_text(const Report& r)
{
    ojson j;
    j["command"] = r.command;
    j["config"] = r.config;
    j["versions"] = versions();
    if (r.timestamp)
        j["timestamp"] = now_utc();
    j["result"] = r.result;
    if (r.table)
        j["rows"] = table_json(*r.table);
    return j.dump(2) + "\n";
}

std::string to_csv_text(const Report& r)
{
    std::ostringstream os;
    os << "# command: " << r.command << "\n";
    os << "# config: " << r.config.dump() << "\n";
    os << "# versions: " << versions().dump() << "\n";
    if (r.timestamp)
        os << "# timestamp: " << now_utc() << "\n";
    if (!r.table)
        return os.str();
    for (std::size_t i = 0; i < r.table->columns.size(); ++i)
        os << (i ? "," : "") << r.table->columns[i];
    os << "\n";
    for (const auto& row : r.table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << cell(row[i]);
        os << "\n";
    }
    return os.str();
}

void write_report(const Report& r, const std::string& out)
{
    if (out.empty() || out == "-") {
        std::cout << to_json_text(r);
        return;
    }
    const bool csv = out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0;
    std::ofstream f(out, std::ios::binary);
    if (!f)
        throw ValidationError("cannot write '" + out + "'");
    f << (csv ? to_csv_text(r) : to_json_text(r));
    if (!f)
        throw ValidationError("write to '" + out + "' failed");
}

ojson params_json(const PYParams& p)
{
    return {{"eps0", to_string(p.eps0)}, {"eta", num(p.eta)},           {"tau", num(p.tau)},
            {"beta", num(p.beta)},        {"beta_tilde", num(p.beta_tilde())}};
}

namespace {

ojson witness_json(const AffineLikeElement& e)
{
    const auto [p, q] = widths(e);
    return {{"word", word_key(e.word)}, {"n", e.n}, {"width_P", num(p)}, {"width_Q", num(q)}};
}

} // namespace

ojson exclusion_json(const ExclusionResult& r, const PYParams& p)
{
    ojson nodes = ojson::array();
    for (const auto& n : r.nodes) {
        ojson o{{"generation", n.interval.generation},
                {"lo", to_string(n.interval.lo)},
                {"hi", to_string(n.interval.hi)},
                {"status", to_string(n.interval.status)},
                {"parent", n.parent},
                {"n_max", n.n_max},
                {"w_min", num(n.w_min)},
                {"catalog_size", n.catalog_size},
                {"parabolic", n.parabolic},
                {"bicritical", n.bicritical}};
        if (n.witness)
            o["witness"] = witness_json(*n.witness);
        nodes.push_back(std::move(o));
    }
    return {{"generations", r.generations},
            {"eps0", to_string(p.eps0)},
            {"surviving_measure", to_string(r.surviving)},
            {"excluded_measure", to_string(r.excluded)},
            {"surviving_fraction", num(to_double(r.surviving / p.eps0))},
            {"nodes", nodes}};
}

Table exclusion_table(const ExclusionResult& r)
{
    Table t;
    t.columns = {"generation", "lo",         "hi",         "status",     "parent",  "n_max",
                 "w_min",      "catalog_size", "parabolic", "bicritical", "witness", "witness_width"};
    for (const auto& n : r.nodes) {
        ojson w = "", ww = "";
        if (n.witness) {
            const auto [p, q] = widths(*n.witness);
            w = word_key(n.witness->word);
            ww = num(std::max(p, q));
        }
        t.rows.push_back({n.interval.generation, to_string(n.interval.lo), to_string(n.interval.hi),
                          to_string(n.interval.status), n.parent, n.n_max, num(n.w_min), n.catalog_size, n.parabolic,
                          n.bicritical, w, ww});
    }
    return t;
}

ojson catalog_json(const Catalog& c, const Horseshoe& family, const PYParams& p)
{
    std::size_t bic = 0;
    for (const auto& e : c.elements)
        if (family.fold && is_bicritical(e, c.interval, family, p.eta))
            ++bic;
    return {{"interval", ojson::array({to_string(c.interval.lo), to_string(c.interval.hi)})},
            {"n_max", c.n_max},
            {"w_min", num(c.w_min)},
            {"elements", c.elements.size()},
            {"parabolic", c.parabolic},
            {"bicritical", bic}};
}

Table catalog_table(const Catalog& c, const Horseshoe& family, const PYParams& p)
{
    Table t;
    t.columns = {"word", "n", "source", "target", "width_P", "width_Q", "parabolic", "critical_P", "critical_Q", "cone",
                 "distortion"};
    for (const auto& e : c.elements) {
        const auto [wp, wq] = widths(e);
        const bool cp = is_critical(e.P, wp, c.interval, family, p.eta);
        const bool cq = is_critical(e.Q, wq, c.interval, family, p.eta);
        t.rows.push_back({word_key(e.word), e.n, e.source(), e.target(), num(wp), num(wq),
                          std::holds_alternative<FoldComposite>(e.rep.form), cp, cq, e.cone_ok, e.distortion_ok});
    }
    return t;
}

Table chains_table(const ChainEnumeration& chains, const Catalog& c)
{
    Table t;
    t.columns = {"chain", "position", "word", "width_P", "width_Q"};
    for (std::size_t i = 0; i < chains.chains.size(); ++i) {
        const auto& ch = chains.chains[i];
        for (std::size_t j = 0; j < ch.elements.size(); ++j)
            t.rows.push_back({i, j, word_key(c.elements[ch.elements[j]].word), num(ch.widths.P[j]),
                              num(ch.widths.Q[j])});
    }
    return t;
}

} // namespace fdyn
