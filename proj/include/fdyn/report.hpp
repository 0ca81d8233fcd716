#pragma once

#include "fdyn/fractal.hpp"
#include "fdyn/py_scheme.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fdyn {

using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

// Rounded to 12 significant digits; non-finite values become strings.
ojson num(double x);
ojson interval_json(const Interval& x);
ojson bracket_json(const DimensionBracket& b);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<ojson>> rows;
};

// A report is the config echo, the tool versions, a result object and an optional
// table. Thread counts are not echoed, so reports do not depend on them.
struct Report {
    std::string command;
    ojson config = ojson::object();
    ojson result = ojson::object();
    std::optional<Table> table;
    bool timestamp = false;
};

ojson versions();
std::string to_json_text(const Report& r);
// Header comment lines with the config echo, then the column row and data rows.
std::string to_csv_text(const Report& r);
// "" or "-": JSON on stdout. A path ending in .csv gets the table, anything else JSON.
void write_report(const Report& r, const std::string& out);

ojson params_json(const PYParams& p);
ojson exclusion_json(const ExclusionResult& r, const PYParams& p);
Table exclusion_table(const ExclusionResult& r);
ojson catalog_json(const Catalog& c, const Horseshoe& family, const PYParams& p);
Table catalog_table(const Catalog& c, const Horseshoe& family, const PYParams& p);
Table chains_table(const ChainEnumeration& chains, const Catalog& c);

} // namespace fdyn
