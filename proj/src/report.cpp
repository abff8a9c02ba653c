#include "dpsim/report.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dpsim {

std::string format_value(const Value& v)
{
    if (auto s = std::get_if<std::string>(&v))
        return *s;
    if (auto i = std::get_if<std::int64_t>(&v))
        return std::to_string(*i);
    if (auto b = std::get_if<bool>(&v))
        return *b ? "true" : "false";
    double d = std::get<double>(v);
    if (std::isnan(d))
        return "nan";
    if (std::isinf(d))
        return d > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    return buf;
}

nlohmann::json to_json(const Value& v)
{
    if (auto s = std::get_if<std::string>(&v))
        return *s;
    if (auto i = std::get_if<std::int64_t>(&v))
        return *i;
    if (auto b = std::get_if<bool>(&v))
        return *b;
    double d = std::get<double>(v);
    if (!std::isfinite(d))
        return format_value(v);
    // round-trip through the CSV text so both formats carry the same digits
    return std::stod(format_value(v));
}

void Table::add(std::vector<Value> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

const Value& Table::at(std::size_t row, const std::string& column) const
{
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == column)
            return rows.at(row).at(c);
    throw std::out_of_range("table " + name + ": no column " + column);
}

Table& Report::table(const std::string& name, std::vector<std::string> columns)
{
    tables.push_back(Table{name, std::move(columns), {}});
    return tables.back();
}

const Table& Report::get(const std::string& name) const
{
    for (const auto& t : tables)
        if (t.name == name)
            return t;
    throw std::out_of_range("report " + experiment + ": no table " + name);
}

void Report::meta(const std::string& key, const std::string& value)
{
    for (auto& kv : metadata)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    metadata.emplace_back(key, value);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"')
            o += '"';
        o += c;
    }
    return o + "\"";
}

}  // namespace

std::string to_csv(const Report& r, const Table& t)
{
    std::string o;
    for (const auto& [k, v] : r.metadata)
        o += "# " + k + "=" + v + "\n";
    o += "# table=" + t.name + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        o += (i ? "," : "") + csv_field(t.columns[i]);
    o += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            o += (i ? "," : "") + csv_field(format_value(row[i]));
        o += "\n";
    }
    return o;
}

nlohmann::json to_json(const Report& r)
{
    nlohmann::json j;
    j["experiment"] = r.experiment;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : r.metadata)
        meta[k] = v;
    j["metadata"] = meta;
    nlohmann::json tabs = nlohmann::json::array();
    for (const auto& t : r.tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : t.rows) {
            nlohmann::json jr = nlohmann::json::array();
            for (const auto& v : row)
                jr.push_back(to_json(v));
            rows.push_back(jr);
        }
        tabs.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
    }
    j["tables"] = tabs;
    return j;
}

std::vector<std::string> write_report(const Report& r, const std::string& dir, const std::string& format)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> files;
    auto put = [&](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + p.string());
        f << text;
        files.push_back(p.string());
    };
    if (format == "json") {
        put(fs::path(dir) / (r.experiment + ".json"), to_json(r).dump(2) + "\n");
    } else if (format == "csv") {
        for (std::size_t i = 0; i < r.tables.size(); ++i) {
            std::string stem = i == 0 ? r.experiment : r.experiment + "_" + r.tables[i].name;
            put(fs::path(dir) / (stem + ".csv"), to_csv(r, r.tables[i]));
        }
    } else {
        throw std::invalid_argument("unknown format: " + format);
    }
    return files;
}

}  // namespace dpsim
