#ifndef DPSIM_REPORT_H
#define DPSIM_REPORT_H

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dpsim {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

using Value = std::variant<std::string, std::int64_t, double, bool>;

// Doubles print with 12 significant digits so files are stable across runs.
std::string format_value(const Value& v);
nlohmann::json to_json(const Value& v);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    void add(std::vector<Value> row);
    const Value& at(std::size_t row, const std::string& column) const;
};

struct Report {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> metadata;  // insertion order
    std::deque<Table> tables;  // references stay valid as tables are added

    Table& table(const std::string& name, std::vector<std::string> columns);
    const Table& get(const std::string& name) const;
    void meta(const std::string& key, const std::string& value);
};

// One CSV per table: "<experiment>.csv" for the first table and
// "<experiment>_<table>.csv" for the rest. Metadata lines start with '#'.
std::string to_csv(const Report& r, const Table& t);
nlohmann::json to_json(const Report& r);

// Writes the report files into dir and returns their paths.
std::vector<std::string> write_report(const Report& r, const std::string& dir, const std::string& format);

}  // namespace dpsim

#endif
