#ifndef ISINGMAP_CSV_HPP
#define ISINGMAP_CSV_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

struct CsvError : Error {
    explicit CsvError(const std::string& what) : Error("csv: " + what) {}
};

/// In-memory CSV with a mandatory header row. Quoted fields may contain
/// commas and doubled quotes; embedded newlines are not supported.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column_index(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal string that round-trips the value exactly.
std::string format_double(double value);

/// Strict double/integer parsers; `context` names the row/column in errors.
double parse_double(const std::string& text, const std::string& context);
long long parse_int(const std::string& text, const std::string& context);

}  // namespace isingmap

#endif
