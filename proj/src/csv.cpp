#include "isingmap/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace isingmap {

std::optional<std::size_t> CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw CsvError("unterminated quote on line " + std::to_string(line_no));
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && line_no > 1) continue;
        auto fields = split_line(line, line_no);
        if (line_no == 1) {
            table.columns = std::move(fields);
        } else {
            if (fields.size() != table.columns.size())
                throw CsvError("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(table.columns.size()) + " fields, got " +
                               std::to_string(fields.size()) + " in " + path.string());
            table.rows.push_back(std::move(fields));
        }
    }
    if (line_no == 0) throw CsvError("missing header in " + path.string());
    return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: stable newlines across platforms
    if (!out) throw CsvError("cannot write " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << quote_if_needed(columns[i]);
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << quote_if_needed(row[i]);
        }
        out << '\n';
    }
    if (!out) throw CsvError("write failed for " + path.string());
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw CsvError("cannot format double");
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw CsvError("not a number: '" + text + "' (" + context + ")");
    return value;
}

long long parse_int(const std::string& text, const std::string& context) {
    long long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw CsvError("not an integer: '" + text + "' (" + context + ")");
    return value;
}

}  // namespace isingmap
