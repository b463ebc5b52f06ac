#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hbc::cli {

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<double>& values);
    double number(std::size_t row, const std::string& column) const;
};

// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

// Parses the whole string as a double; subnormals are accepted.
std::optional<double> parse_double(const std::string& s);

std::string to_csv(const Table& t);
Table parse_csv(const std::string& text, const std::string& name = {});
Table read_csv(const std::string& path);

// temp file + rename in the destination directory
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string sha256_hex(const std::string& data);

}  // namespace hbc::cli
