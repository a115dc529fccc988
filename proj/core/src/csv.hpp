#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace qca::csv {

struct Row {
    std::vector<std::string> fields;
    int line = 0;
};

/// Reads comma-separated rows. When the first non-blank line matches
/// `header` (case-insensitive, trimmed) it is skipped. Every row must have
/// exactly header.size() fields.
std::vector<Row> read(std::istream& in, std::initializer_list<const char*> header);

int to_int(const std::string& field, int line);
std::int64_t to_int64(const std::string& field, int line);
double to_double(const std::string& field, int line);

}  // namespace qca::csv
