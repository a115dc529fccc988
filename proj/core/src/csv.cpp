#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <istream>

#include "qca/error.hpp"

namespace qca::csv {

namespace {

std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void bad_field(const std::string& field, int line, const char* what)
{
    throw Error(ErrorCode::format,
                "line " + std::to_string(line) + ": '" + field + "' is not " + what);
}

}  // namespace

std::vector<Row> read(std::istream& in, std::initializer_list<const char*> header)
{
    std::vector<Row> rows;
    std::string text;
    int line = 0;
    bool first = true;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        if (trim(text).empty()) {
            continue;
        }
        Row row;
        row.line = line;
        std::size_t start = 0;
        for (;;) {
            const auto comma = text.find(',', start);
            row.fields.push_back(trim(text.substr(start, comma - start)));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (first) {
            first = false;
            bool is_header = row.fields.size() == header.size();
            if (is_header) {
                std::size_t i = 0;
                for (const char* h : header) {
                    if (lower(row.fields[i++]) != h) {
                        is_header = false;
                        break;
                    }
                }
            }
            if (is_header) {
                continue;
            }
        }
        if (row.fields.size() != header.size()) {
            throw Error(ErrorCode::format, "line " + std::to_string(line) + ": expected " +
                                               std::to_string(header.size()) + " fields, got " +
                                               std::to_string(row.fields.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int to_int(const std::string& field, int line)
{
    int value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        bad_field(field, line, "an integer");
    }
    return value;
}

std::int64_t to_int64(const std::string& field, int line)
{
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        bad_field(field, line, "an integer");
    }
    return value;
}

double to_double(const std::string& field, int line)
{
    if (field.empty()) {
        bad_field(field, line, "a number");
    }
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) {
        bad_field(field, line, "a number");
    }
    return value;
}

}  // namespace qca::csv
