#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hfc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

/// Plain comma-separated reader (no quoting). Checks the header matches
/// `expected_header` exactly and that every row has the same arity.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header);

/// Writes via a temporary sibling file and rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

double parse_double(const std::string& text, std::string_view what);
long long parse_integer(const std::string& text, std::string_view what);

}  // namespace hfc
