#pragma once

#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace crl::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::vector<std::string_view> lines(std::string_view text);

double to_double(std::string_view field);
long long to_int(std::string_view field);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace crl::csv
