#pragma once

#include <optional>
#include <string>
#include <vector>

namespace trajbench {

// Shortest decimal representation that round-trips to the same double,
// locale-independent ('.' decimal separator).
std::string format_double(double value);

// Parses a complete field as a double; nullopt on empty/partial/invalid input.
std::optional<double> parse_double(const std::string& field);

std::optional<long long> parse_integer(const std::string& field);

// Minimal RFC 4180 CSV framing: fields containing ',', '"' or '\n' are quoted
// on write; quoted fields are unescaped on read.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);

}  // namespace trajbench
