#pragma once

#include <string>

namespace manneal {

// Shortest decimal string that round-trips the double exactly ('.' decimal,
// no locale). All CSV/JSON output goes through this so identical records
// serialize byte-identically.
std::string format_double(double v);

// RFC-4180 quoting: wraps the field in quotes when it contains a comma,
// quote, or newline; doubles embedded quotes.
std::string csv_field(const std::string& s);

}  // namespace manneal
