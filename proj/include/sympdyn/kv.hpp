#pragma once

#include <string>

#include "sympdyn/error.hpp"

namespace sympdyn {

// One `key = value` line; key is empty for blank/comment lines.
struct KvEntry {
    std::size_t line = 0;
    std::string key, value;
};

// Strips `#` comments and whitespace; throws ParseError when a non-empty line
// has no `=`. Keys are case-sensitive.
KvEntry parse_kv_line(const std::string& raw, std::size_t line_no);

} // namespace sympdyn
