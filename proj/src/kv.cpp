#include "sympdyn/kv.hpp"

namespace sympdyn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

KvEntry parse_kv_line(const std::string& raw, std::size_t line_no) {
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);

    KvEntry out;
    out.line = line_no;
    if (line.empty()) return out;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
        throw ParseError(line_no, "expected 'key = value', got '" + trim(raw) + "'");
    out.key = trim(line.substr(0, eq));
    out.value = trim(line.substr(eq + 1));
    if (out.key.empty()) throw ParseError(line_no, "empty key");
    return out;
}

} // namespace sympdyn
