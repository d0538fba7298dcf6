#ifndef CLINTIME_TEXT_HPP
#define CLINTIME_TEXT_HPP

#include <string>
#include <vector>

#include "clintime/types.hpp"

namespace clintime::text {

// UTF-8 <-> code point helpers. Invalid bytes decode as U+FFFD, one code
// point per offending byte, so offsets stay stable.
std::u32string decode_utf8(const std::string& s);
std::string encode_utf8(const std::u32string& s);
std::size_t codepoint_length(const std::string& s);

// Slice by code-point span; returns UTF-8.
std::string slice(const std::string& utf8, const Span& span);

std::string to_lower(const std::string& s);
bool iequals(const std::string& a, const std::string& b);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace clintime::text

#endif
