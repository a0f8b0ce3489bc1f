#pragma once

#include <map>
#include <string>

namespace eqfvio {

/// Flat `key = value` text. Blank lines and `#` comments are ignored.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::string& path);

/// Typed lookups; a present but malformed value throws std::invalid_argument naming the key.
double get_double(const KeyValues& kv, const std::string& key, double fallback);
int get_int(const KeyValues& kv, const std::string& key, int fallback);
std::string get_string(const KeyValues& kv, const std::string& key, const std::string& fallback);

}  // namespace eqfvio
