// config.hpp
// Flat key-value experiment files: one "key = value" per line (the '=' is
// optional), '#' starts a comment, all values SI. Unknown and duplicate
// keys are rejected.
#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace cavbell {

// Malformed content: unknown key, duplicate key, unparsable number.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::map<std::string, double> parse_config_text(const std::string& text,
                                                const std::set<std::string>& allowed);

std::map<std::string, double> load_config_file(const std::string& path,
                                               const std::set<std::string>& allowed);

}  // namespace cavbell
