#include "cavbell/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cavbell {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::map<std::string, double> parse_config_text(const std::string& text,
                                                const std::set<std::string>& allowed) {
    std::map<std::string, double> values;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        auto split = line.find('=');
        if (split == std::string::npos) split = line.find_first_of(" \t");
        if (split == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, split));
        const std::string value_text = trim(line.substr(split + 1));
        if (key.empty() || value_text.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        if (!allowed.contains(key)) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
        if (values.contains(key)) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        }
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end != value_text.c_str() + value_text.size()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": cannot parse number '" + value_text + "'");
        }
        values.emplace(key, value);
    }
    return values;
}

std::map<std::string, double> load_config_file(const std::string& path,
                                               const std::set<std::string>& allowed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read config file '" + path + "'");
    return parse_config_text(buffer.str(), allowed);
}

}  // namespace cavbell
