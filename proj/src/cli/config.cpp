#include "freqsec/cli/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace freqsec::cli {

using json = nlohmann::json;

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

json parse_toml_value(const std::string& raw, int line_no) {
    const std::string v = strip(raw);
    if (v.empty()) throw std::runtime_error("toml: empty value at line " + std::to_string(line_no));
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw std::runtime_error("toml: unterminated string at line " + std::to_string(line_no));
        return json(v.substr(1, v.size() - 2));
    }
    if (v == "true") return json(true);
    if (v == "false") return json(false);
    if (v.front() == '[') {
        if (v.back() != ']')
            throw std::runtime_error("toml: unterminated array at line " + std::to_string(line_no));
        json arr = json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string cur;
        int depth = 0;
        bool in_str = false;
        auto flush = [&]() {
            const std::string item = strip(cur);
            if (!item.empty()) arr.push_back(parse_toml_value(item, line_no));
            cur.clear();
        };
        for (char c : inner) {
            if (c == '"') in_str = !in_str;
            if (!in_str && c == '[') ++depth;
            if (!in_str && c == ']') --depth;
            if (!in_str && depth == 0 && c == ',') {
                flush();
                continue;
            }
            cur.push_back(c);
        }
        flush();
        return arr;
    }
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) {
            if (d == static_cast<long long>(d) && v.find_first_of(".eE") == std::string::npos)
                return json(static_cast<long long>(d));
            return json(d);
        }
    } catch (const std::exception&) {
    }
    throw std::runtime_error("toml: cannot parse value '" + v + "' at line " +
                             std::to_string(line_no));
}

json* descend(json& root, const std::string& dotted) {
    json* cur = &root;
    std::string part;
    std::istringstream ss(dotted);
    while (std::getline(ss, part, '.')) {
        part = strip(part);
        if (part.empty()) throw std::runtime_error("toml: empty key segment in '" + dotted + "'");
        cur = &(*cur)[part];
    }
    return cur;
}

}  // namespace

json toml_subset_to_json(const std::string& text) {
    json root = json::object();
    json* table = &root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            // keep '#' inside strings
            bool in_str = false;
            std::size_t cut = std::string::npos;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') in_str = !in_str;
                if (line[i] == '#' && !in_str) {
                    cut = i;
                    break;
                }
            }
            if (cut != std::string::npos) line = line.substr(0, cut);
        }
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("toml: bad table header at line " + std::to_string(line_no));
            table = descend(root, t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected 'key = value' at line " +
                                     std::to_string(line_no));
        const std::string key = strip(t.substr(0, eq));
        if (key.empty()) throw std::runtime_error("toml: empty key at line " + std::to_string(line_no));
        if (key.find('.') != std::string::npos)
            *descend(*table, key) = parse_toml_value(t.substr(eq + 1), line_no);
        else
            (*table)[key] = parse_toml_value(t.substr(eq + 1), line_no);
    }
    return root;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
        return toml_subset_to_json(buf.str());
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config '" + path + "' is not valid JSON: " + e.what());
    }
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::runtime_error("config: missing or non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::runtime_error("config: missing or non-string key '" + key + "'");
    return j.at(key).get<std::string>();
}

const json& require_object(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_object())
        throw std::runtime_error("config: missing or non-object key '" + key + "'");
    return j.at(key);
}

}  // namespace freqsec::cli
