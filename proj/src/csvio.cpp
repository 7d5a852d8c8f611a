#include "pathlab/csvio.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pathlab {

std::string format_cell(const Cell& cell) {
    if (std::holds_alternative<long long>(cell)) {
        return std::to_string(std::get<long long>(cell));
    }
    if (std::holds_alternative<double>(cell)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
        return buf;
    }
    return std::get<std::string>(cell);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("Table::add_row: wrong cell count");
    }
    rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) {
            out << ',';
        }
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << format_cell(row[c]);
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        default: out += ch; break;
        }
    }
    return out;
}

std::string json_cell(const Cell& cell) {
    if (std::holds_alternative<long long>(cell)) {
        return std::to_string(std::get<long long>(cell));
    }
    if (std::holds_alternative<double>(cell)) {
        const double v = std::get<double>(cell);
        if (!std::isfinite(v)) {
            return std::string("\"") + format_cell(cell) + "\"";
        }
        return format_cell(cell);
    }
    return std::string("\"") + json_escape(std::get<std::string>(cell)) + "\"";
}

} // namespace

std::string to_json_records(const Table& table) {
    std::ostringstream out;
    out << "[\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << "  {";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c > 0) {
                out << ", ";
            }
            out << '"' << json_escape(table.columns[c]) << "\": " << json_cell(table.rows[r][c]);
        }
        out << '}' << (r + 1 < table.rows.size() ? "," : "") << '\n';
    }
    out << "]\n";
    return out.str();
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not key=value: " + line);
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

ParamReader::ParamReader(const std::map<std::string, std::string>& given,
                         const std::map<std::string, std::string>& defaults)
    : resolved_(defaults) {
    for (const auto& [key, value] : given) {
        if (resolved_.find(key) == resolved_.end()) {
            throw ConfigError("unknown parameter: " + key);
        }
        resolved_[key] = value;
    }
}

double ParamReader::get_double(const std::string& key) const {
    const auto it = resolved_.find(key);
    if (it == resolved_.end()) {
        throw ConfigError("missing parameter: " + key);
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter " + key + " is not a number: " + it->second);
    }
}

long long ParamReader::get_int(const std::string& key) const {
    const auto it = resolved_.find(key);
    if (it == resolved_.end()) {
        throw ConfigError("missing parameter: " + key);
    }
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter " + key + " is not an integer: " + it->second);
    }
}

std::string ParamReader::get_string(const std::string& key) const {
    const auto it = resolved_.find(key);
    if (it == resolved_.end()) {
        throw ConfigError("missing parameter: " + key);
    }
    return it->second;
}

std::vector<double> ParamReader::get_double_list(const std::string& key) const {
    const std::string text = get_string(key);
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("parameter " + key + " has a bad list entry: " + item);
        }
    }
    if (out.empty()) {
        throw ConfigError("parameter " + key + " is an empty list");
    }
    return out;
}

std::vector<long long> ParamReader::get_int_list(const std::string& key) const {
    const std::string text = get_string(key);
    std::vector<long long> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("parameter " + key + " has a bad list entry: " + item);
        }
    }
    if (out.empty()) {
        throw ConfigError("parameter " + key + " is an empty list");
    }
    return out;
}

std::complex<double> parse_complex(const std::string& text) {
    // Accepted forms: "a", "bi", "a+bi", "a-bi" (with optional leading sign).
    if (text.empty()) {
        throw ConfigError("empty complex literal");
    }
    auto parse_num = [](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    };
    try {
        if (text.back() == 'i') {
            std::string body = text.substr(0, text.size() - 1);
            // Split at the last +/- that is not an exponent sign or leading sign.
            for (std::size_t p = body.size(); p-- > 1;) {
                if ((body[p] == '+' || body[p] == '-') &&
                    body[p - 1] != 'e' && body[p - 1] != 'E') {
                    const double re = parse_num(body.substr(0, p));
                    std::string im_text = body.substr(p);
                    if (im_text == "+") {
                        im_text = "1";
                    } else if (im_text == "-") {
                        im_text = "-1";
                    }
                    return std::complex<double>(re, parse_num(im_text));
                }
            }
            if (body.empty() || body == "+") {
                return std::complex<double>(0.0, 1.0);
            }
            if (body == "-") {
                return std::complex<double>(0.0, -1.0);
            }
            return std::complex<double>(0.0, parse_num(body));
        }
        return std::complex<double>(parse_num(text), 0.0);
    } catch (const std::exception&) {
        throw ConfigError("bad complex literal: " + text);
    }
}

} // namespace pathlab
