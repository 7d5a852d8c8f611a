#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pathlab {

inline constexpr const char* kToolVersion = "pathlab 1.0.0";

/// Table cell: integers and doubles keep their type so the JSON output can
/// emit them as numbers. Doubles are formatted with 17 significant digits,
/// which round-trips and is byte-stable across runs.
using Cell = std::variant<long long, double, std::string>;

std::string format_cell(const Cell& cell);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// CSV dialect: comma separated, '.' decimal point, mandatory header row,
/// LF line endings, no quoting (cells must not contain commas).
std::string to_csv(const Table& table);

/// JSON rendering: array of row objects keyed by column name.
std::string to_json_records(const Table& table);

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    std::string name;
    std::map<std::string, std::string> params;
    std::optional<std::uint64_t> seed;
    std::string out_path; // empty selects "<name>.<format>"
    OutputFormat format = OutputFormat::csv;
    bool strict = false;
    unsigned threads = 1;
};

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Thrown for malformed or unknown configuration (exit code 2 territory).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter lookup with defaults; rejects unknown keys.
class ParamReader {
public:
    ParamReader(const std::map<std::string, std::string>& given,
                const std::map<std::string, std::string>& defaults);

    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<long long> get_int_list(const std::string& key) const;
    /// Resolved key -> value map (defaults overlaid with given values).
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

private:
    std::map<std::string, std::string> resolved_;
};

/// Complex literal of the form "a", "a+bi" or "a-bi" (also accepts "bi").
std::complex<double> parse_complex(const std::string& text);

} // namespace pathlab
