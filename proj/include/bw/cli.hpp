#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bw/models.hpp"

namespace bw::cli {

enum class Format { csv, json };

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool geometric = false;
};

/// "min:max:count[:geom]". Throws ConfigError on anything else, on
/// count < 1, on min > max, and on a geometric grid that spans or touches 0.
[[nodiscard]] GridSpec parse_grid(std::string_view text);
[[nodiscard]] std::vector<double> make_grid(const GridSpec& spec);

struct RunConfig {
    std::string model_file;
    std::optional<GridSpec> grid;
    std::optional<double> tol;
    Format format = Format::csv;
    std::uint64_t seed = 42;
    std::string out;  // empty: standard output
    long samples = 10000;
    std::vector<std::string> suites;  // empty: all
};

struct MarketQuote {
    double forward = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    double price = 0.0;
};

enum class OptionType { call, put };

/// A table cell: number, text, integer or missing (NaN written as "nan"
/// in CSV and null in JSON).
using Cell = std::variant<double, std::string, std::int64_t>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// CSV: header row, ',' separator, numbers with 15 significant digits.
/// JSON: {"meta": ..., "rows": [{column: value}, ...]} with numbers rounded
/// to the same 15 digits, so both formats carry identical values.
void write_table(std::ostream& os, const Table& table, Format format,
                 const nlohmann::json& meta = nlohmann::json::object());

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitNoSolution = 3;
inline constexpr int kExitCheckFailed = 4;

int cmd_price(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ivol(const MarketQuote& quote, OptionType type, const RunConfig& cfg, std::ostream& out,
             std::ostream& err);
int cmd_smile(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_wings(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_models(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv with the subcommands above and dispatches. `--out` is
/// honoured here; the cmd_* functions write to the stream they are given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bw::cli
