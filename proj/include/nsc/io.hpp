#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsc/fsc.hpp"
#include "nsc/series.hpp"
#include "nsc/sim.hpp"

namespace nsc {

std::string_view version() noexcept;

/// Ordered key/value pairs written as `# key = value` comment lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Named equal-length columns sampled at tau0.
struct Dataset {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    double tau0 = 1.0;
    Metadata metadata;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    /// Throws invalid_argument listing the available names.
    const std::vector<double>& column(std::string_view name) const;
    TimeSeries series(std::string_view name) const;
};

/// Shortest text that reads back to the same double.
std::string format_double(double value);

/// Strict parse of a whole token; nullopt on junk, NaN or infinity.
std::optional<double> parse_double(std::string_view text) noexcept;

/// CSV with a header row. Lines starting with '#' are metadata; `# tau0 = s`
/// sets tau0 unless overridden. Errors name the line (and column) at fault.
Dataset read_csv(const std::string& path, std::optional<double> tau0_override = std::nullopt);
Dataset parse_csv(std::string_view text, std::optional<double> tau0_override = std::nullopt,
                  const std::string& source = "<input>");

void write_csv(const Dataset& data, const std::string& path, const Metadata& meta = {});

/// Header `m,tau,k,sigma_k,edf,style,variant`; omitted points and curve
/// provenance are comment lines. Empty curves are rejected.
void write_curve(const KCurve& curve, const std::string& path, const Metadata& meta = {});
std::string format_curve(const KCurve& curve, const Metadata& meta = {});
KCurve read_curve(const std::string& path);
KCurve parse_curve(std::string_view text, const std::string& source = "<input>");

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

// --- flat-section config files --------------------------------------------

struct IniEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct IniSection {
    std::string name;
    std::vector<IniEntry> entries;
    std::size_t line = 0;

    const IniEntry* find(std::string_view key) const noexcept;
};

/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
/// Keys before the first header land in a section named "".
std::vector<IniSection> parse_ini(std::string_view text, const std::string& source = "<input>");

/// One entry per section: k, sigma_x and optional sigma_x_b (type-B part).
std::vector<BudgetEntry> parse_budget(std::string_view text, const std::string& source = "<input>");
std::vector<BudgetEntry> read_budget(const std::string& path);

/// [scenario] name, n, tau0, seed, y_bar
/// [floor] wfn/ffn/rwn = level, or q and snr
/// [reference] wfn/ffn/rwn = level
/// [effect.<name>] k, wfn/ffn/rwn = level, delay, integral,
///                 measurement_wfn = level, operating_point
/// Stream seeds are derived from the scenario seed.
Scenario parse_scenario(std::string_view text, const std::string& source = "<input>");
Scenario read_scenario(const std::string& path);

std::string format_truth(const Truth& truth, const Metadata& meta = {});
void write_truth(const Truth& truth, const std::string& path, const Metadata& meta = {});

} // namespace nsc
