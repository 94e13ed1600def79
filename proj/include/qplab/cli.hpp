#pragma once

// Configuration, report emission and the acceptance suite behind the
// command-line tool.

#include "qplab/cf_core.hpp"
#include "qplab/errors.hpp"
#include "qplab/phase_dynamics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qplab::cli {

using json = nlohmann::ordered_json;

struct FrequencySpec {
    enum class Kind { Cf, Decimal, Liouville };
    Kind kind = Kind::Cf;
    std::vector<BigInt> elements;
    std::vector<BigInt> closure{BigInt(1)};
    std::string decimal;
    std::size_t depth = 32;
    std::string liouville_lambda;
    BigInt a1;
    std::size_t levels = 0;

    friend bool operator==(const FrequencySpec&, const FrequencySpec&) = default;
};

struct ThetaSpec {
    enum class Kind { Single, Grid, Lattice };
    Kind kind = Kind::Single;
    std::string value = "0.5";
    std::string lo = "0";
    std::string hi = "1";
    std::size_t count = 11;
    BigInt k;
    BigInt l;

    friend bool operator==(const ThetaSpec&, const ThetaSpec&) = default;
};

struct RunConfig {
    FrequencySpec omega;
    std::string lambda = "2";
    ThetaSpec theta;
    Bits precision_bits = 128;     ///< cocycle products, phases
    Bits cf_precision_bits = 256;  ///< continued fractions
    std::string schedule = "half";
    std::vector<std::int64_t> horizons{100, 1000, 10000, 20000};
    std::uint64_t seed = 0;
    std::string kind = "model";  ///< model | amo
    std::string energy = "0";
    long L_min = 4;
    long L_max = 8;
    std::int64_t trace_min = 0;
    std::int64_t trace_max = 60;
    bool weyl = true;
    std::int64_t k_max = 100;
    std::vector<std::size_t> m_list{1, 2};
    std::vector<long> badset_levels{4, 6, 8};
    double liouville_c = 0.1;
    std::string out_dir;
    std::string format = "csv";  ///< csv | json
    int digits = 17;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Golden frequency (32 elements), lambda = 2, theta = 1/2.
RunConfig default_config();

/// SchemaError (with the field path) for malformed documents, ValueError for
/// out-of-range values, and whatever building the frequency raises
/// (RationalInput, PrecisionExhausted).
RunConfig parse_config(std::string_view text);
json to_json(const RunConfig& config);

cf::Frequency build_frequency(const RunConfig& config);
Real lambda_value(const RunConfig& config, Bits bits);

/// A phase given either as a real number or exactly as a lattice point.
struct Theta {
    Real value;
    std::optional<phase::LatticePoint> lattice;
};
/// Sorted by value.
std::vector<Theta> theta_values(const RunConfig& config, const cf::Frequency& freq);

// ---- artifacts ---------------------------------------------------------------

struct Cell {
    std::string text;
    bool numeric = true;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// A named output: always a table, optionally a structured document that the
/// JSON format prefers.
struct Artifact {
    std::string name;
    Table table;
    std::optional<json> document;
};

std::string format_double(double x, int digits);
std::string format_real(const Real& x, int digits);
Cell num(double x, int digits);
Cell num(const Real& x, int digits);
Cell integer(long long x);
Cell big(const BigInt& x);  ///< big integers are text, never floats
Cell text(std::string s);

std::string to_csv(const Table& table);
json table_json(const Table& table);
/// Serialized artifact in the chosen format ("csv" or "json").
std::string render(const Artifact& artifact, std::string_view format);
/// Writes <dir>/<name>.<format>; returns the path.
std::filesystem::path write_artifact(const Artifact& artifact, const std::filesystem::path& dir,
                                     std::string_view format);

// ---- subcommands --------------------------------------------------------------

/// cf, freq, liouville, phase, lyap, trace, gordon, renorm, cascade, badset.
const std::vector<std::string>& command_names();
Artifact run_command(std::string_view name, const RunConfig& config);

// ---- acceptance suite ------------------------------------------------------------

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    double measured = 0;
    double threshold = 0;
    std::string detail;
    double runtime_seconds = 0;
    double runtime_budget = 0;
};

struct SuiteReport {
    std::vector<CriterionResult> results;
    /// Failure iff any criterion fails.
    bool passed() const;
    bool within_budget() const;
    /// Everything except runtimes; byte-identical across runs with the same config.
    json to_json() const;
};

const std::vector<std::string>& criterion_names();

/// Runs the selected criteria (all when empty). CriterionUnknown for names not
/// in criterion_names(). Artifacts go to `out_dir` when it is non-empty.
SuiteReport run_suite(const RunConfig& config, const std::vector<std::string>& selection,
                      const std::filesystem::path& out_dir = {});

}  // namespace qplab::cli
