#pragma once

// CSV ingestion and serialization, the experiment config format, and run manifests.
//
// CSV files are UTF-8, comma separated, with one header row, '.' decimals and
// LF line endings. Quoted fields are not supported.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xreg/dataset.hpp"
#include "xreg/diagnostics.hpp"
#include "xreg/pipeline.hpp"

namespace xreg::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDataError = 3,
  kExitRuntimeFailure = 4,
};

inline constexpr const char* kVersion = "0.1.0";

struct Table {
  std::vector<std::string> header;
  Matrix values;
};

/// Every column must be numeric. Errors name the row (1-based, header = row 1) and column.
Table load_table_csv(const std::filesystem::path& path);

/// Resolve a column given by name or by zero-based index.
std::size_t resolve_column(const std::vector<std::string>& header, const std::string& ref);

/// `target` removed from the features; `features` empty means all other columns.
Dataset load_dataset_csv(const std::filesystem::path& path, const std::string& target,
                         const std::vector<std::string>& features = {});

Dataset load_dataset(const CsvSource& source);

/// Header x1..xd,y unless names are given (d + 1 entries).
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       const std::vector<std::string>& names = {});
void write_table_csv(const Table& table, const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

// --- experiment config -----------------------------------------------------

/// INI-style: optional [section] headers, `key = value` lines, '#' or ';' comments.
/// Keys are addressed as section.key. Unknown keys and type or range
/// violations throw ConfigError naming the key path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Resolved configuration in the same format, with every default spelled out.
std::string format_config(const ExperimentConfig& cfg);

// --- reports ---------------------------------------------------------------

/// Columns: regressor,regime,mean_mse,std_mse,k_train,k_test,replications.
void write_report(const MseReport& report, const std::filesystem::path& path);
std::vector<MseRow> read_report(const std::filesystem::path& path);

/// Fixed-width table, one line per regressor, the lowest-MSE regime marked with '*'.
std::string format_summary(const MseReport& report);

/// Columns: cell_id,k,f_hat,centroid_1..centroid_d.
void write_report(const std::vector<StabilityCurve>& curves, const std::filesystem::path& path);
void write_report(const std::vector<IndependenceLevel>& levels, const std::filesystem::path& path);
void write_report(const std::vector<DriftLevel>& levels, const std::filesystem::path& path);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_text;  // format_config of the resolved config
  std::uint64_t master_seed = 0;
  std::vector<ReplicationRecord> replications;
  std::vector<std::pair<std::string, std::string>> hyperparameters;
  std::string kernel_isa;
  std::vector<StageTiming> timings;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace xreg::io
