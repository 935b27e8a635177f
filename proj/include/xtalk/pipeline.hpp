#pragma once

#include "xtalk/analysis.hpp"
#include "xtalk/device_spec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xtalk {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Subcommands in their canonical execution order; `report` runs all of them.
const std::vector<std::string>& pipeline_commands();

struct PipelineOptions {
    std::optional<double> threshold_khz; ///< overrides the device spec's analysis threshold
    EnvelopeKind envelope = EnvelopeKind::Exp;
    bool normalize_at_nn = true;
    /// ISO-8601 stamp written to the report only; empty selects the current UTC time.
    std::string timestamp;
};

struct RunReport {
    std::string input_digest;
    std::string toolkit_version = kToolkitVersion;
    std::string timestamp;
    std::vector<std::string> commands;
    std::vector<std::string> outputs;  ///< file names relative to the output directory
    std::vector<std::string> warnings; ///< degeneracies, exclusions, floor flags, skipped steps
    std::vector<std::string> errors;   ///< per-command hard failures
    std::string summary_json;          ///< per-command scalar results
    bool ok() const { return errors.empty(); }
};

/// Runs `commands` (any of pipeline_commands(); "report" expands to all) and
/// writes CSVs plus run_report.json into `out_dir`, created if missing.
/// Unknown commands raise DomainError before anything runs. A failing command
/// is recorded in `errors` and the remaining commands still run.
RunReport run_pipeline(const DeviceSpec& spec, const std::vector<std::string>& commands,
                       const std::string& out_dir, const PipelineOptions& opt = {});

/// Header lint: every column carries a unit suffix (_mhz, _khz, _mm, _sites,
/// _per_mm, _ff, _per_ff, _ratio) or is one of the index/label columns
/// i, j, index, label, count, flags. Returns the offending columns.
std::vector<std::string> lint_csv_header(const std::string& header_line);

} // namespace xtalk
