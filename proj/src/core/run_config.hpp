#pragma once

#include "core/experiments.hpp"
#include "core/synth.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epl {

/// Parsed form of the flat key-value run config (see configs/*.cfg for the
/// format: [dataset] / [split] / [output] sections plus one [method <id>]
/// section per method).
struct RunConfig {
    std::optional<SynthSpec> synth;  // exactly one of synth / csv_path is set
    std::optional<std::string> csv_path;
    RunGrid grid;
    std::string output_dir;
};

/// Parses config text; diagnostics carry 1-based line numbers.
RunConfig parse_run_config(const std::vector<std::string>& lines, const std::string& context);
RunConfig load_run_config(const std::string& path);

/// Runs the configured grid and writes runs.csv, aggregate.csv and their
/// manifests under out_dir (which overrides the config's [output] dir when
/// non-empty). Returns a rendered summary table of the aggregate.
std::string execute_run(const RunConfig& config, const std::string& config_bytes,
                        const std::string& out_dir_override, int jobs);

/// Writes the tidy per-panel CSV (columns x,series,mean,std) for one figure
/// id in {fig1, fig2, fig3} from a per-run results CSV.
void write_report(const std::string& results_csv_path, const std::string& figure_id,
                  const std::string& out_dir);

/// Writes the dataset CSV plus its sidecar manifest (spec echo + seed).
void synth_to_file(const SynthSpec& spec, const std::string& csv_path);

/// "key=value" manifest next to an output file: tool version, config hash,
/// optional extra lines.
void write_manifest(const std::string& for_path, const std::string& config_hash,
                    const std::vector<std::string>& extra_lines = {});

extern const char* const kToolVersion;

} // namespace epl
