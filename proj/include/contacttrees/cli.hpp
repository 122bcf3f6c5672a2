#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contacttrees/diary.hpp"
#include "contacttrees/error.hpp"
#include "contacttrees/layout.hpp"
#include "contacttrees/mapping.hpp"

namespace contacttrees::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O failures on output
  kExitUsage = 2,
  kExitData = 3,
  kExitMapping = 4,
  kExitTooManyPanels = 5,
};

int exit_code_for(ErrorKind kind);

/// `path.json`, a directory holding ties.csv and contacts.csv (plus optional
/// egos.csv and schema.json), or "ties.csv,contacts.csv".
Diary load_diary(const std::string& data, bool check = true);

/// Preset name or path to a mapping JSON file.
MappingSpec load_mapping(const std::string& preset_or_path);

LayoutParams load_params(const std::optional<std::string>& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

struct Timing {
  double parse_ms = 0.0;
  double layout_ms = 0.0;
  double render_ms = 0.0;
};

struct RunReport {
  std::string ego;
  std::string period;
  std::size_t included = 0;
  std::vector<Exclusion> excluded;
  std::vector<Exclusion> excluded_contacts;
  Timing timing;
  std::vector<std::string> outputs;
};

std::string report_json(const std::vector<RunReport>& panels, const Timing& total,
                        const std::vector<std::string>& outputs);

/// Entire command line. Never throws; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contacttrees::cli
