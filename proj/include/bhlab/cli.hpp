#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bhlab::cli {

inline constexpr const char* kVersion = "0.3.0";

/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// Subcommands: eigen, sweep, certify, solve, fermi-demo, report.
/// `--config FILE` (flat key=value, '#' comments) may appear anywhere; explicit
/// flags override file entries. Artifacts go to --output-dir, else $BHLAB_OUTPUT_DIR, else ".".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// Reads "1/64", "0.5", "-1e-3". Throws ConfigError on anything else.
double parse_real(const std::string& s);
/// Comma-separated list of parse_real values.
std::vector<double> parse_real_list(const std::string& s);

/// key=value lines; blank lines and '#' comments skipped. Throws ConfigError on malformed lines.
std::map<std::string, std::string> read_config(const std::string& path);

/// FNV-1a 64 of the sorted "key=value\n" lines, as 16 hex digits.
std::string config_hash(const std::map<std::string, std::string>& params);

}  // namespace bhlab::cli
