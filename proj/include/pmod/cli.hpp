#pragma once

// Command-line front end. Exit codes: 0 when every requested check passed, 1
// when a bound is violated beyond tolerance, 2 for usage, config or I/O errors.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmod/duality_lab.hpp"

namespace pmod {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

// Sets a dotted key ("mollifier.epsilon") in a config object. The value text
// is parsed as JSON, falling back to a plain string. Throws InvalidInput when
// the key is not already present.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Writes through a temporary file in the same directory and renames it into
// place. Throws std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// %.17g
std::string format_number(double v);

std::string summary_csv(const DualityReport& report);
std::string trace_csv(const DualityReport& report);
// m, p, q, product, slack with slack = max(0, product - 1).
std::string convergence_csv(const DualityReport& report);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pmod
