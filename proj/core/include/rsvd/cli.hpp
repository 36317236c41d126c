// Batch driver: run configuration (file + flag overrides), seeded domain
// sampling, the verify/evolve/duality/limit subcommands, and CSV/JSON
// table emission with fixed 17-significant-digit formatting.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsvd/types.hpp"

namespace rsvd::cli {

struct RunConfig {
    int n = 2;
    double u = 0.1;
    double v = 0.3;
    double mu = 0.6931471805599453;  // ln 2
    std::uint64_t seed = 42;
    double t_end = 1.0;
    double dt = 1e-3;
    std::optional<RVec> lambda;  // absent => sampled
    std::optional<RVec> theta;
    std::optional<RVec> phat;    // dual-side initial data
    std::optional<RVec> qhat;
    std::string output;          // empty => stdout
    std::string format = "csv";
    bool flip_sign_convention = false;  // negative control, test-only
};

/// Parse a key = value configuration file ('#' comments allowed).
RunConfig parse_config_file(const std::string& path);

/// Apply one key/value pair; shared by the file parser and flag overrides.
/// Throws ConfigError on unknown keys or malformed values.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Field checks (dt > 0, n in [1,8], mu > 0, ...). Throws ConfigError.
void validate(const RunConfig& cfg);

/// Canonical serialization; serialize(parse(file)) is the normalized file.
std::string serialize_config(const RunConfig& cfg);

// ------------------------------- tables ------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// %.17g — fixed 17 significant digits, round-trip exact.
std::string format_g17(double x);

void write_table_csv(std::ostream& os, const Table& t);
void write_table_json(std::ostream& os, const Table& t);
void write_table(std::ostream& os, const Table& t, const std::string& format);

// ----------------------------- subcommands ---------------------------------

// Each command returns the number of violated tolerances (0 = success) and
// writes its table/report to the stream. The RSVD_TOL_OVERRIDE environment
// variable (test-only) replaces every suite tolerance in cmd_verify.

int cmd_verify(const RunConfig& cfg, std::ostream& report);
int cmd_evolve(const RunConfig& cfg, std::ostream& out);
int cmd_duality(const RunConfig& cfg, std::ostream& out);
int cmd_limit(const RunConfig& cfg, std::ostream& out);

}  // namespace rsvd::cli
