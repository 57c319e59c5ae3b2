#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

#include "fracgs/continuation.hpp"
#include "fracgs/grid.hpp"
#include "fracgs/params.hpp"

namespace fracgs {

inline constexpr int kStateFormatVersion = 1;

struct StateData {
  Field field;
  ModelParams params;
};

/// {format_version, N, s, q, lambda, L, M, kind, values}; complex values are
/// interleaved re/im. Throws kNonFinite on NaN or infinity.
nlohmann::json encode_state(const Field& f, const ModelParams& params);
/// Throws kVersionMismatch, kLengthMismatch, kNonFinite or kTypeMismatch.
StateData decode_state(const nlohmann::json& doc);

/// Shortest round-trip text of the document, newline-terminated.
std::string dump_json(const nlohmann::json& doc);

void write_state(const std::filesystem::path& path, const Field& f, const ModelParams& params,
                 const nlohmann::json* config = nullptr);
StateData read_state(const std::filesystem::path& path);

inline constexpr const char* kBranchCsvHeader =
    "lambda,mass,action,kinetic,potential,power_q,pohozaev_rel,slope,stability,min_abs_eig";

/// One row per point in curve order, 17 significant digits.
std::string branch_csv(const MassCurve& curve);
void emit_branch_csv(const MassCurve& curve, const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// %.17g
std::string format_double(double v);

/// Flat `dotted.key = value` configuration. Blank lines and lines starting with
/// '#' are ignored; keys outside `allowed` are rejected.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(const std::string& text, const std::vector<std::string>& allowed);
ConfigMap read_config(const std::filesystem::path& path, const std::vector<std::string>& allowed);
std::string format_config(const ConfigMap& config);

}  // namespace fracgs
