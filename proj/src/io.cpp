#include "fracgs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "fracgs/error.hpp"

namespace fracgs {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json encode_state(const Field& f, const ModelParams& params) {
  const Grid& grid = f.grid();
  if (!grid.valid()) throw Error(ErrorCode::kInvalidArgument, "field has no grid");
  json values = json::array();
  for (double v : f.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "state contains a non-finite value");
    values.push_back(v);
  }
  json doc;
  doc["format_version"] = kStateFormatVersion;
  doc["N"] = grid.dim();
  doc["s"] = params.s;
  doc["q"] = params.q;
  doc["lambda"] = params.lambda;
  doc["L"] = grid.half_width();
  doc["M"] = grid.points_per_axis();
  doc["kind"] = f.is_real() ? "real" : "complex";
  doc["values"] = std::move(values);
  return doc;
}

namespace {

template <typename T>
T field_of(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorCode::kTypeMismatch, std::string("state file lacks '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kTypeMismatch, std::string("state field '") + key + "' has the wrong type");
  }
}

}  // namespace

StateData decode_state(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kTypeMismatch, "state document is not an object");
  const int version = field_of<int>(doc, "format_version");
  if (version != kStateFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "state format_version " + std::to_string(version) + " is not supported (expected 1)");
  }
  ModelParams params;
  params.dim = field_of<int>(doc, "N");
  params.s = field_of<double>(doc, "s");
  params.q = field_of<double>(doc, "q");
  params.lambda = field_of<double>(doc, "lambda");
  const Grid grid = make_grid(params.dim, field_of<double>(doc, "L"), field_of<int>(doc, "M"));
  const auto kind = field_of<std::string>(doc, "kind");
  if (kind != "real" && kind != "complex") throw Error(ErrorCode::kTypeMismatch, "state kind must be real or complex");
  const json& values = doc.at("values");
  if (!values.is_array()) throw Error(ErrorCode::kTypeMismatch, "state values must be an array");
  const std::size_t expected = grid.size() * (kind == "complex" ? 2 : 1);
  if (values.size() != expected) {
    throw Error(ErrorCode::kLengthMismatch, "state holds " + std::to_string(values.size()) +
                                                " values, grid needs " + std::to_string(expected));
  }
  std::vector<double> data;
  data.reserve(expected);
  for (const auto& v : values) {
    if (v.is_null()) throw Error(ErrorCode::kNonFinite, "state contains a non-finite value");
    if (!v.is_number()) throw Error(ErrorCode::kTypeMismatch, "state values must be numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::kNonFinite, "state contains a non-finite value");
    data.push_back(x);
  }
  if (kind == "real") return {Field::real(grid, std::move(data)), params};
  std::vector<std::complex<double>> z(grid.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = {data[2 * i], data[2 * i + 1]};
  return {Field::complex(grid, z), params};
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_state(const std::filesystem::path& path, const Field& f, const ModelParams& params,
                 const json* config) {
  json doc = encode_state(f, params);
  if (config) doc["config"] = *config;
  write_file_atomic(path, dump_json(doc));
}

StateData read_state(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kIo, "cannot parse " + path.string() + ": " + e.what());
  }
  return decode_state(doc);
}

std::string branch_csv(const MassCurve& curve) {
  if (curve.points.empty()) throw Error(ErrorCode::kInvalidArgument, "branch curve is empty");
  std::string out = kBranchCsvHeader;
  out += '\n';
  for (const auto& p : curve.points) {
    const double values[] = {p.lambda, p.mass, p.action, p.kinetic, p.potential, p.power_q, p.pohozaev_rel, p.slope};
    for (double v : values) {
      out += format_double(v);
      out += ',';
    }
    out += to_string(p.stability);
    out += ',';
    out += format_double(p.min_abs_eig);
    out += '\n';
  }
  return out;
}

void emit_branch_csv(const MassCurve& curve, const std::filesystem::path& path) {
  write_file_atomic(path, branch_csv(curve));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigMap parse_config(const std::string& text, const std::vector<std::string>& allowed) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kUsage, "config line " + std::to_string(lineno) + " has no '='");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::kUsage, "unknown config key '" + key + "' on line " + std::to_string(lineno));
    }
    out[key] = value;
  }
  return out;
}

ConfigMap read_config(const std::filesystem::path& path, const std::vector<std::string>& allowed) {
  return parse_config(read_file(path), allowed);
}

std::string format_config(const ConfigMap& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

}  // namespace fracgs
