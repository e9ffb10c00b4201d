#pragma once

// Text formats: point-cloud CSV, RFC-4180 field handling, and JSON forms of
// parameters, sampler specs and estimator configs. Doubles are written with
// 17 significant digits in the classic locale so they round-trip exactly;
// infinities appear as "inf" (JSON string, CSV bare).

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tspdim/core_types.hpp"
#include "tspdim/manifolds.hpp"

namespace tspdim {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Numbers

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  // %.17g ignores the global C++ locale; the C locale is never changed here.
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("not a number: '" + std::string(s) + "'");
  return v;
}

inline long long parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("not an integer: '" + std::string(s) + "'");
  return v;
}

// JSON number, or "inf" / "-inf" / null (= +inf).
inline double json_to_double(const json& j) {
  if (j.is_null()) return kInf;
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw InvalidArgument("expected a number");
}

inline json double_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

// ---------------------------------------------------------------------------
// RFC-4180 CSV

inline std::string csv_field(std::string_view f) {
  if (f.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

// Parses one record; quoted fields may span lines. Returns false at EOF.
inline bool read_csv_row(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          cur += '"';
          is.get();
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw InvalidArgument("csv: unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

// ---------------------------------------------------------------------------
// Point clouds: header `m=<int>,n=<int>,d_true=<int|?>`, one point per row.

inline void write_point_cloud(std::ostream& os, const PointCloud& c) {
  os << "m=" << c.dim() << ",n=" << c.size() << ",d_true=";
  if (c.meta().true_dim) os << *c.meta().true_dim;
  else os << '?';
  os << "\r\n";
  std::vector<std::string> row(c.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto p = c.point(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = format_double(p[j]);
    write_csv_row(os, row);
  }
}

inline PointCloud read_point_cloud(std::istream& is, double K_I = 1.0) {
  std::vector<std::string> f;
  if (!read_csv_row(is, f) || f.size() != 3) throw InvalidArgument("point cloud: missing header line");
  auto value = [&](std::size_t i, std::string_view key) {
    std::string_view s = f[i];
    if (s.substr(0, key.size()) != key || s.size() <= key.size() || s[key.size()] != '=')
      throw InvalidArgument("point cloud: header field " + std::to_string(i + 1) + " must be " + std::string(key) + "=...");
    return s.substr(key.size() + 1);
  };
  const auto m = parse_int(value(0, "m"));
  const auto n = parse_int(value(1, "n"));
  const auto dt = value(2, "d_true");
  if (m < 1 || n < 1) throw InvalidArgument("point cloud: header needs m >= 1 and n >= 1");
  CloudMeta meta;
  meta.sampler = "file";
  meta.K_I = K_I;
  if (dt != "?") meta.true_dim = static_cast<int>(parse_int(dt));
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(m * n));
  for (long long i = 0; i < n; ++i) {
    if (!read_csv_row(is, f)) throw InvalidArgument("point cloud: fewer rows than n");
    if (static_cast<long long>(f.size()) != m) throw InvalidArgument("point cloud: row " + std::to_string(i + 1) + " has wrong length");
    for (const auto& s : f) coords.push_back(parse_double(s));
  }
  while (read_csv_row(is, f))
    if (!(f.size() == 1 && f[0].empty())) throw InvalidArgument("point cloud: more rows than n");
  return PointCloud(static_cast<std::size_t>(m), std::move(coords), std::move(meta));
}

inline void save_point_cloud(const std::string& path, const PointCloud& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  write_point_cloud(os, c);
}

inline PointCloud load_point_cloud(const std::string& path, double K_I = 1.0) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path);
  return read_point_cloud(is, K_I);
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const RegularityParams& p) {
  return {{"m", p.m}, {"tau_g", double_to_json(p.tau_g)}, {"tau_l", double_to_json(p.tau_l)},
          {"K_I", p.K_I}, {"K_v", p.K_v}, {"K_p", p.K_p}};
}

// Missing K_v / K_p default to their loosest valid values for m and K_I.
inline RegularityParams params_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m")) throw InvalidArgument("params: object with 'm' required");
  const int m = j.at("m").get<int>();
  const double K = j.contains("K_I") ? j.at("K_I").get<double>() : 1.0;
  auto p = RegularityParams::defaults(m, K, j.contains("tau_g") ? json_to_double(j.at("tau_g")) : kInf,
                                      j.contains("tau_l") ? json_to_double(j.at("tau_l")) : kInf);
  if (j.contains("K_v")) p.K_v = j.at("K_v").get<double>();
  if (j.contains("K_p")) p.K_p = j.at("K_p").get<double>();
  const auto bad = validate_params(p);
  if (!bad.empty()) throw InvalidArgument("params: violated range " + bad.front());
  return p;
}

inline json to_json(const SamplerSpec& s) {
  json j = std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformCube>) {
          return {{"kind", "uniform_cube"}, {"d", k.d}};
        } else if constexpr (std::is_same_v<T, UniformSphere>) {
          return {{"kind", "uniform_sphere"}, {"d", k.d}, {"radius", k.radius}};
        } else if constexpr (std::is_same_v<T, ZigzagCurve>) {
          json o = {{"kind", "zigzag"}, {"d1", 1}, {"d2", k.params.d2}, {"n_blocks", k.params.n_blocks},
                    {"random_offsets", k.random_offsets}};
          if (!k.offsets.empty()) o["offsets"] = k.offsets;
          return o;
        } else {
          return {{"kind", "product_with_cube"}, {"base", to_json(*k.base)}, {"extra_dims", k.extra_dims}};
        }
      },
      s.kind);
  j["params"] = to_json(s.params);
  return j;
}

// Kinds: uniform_cube{d}, uniform_sphere{d, radius}, zigzag{d1, d2, n_blocks,
// offsets?, random_offsets?}, product_with_cube{base, extra_dims}.
inline SamplerSpec sampler_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    const auto params = params_from_json(j.at("params"));
    SamplerSpec s;
    if (kind == "uniform_cube") {
      s = uniform_cube_spec(j.at("d").get<int>(), params);
    } else if (kind == "uniform_sphere") {
      s = uniform_sphere_spec(j.at("d").get<int>(), j.value("radius", 1.0), params);
    } else if (kind == "zigzag") {
      std::vector<Point> offsets;
      if (j.contains("offsets")) offsets = j.at("offsets").get<std::vector<Point>>();
      s = zigzag_spec(j.value("d1", 1), j.at("d2").get<int>(), j.at("n_blocks").get<std::size_t>(), params,
                      std::move(offsets), j.value("random_offsets", false));
    } else if (kind == "product_with_cube") {
      s = product_with_cube(sampler_from_json(j.at("base")), j.at("extra_dims").get<int>());
      if (s.params.m != params.m) throw InvalidArgument("product_with_cube: params.m must be base m + extra_dims");
      s.params = params;
    } else {
      throw InvalidArgument("sampler: unknown kind '" + kind + "'");
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("sampler: ") + e.what());
  }
}

inline json to_json(const EstimatorConfig& c) {
  json th = json::object();
  for (const auto& [d, L] : c.thresholds) th[std::to_string(d)] = double_to_json(L);
  const auto& r = c.calibration;
  json cal = {{"kind", r.kind == CalibrationRecord::Kind::calibrated ? "calibrated" : "user_supplied"}};
  if (r.kind == CalibrationRecord::Kind::calibrated) {
    cal["seed"] = r.seed.value;
    cal["trials"] = r.trials;
    cal["safety"] = r.safety;
    cal["n_values"] = r.n_values;
    json refs = json::object(), obs = json::object();
    for (const auto& [d, name] : r.reference_samplers) refs[std::to_string(d)] = name;
    for (const auto& [d, v] : r.observed_max) obs[std::to_string(d)] = v;
    cal["reference_samplers"] = refs;
    cal["observed_max"] = obs;
  }
  return {{"m", c.m}, {"thresholds", th}, {"calibration", cal}};
}

inline EstimatorConfig estimator_config_from_json(const json& j) {
  try {
    EstimatorConfig c;
    c.m = j.at("m").get<int>();
    for (const auto& [key, v] : j.at("thresholds").items()) c.thresholds[static_cast<int>(parse_int(key))] = json_to_double(v);
    if (j.contains("calibration")) {
      const auto& cal = j.at("calibration");
      auto& r = c.calibration;
      if (cal.value("kind", "user_supplied") == "calibrated") {
        r.kind = CalibrationRecord::Kind::calibrated;
        r.seed = Seed{cal.value("seed", std::uint64_t{0})};
        r.trials = cal.value("trials", std::size_t{0});
        r.safety = cal.value("safety", 1.0);
        r.n_values = cal.value("n_values", std::vector<std::size_t>{});
        if (cal.contains("reference_samplers"))
          for (const auto& [key, v] : cal.at("reference_samplers").items())
            r.reference_samplers[static_cast<int>(parse_int(key))] = v.get<std::string>();
        if (cal.contains("observed_max"))
          for (const auto& [key, v] : cal.at("observed_max").items())
            r.observed_max[static_cast<int>(parse_int(key))] = json_to_double(v);
      }
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("estimator config: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << j.dump(2) << '\n';
}

}  // namespace tspdim
