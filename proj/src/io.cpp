#include "qghjm/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace qghjm {

namespace {

std::string join(const std::string& pointer, std::string_view key) {
  return pointer + "/" + std::string(key);
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void require_keys(const Json& obj, std::span<const std::string_view> allowed,
                  const std::string& pointer) {
  if (!obj.is_object()) throw ConfigPathError(pointer, pointer + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigPathError(join(pointer, key), join(pointer, key) + ": unknown key");
    }
  }
}

double get_number(const Json& obj, std::string_view key, double fallback,
                  const std::string& pointer) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw ConfigPathError(join(pointer, key), join(pointer, key) + ": expected a number");
  }
  return it->get<double>();
}

std::size_t get_count(const Json& obj, std::string_view key, std::size_t fallback,
                      const std::string& pointer) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigPathError(join(pointer, key),
                          join(pointer, key) + ": expected a non-negative integer");
  }
  return it->get<std::size_t>();
}

ModelParams model_from_json(const Json& j, const std::string& pointer) {
  static constexpr std::array<std::string_view, 7> keys{
      "sigma", "beta", "gamma", "epsilon", "lambda0", "displacement", "vol_cap"};
  require_keys(j, keys, pointer);
  ModelParams p;
  p.sigma = get_number(j, "sigma", p.sigma, pointer);
  p.beta = get_number(j, "beta", p.beta, pointer);
  p.gamma = get_number(j, "gamma", p.gamma, pointer);
  p.epsilon = get_number(j, "epsilon", p.epsilon, pointer);
  p.lambda0 = get_number(j, "lambda0", p.lambda0, pointer);
  p.displacement = get_number(j, "displacement", p.displacement, pointer);
  if (j.contains("vol_cap") && !j["vol_cap"].is_null()) {
    p.vol_cap = get_number(j, "vol_cap", 0.0, pointer);
  }
  return p;
}

ForwardCurve curve_from_json(const Json& j, const std::string& pointer) {
  static constexpr std::array<std::string_view, 3> keys{"kind", "lambda0", "knots"};
  require_keys(j, keys, pointer);
  const auto kind = j.value("kind", std::string{});
  try {
    if (kind == "flat") {
      if (j.contains("knots")) {
        throw ConfigPathError(join(pointer, "knots"), "flat curve takes no knots");
      }
      if (!j.contains("lambda0")) {
        throw ConfigPathError(pointer, pointer + ": flat curve needs lambda0");
      }
      return ForwardCurve::flat(get_number(j, "lambda0", 0.0, pointer));
    }
    if (kind == "tabulated") {
      const auto it = j.find("knots");
      if (it == j.end() || !it->is_array()) {
        throw ConfigPathError(join(pointer, "knots"),
                              join(pointer, "knots") + ": expected [[t, lambda], ...]");
      }
      std::vector<ForwardCurve::Knot> knots;
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& k = (*it)[i];
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
          const auto ptr = join(pointer, "knots/" + std::to_string(i));
          throw ConfigPathError(ptr, ptr + ": expected [t, lambda]");
        }
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
      }
      return ForwardCurve::tabulated(std::move(knots));
    }
  } catch (const ConfigPathError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigPathError(pointer, pointer + ": " + e.what());
  }
  throw ConfigPathError(join(pointer, "kind"),
                        join(pointer, "kind") + ": expected \"flat\" or \"tabulated\"");
}

SimConfig sim_from_json(const Json& j, const std::string& pointer) {
  static constexpr std::array<std::string_view, 6> keys{
      "dt", "horizon", "n_paths", "seed", "explosion_threshold", "record_stride"};
  require_keys(j, keys, pointer);
  SimConfig c;
  c.dt = get_number(j, "dt", c.dt, pointer);
  c.horizon = get_number(j, "horizon", c.horizon, pointer);
  c.n_paths = get_count(j, "n_paths", c.n_paths, pointer);
  c.seed = get_count(j, "seed", c.seed, pointer);
  c.explosion_threshold = get_number(j, "explosion_threshold", c.explosion_threshold, pointer);
  c.record_stride = get_count(j, "record_stride", c.record_stride, pointer);
  return c;
}

Json to_json(const ModelParams& p) {
  Json j;
  j["sigma"] = p.sigma;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["epsilon"] = p.epsilon;
  j["lambda0"] = p.lambda0;
  j["displacement"] = p.displacement;
  j["vol_cap"] = p.vol_cap ? Json(*p.vol_cap) : Json(nullptr);
  return j;
}

Json to_json(const ForwardCurve& c) {
  Json j;
  if (c.kind() == ForwardCurve::Kind::Flat) {
    j["kind"] = "flat";
    j["lambda0"] = c.value(0.0);
  } else {
    j["kind"] = "tabulated";
    j["knots"] = Json::array();
    for (const auto& [t, v] : c.knots()) j["knots"].push_back({t, v});
  }
  return j;
}

Json to_json(const SimConfig& c) {
  Json j;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["n_paths"] = c.n_paths;
  j["seed"] = c.seed;
  j["explosion_threshold"] = c.explosion_threshold;
  j["record_stride"] = c.record_stride;
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["condition"] = r.condition == Condition::I ? "I" : "II";
  j["mode"] = r.mode == CoefficientMode::Standard ? "standard" : "widened";
  j["satisfied"] = r.satisfied;
  j["sup_value"] = json_number(r.sup_value);
  j["witness_R"] = r.witness_R;
  j["delta1"] = r.witness_deltas.delta1;
  j["delta2"] = r.witness_deltas.delta2;
  return j;
}

Json to_json(const LyapunovSpec& s) {
  Json j;
  j["c1"] = s.c1;
  j["c2"] = s.c2;
  j["c3"] = s.c3;
  j["delta1"] = s.deltas.delta1;
  j["delta2"] = s.deltas.delta2;
  j["gamma"] = s.deltas.gamma;
  j["R"] = s.R;
  j["C"] = s.C;
  j["slope"] = s.slope;
  j["construction"] = s.construction == LyapunovSpec::Construction::Wedge ? "wedge" : "search";
  return j;
}

Json to_json(const McEstimate& e) {
  Json j;
  j["mean"] = json_number(e.mean);
  j["std_error"] = json_number(e.std_error);
  j["n"] = e.n;
  j["n_exploded"] = e.n_exploded;
  j["diverged"] = e.diverged;
  return j;
}

void write_paths_csv(std::ostream& os, std::span<const PathResult> paths) {
  os << "path_index,t,r,y\n";
  for (const auto& path : paths) {
    for (const auto& s : path.samples) {
      os << path.path_index << ',' << format_double(s.t) << ',' << format_double(s.r) << ','
         << format_double(s.y) << '\n';
    }
  }
}

void write_explosions_csv(std::ostream& os, std::span<const PathResult> paths) {
  os << "path_index,exploded,tau_hat\n";
  for (const auto& path : paths) {
    os << path.path_index << ',' << bool_str(path.exploded) << ','
       << format_double(path.tau_hat) << '\n';
  }
}

void write_region_csv(std::ostream& os, const RegionCurve& curve) {
  os << "sigma,beta_max,delta2_star\n";
  for (const auto& pt : curve.points) {
    os << format_double(pt.sigma) << ',' << format_double(pt.beta_max) << ','
       << format_double(pt.delta2_star) << '\n';
  }
}

void write_trace_csv(std::ostream& os, std::span<const State> trace) {
  os << "t,r,y\n";
  for (const auto& s : trace) {
    os << format_double(s.t) << ',' << format_double(s.r) << ',' << format_double(s.y) << '\n';
  }
}

void write_futures_csv(std::ostream& os, std::span<const FuturesRow> rows) {
  os << "T,delta,estimate,std_error,n_exploded,diverged\n";
  for (const auto& row : rows) {
    os << format_double(row.T) << ',' << format_double(row.delta) << ','
       << format_double(row.estimate.mean) << ',' << format_double(row.estimate.std_error) << ','
       << row.estimate.n_exploded << ',' << bool_str(row.estimate.diverged) << '\n';
  }
}

std::size_t locate_line(std::string_view text, std::string_view pointer) {
  std::size_t pos = 0;
  std::size_t start = 1;
  bool found_any = false;
  while (start <= pointer.size()) {
    const std::size_t end = std::min(pointer.find('/', start), pointer.size());
    const auto token = pointer.substr(start, end - start);
    start = end + 1;
    if (token.empty()) continue;
    if (std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;  // array index: stay at the enclosing key
    }
    const std::string needle = "\"" + std::string(token) + "\"";
    const std::size_t hit = text.find(needle, pos);
    if (hit == std::string_view::npos) break;
    pos = hit;
    found_any = true;
  }
  if (!found_any) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
}

}  // namespace qghjm
