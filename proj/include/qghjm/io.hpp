#pragma once

// JSON and CSV serialization. Readers reject unknown keys and throw
// ConfigPathError carrying a JSON pointer to the offending value.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qghjm/errors.hpp"
#include "qghjm/explosion_criteria.hpp"
#include "qghjm/forward_curve.hpp"
#include "qghjm/model.hpp"
#include "qghjm/sde_engine.hpp"

namespace qghjm {

using Json = nlohmann::ordered_json;

class ConfigPathError : public ConfigError {
 public:
  ConfigPathError(std::string pointer, const std::string& what)
      : ConfigError(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for
/// non-finite values).
std::string format_double(double x);

/// Throws ConfigPathError if `obj` is not an object or has keys outside
/// `allowed`.
void require_keys(const Json& obj, std::span<const std::string_view> allowed,
                  const std::string& pointer);

double get_number(const Json& obj, std::string_view key, double fallback,
                  const std::string& pointer);
std::size_t get_count(const Json& obj, std::string_view key, std::size_t fallback,
                      const std::string& pointer);

ModelParams model_from_json(const Json& j, const std::string& pointer = "/model");
ForwardCurve curve_from_json(const Json& j, const std::string& pointer = "/curve");
SimConfig sim_from_json(const Json& j, const std::string& pointer = "/sim");

Json to_json(const ModelParams& p);
Json to_json(const ForwardCurve& c);
Json to_json(const SimConfig& c);
Json to_json(const ConditionReport& r);
Json to_json(const LyapunovSpec& s);
Json to_json(const McEstimate& e);

/// path_index,t,r,y for every recorded sample.
void write_paths_csv(std::ostream& os, std::span<const PathResult> paths);
/// path_index,exploded,tau_hat
void write_explosions_csv(std::ostream& os, std::span<const PathResult> paths);
/// sigma,beta_max,delta2_star
void write_region_csv(std::ostream& os, const RegionCurve& curve);
/// t,r,y
void write_trace_csv(std::ostream& os, std::span<const State> trace);

struct FuturesRow {
  double T = 0.0;
  double delta = 0.0;
  McEstimate estimate;
};
/// T,delta,estimate,std_error,n_exploded,diverged
void write_futures_csv(std::ostream& os, std::span<const FuturesRow> rows);

/// 1-based line of the value at a JSON pointer inside `text`, found by
/// following the pointer's keys in order; 0 if it cannot be located.
std::size_t locate_line(std::string_view text, std::string_view pointer);

}  // namespace qghjm
