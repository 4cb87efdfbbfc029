#include "statcurv/spec_io.hpp"

#include "statcurv/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace statcurv {
namespace {

MetricKind metric_kind_from(const std::string& s) {
  if (s == "closed_form") return MetricKind::ClosedForm;
  if (s == "conformal") return MetricKind::Conformal;
  if (s == "potential") return MetricKind::Potential;
  throw SpecError("unknown metric kind '" + s + "'");
}

ConnectionKind connection_kind_from(const std::string& s) {
  if (s == "flat") return ConnectionKind::Flat;
  if (s == "levi_civita") return ConnectionKind::LeviCivita;
  if (s == "coefficients") return ConnectionKind::Coefficients;
  if (s == "cubic") return ConnectionKind::Cubic;
  throw SpecError("unknown connection kind '" + s + "'");
}

// Flattens nested arrays of strings of the given depth, checking every level
// has exactly n entries.
void flatten(const Json& j, int depth, int n, std::vector<std::string>& out, const std::string& where) {
  if (depth == 0) {
    if (!j.is_string()) throw SpecError(where + ": expected an expression string");
    out.push_back(j.get<std::string>());
    return;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw SpecError(where + ": expected an array of length " + std::to_string(n));
  }
  for (const auto& e : j) flatten(e, depth - 1, n, out, where);
}

Json nest(const std::vector<std::string>& flat, int depth, int n, std::size_t& cursor) {
  if (depth == 0) return flat[cursor++];
  Json arr = Json::array();
  for (int i = 0; i < n; ++i) arr.push_back(nest(flat, depth - 1, n, cursor));
  return arr;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SpecError(std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

Json spec_to_json(const ManifoldSpec& spec) {
  const int n = spec.dimension;
  Json j;
  j["name"] = spec.name;
  j["dimension"] = n;
  Json dom = Json::array();
  for (const auto& iv : spec.domain) dom.push_back(Json::array({iv.lo, iv.hi}));
  j["domain"] = dom;

  Json metric;
  metric["kind"] = to_string(spec.metric.kind);
  switch (spec.metric.kind) {
    case MetricKind::ClosedForm: {
      std::size_t cursor = 0;
      metric["components"] = nest(spec.metric.components, 2, n, cursor);
      break;
    }
    case MetricKind::Conformal: metric["factor"] = spec.metric.components.at(0); break;
    case MetricKind::Potential: metric["potential"] = spec.metric.components.at(0); break;
  }
  j["metric"] = metric;

  Json conn;
  conn["kind"] = to_string(spec.connection.kind);
  if (spec.connection.kind == ConnectionKind::Coefficients || spec.connection.kind == ConnectionKind::Cubic) {
    std::size_t cursor = 0;
    conn["components"] = nest(spec.connection.components, 3, n, cursor);
  }
  j["connection"] = conn;

  if (!spec.provenance.empty()) {
    Json prov = Json::object();
    for (const auto& [k, v] : spec.provenance) prov[k] = v;
    j["provenance"] = prov;
  }
  return j;
}

ManifoldSpec spec_from_json(const Json& j) {
  try {
    ManifoldSpec spec;
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    spec.dimension = require(j, "dimension").get<int>();
    const int n = spec.dimension;
    if (n < 1 || n > kMaxDimension) throw SpecError("dimension out of range");
    for (const auto& iv : require(j, "domain")) {
      if (!iv.is_array() || iv.size() != 2) throw SpecError("domain entries must be [lo, hi]");
      spec.domain.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }

    const Json& metric = require(j, "metric");
    spec.metric.kind = metric_kind_from(require(metric, "kind").get<std::string>());
    switch (spec.metric.kind) {
      case MetricKind::ClosedForm: flatten(require(metric, "components"), 2, n, spec.metric.components, "metric"); break;
      case MetricKind::Conformal: spec.metric.components = {require(metric, "factor").get<std::string>()}; break;
      case MetricKind::Potential: spec.metric.components = {require(metric, "potential").get<std::string>()}; break;
    }

    const Json& conn = require(j, "connection");
    spec.connection.kind = connection_kind_from(require(conn, "kind").get<std::string>());
    if (spec.connection.kind == ConnectionKind::Coefficients || spec.connection.kind == ConnectionKind::Cubic) {
      flatten(require(conn, "components"), 3, n, spec.connection.components, "connection");
    }

    if (j.contains("provenance")) {
      for (const auto& [k, v] : j.at("provenance").items()) {
        spec.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed spec: ") + e.what());
  }
}

std::string dump_spec(const ManifoldSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

ManifoldSpec parse_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

ManifoldSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_fingerprint(const ManifoldSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_spec(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace statcurv
