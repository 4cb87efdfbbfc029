#pragma once

// JSON encoding of ManifoldSpec.
//
// {
//   "name": "poincare_ball4",
//   "dimension": 4,
//   "domain": [[-0.45, 0.45], ...],
//   "metric": {"kind": "closed_form", "components": [["1", "0"], ["0", "1"]]}
//           | {"kind": "conformal", "factor": "<expr>"}
//           | {"kind": "potential", "potential": "<expr>"},
//   "connection": {"kind": "flat"} | {"kind": "levi_civita"}
//               | {"kind": "coefficients", "components": [k][i][j] of "<expr>"}
//               | {"kind": "cubic", "components": [k][i][j] of "<expr>"},
//   "provenance": {"family": "...", ...}          (optional)
// }

#include "statcurv/structure.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace statcurv {

using Json = nlohmann::ordered_json;

Json spec_to_json(const ManifoldSpec& spec);
ManifoldSpec spec_from_json(const Json& j);

/// Canonical text: two-space indented JSON with stable key order and a
/// trailing newline.
std::string dump_spec(const ManifoldSpec& spec);
ManifoldSpec parse_spec(const std::string& text);
ManifoldSpec load_spec_file(const std::string& path);

/// 64-bit FNV-1a of dump_spec, as 16 hex digits.
std::string spec_fingerprint(const ManifoldSpec& spec);

}  // namespace statcurv
