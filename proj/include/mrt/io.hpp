#pragma once

#include <istream>
#include <string>

#include "json.hpp"
#include "mrt/curve.hpp"
#include "mrt/measure.hpp"

namespace mrt {

using Json = nlohmann::ordered_json;

// Rows of n coordinates then a weight; `#` comments and an optional `# dim=<n>` header.
DiscreteMeasure parse_csv(std::istream& in);
// {"dim": n, "atoms": [[x1, ..., xn, w], ...]}
DiscreteMeasure parse_json_measure(const std::string& text);

// Format is csv or json; empty infers it from the extension.
DiscreteMeasure load_measure(const std::string& path, const std::string& format = "");

Json measure_json(const DiscreteMeasure& mu);
Json point_json(const Point& x);

// Vertices, final-stage segments and explicit points, lengths and accounting.
Json curve_json(const CurveConstruction& c);

// Serializes with every floating-point number at 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

void save_text(const std::string& path, const std::string& text);

}  // namespace mrt
