#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "optstab/gauge.hpp"
#include "optstab/linear.hpp"
#include "optstab/sets.hpp"

namespace optstab {

/// Comma-delimited table with a header row.  Cells are preformatted text.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  void write(std::ostream& os) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Round-trip formatting: %.17g, "inf" and "-inf".
std::string fmt(double x);
std::string fmt(ExtendedReal x);
std::string fmt(bool b);
std::string fmt(const Eigen::VectorXd& v);

using Json = nlohmann::ordered_json;

Json to_json(ExtendedReal x);
ExtendedReal extended_from_json(const Json& j);
Json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
Json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// {"type": "halfspaces", "rows": [[a..., b], ...]}, {"type": "vertices",
/// "points": [...]}, {"type": "norm_ball", "dim", "radius", "p"}.  Oracle
/// bodies cannot be serialized.
Json to_json(const GaugeSet& c);
GaugeSet gauge_from_json(const Json& j);

/// Clouds, interval unions, axis segments and affine slabs round-trip;
/// implicit sets are written as descriptions, and read back only for the
/// "disk" and "polygon" forms.
Json to_json(const SetModel& a);
SetModel set_from_json(const Json& j);

Json to_json(const LipschitzCertificate& c);

/// One point per line, coordinates separated by commas or whitespace;
/// blank lines and lines starting with '#' are skipped.
std::vector<Point> parse_cloud(const std::string& text);

}  // namespace optstab
