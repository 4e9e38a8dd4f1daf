#include "optstab/table.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "optstab/errors.hpp"
#include "optstab/scheme.hpp"

namespace optstab {

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InputError("Table: row width does not match the header");
  rows_.push_back(std::move(cells));
}

void Table::write(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const auto& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        os << c;
      } else {
        os << '"';
        for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      }
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string Table::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::string fmt(double x) { return ExtendedReal(x).str(); }
std::string fmt(ExtendedReal x) { return x.str(); }
std::string fmt(bool b) { return b ? "true" : "false"; }

std::string fmt(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

Json to_json(ExtendedReal x) {
  if (x.is_finite()) return x.value();
  return x.str();
}

ExtendedReal extended_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_extended(j.get<std::string>());
  throw InputError("expected a number or \"inf\" / \"-inf\"");
}

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(ExtendedReal(v[i])));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (j.is_number()) return pt({j.get<double>()});
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = extended_from_json(j[i]).value();
  return v;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of rows");
  const auto cols = vector_from_json(j[0]).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto r = vector_from_json(j[i]);
    if (r.size() != cols) throw InputError("matrix rows have different lengths");
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

namespace {

std::vector<Point> points_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of points");
  std::vector<Point> out;
  for (const auto& p : j) out.push_back(vector_from_json(p));
  return out;
}

Json points_to_json(const std::vector<Point>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(to_json(p));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const GaugeSet& c) {
  return std::visit(
      [&](const auto& b) -> Json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, HalfspaceBody>) {
          Json rows = Json::array();
          for (Eigen::Index i = 0; i < b.normals.rows(); ++i) {
            Eigen::VectorXd r(b.normals.cols() + 1);
            r << b.normals.row(i).transpose(), b.offsets[i];
            rows.push_back(to_json(r));
          }
          return {{"type", "halfspaces"}, {"rows", rows}};
        } else if constexpr (std::is_same_v<T, VertexBody>) {
          return {{"type", "vertices"}, {"points", points_to_json(b.vertices)}};
        } else if constexpr (std::is_same_v<T, NormBallBody>) {
          return {{"type", "norm_ball"}, {"dim", b.dim}, {"radius", b.radius}, {"p", to_json(ExtendedReal(b.p))}};
        } else {
          throw InputError("oracle gauges cannot be serialized");
        }
      },
      c.body());
}

GaugeSet gauge_from_json(const Json& j) {
  const auto type = field(j, "type").get<std::string>();
  if (type == "halfspaces") {
    const auto rows = matrix_from_json(field(j, "rows"));
    if (rows.cols() < 2) throw InputError("halfspace rows need a normal and an offset");
    return GaugeSet(HalfspaceBody{rows.leftCols(rows.cols() - 1), rows.col(rows.cols() - 1)});
  }
  if (type == "vertices") return GaugeSet(VertexBody{points_from_json(field(j, "points"))});
  if (type == "norm_ball")
    return GaugeSet(NormBallBody{field(j, "dim").get<Eigen::Index>(), j.value("radius", 1.0),
                                 j.contains("p") ? extended_from_json(j["p"]).value() : 2.0});
  throw InputError("unknown gauge type '" + type + "'");
}

Json to_json(const SetModel& a) {
  return std::visit(
      [&](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteCloud>) {
          return {{"type", "cloud"}, {"points", points_to_json(s.points)}};
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          Json pieces = Json::array();
          for (const auto& iv : s.pieces)
            pieces.push_back({{"lo", to_json(ExtendedReal(iv.lo))},
                              {"hi", to_json(ExtendedReal(iv.hi))},
                              {"lo_closed", iv.lo_closed},
                              {"hi_closed", iv.hi_closed}});
          return {{"type", "interval_union"}, {"pieces", pieces}};
        } else if constexpr (std::is_same_v<T, AxisSegments>) {
          Json segs = Json::array();
          for (const auto& g : s.segments)
            segs.push_back({{"axis", g.axis}, {"lo", g.lo}, {"hi", g.hi}, {"hi_closed", g.hi_closed}});
          return {{"type", "axis_segments"}, {"dim", s.dim}, {"segments", segs}};
        } else if constexpr (std::is_same_v<T, AffineSlab>) {
          return {{"type", "affine_slab"},
                  {"particular", to_json(s.particular)},
                  {"kernel", to_json(Eigen::MatrixXd(s.kernel.transpose()))},
                  {"lo", to_json(s.lo)},
                  {"hi", to_json(s.hi)}};
        } else {
          Json out = {{"type", "implicit"}, {"tag", s.tag}, {"dim", s.dim}, {"witness", to_json(s.witness)}};
          if (s.ball) out["ball"] = {{"center", to_json(s.ball->center)}, {"radius", s.ball->radius}};
          if (!s.vertices.empty()) out["vertices"] = points_to_json(s.vertices);
          return out;
        }
      },
      a.variant());
}

SetModel set_from_json(const Json& j) {
  const auto type = field(j, "type").get<std::string>();
  if (type == "cloud") return cloud(points_from_json(field(j, "points")));
  if (type == "interval_union") {
    std::vector<Interval> pieces;
    for (const auto& p : field(j, "pieces"))
      pieces.push_back({extended_from_json(field(p, "lo")).value(), extended_from_json(field(p, "hi")).value(),
                        p.value("lo_closed", true), p.value("hi_closed", true)});
    return interval_union(std::move(pieces));
  }
  if (type == "axis_segments") {
    AxisSegments s{field(j, "dim").get<Eigen::Index>(), {}};
    for (const auto& g : field(j, "segments"))
      s.segments.push_back({field(g, "axis").get<Eigen::Index>(), g.value("lo", 0.0), field(g, "hi").get<double>(),
                            g.value("hi_closed", true)});
    return s;
  }
  if (type == "affine_slab") {
    AffineSlab s;
    s.particular = vector_from_json(field(j, "particular"));
    const auto& k = field(j, "kernel");
    s.kernel = k.empty() ? Eigen::MatrixXd(s.particular.size(), 0) : Eigen::MatrixXd(matrix_from_json(k).transpose());
    s.lo = k.empty() ? Eigen::VectorXd() : vector_from_json(field(j, "lo"));
    s.hi = k.empty() ? Eigen::VectorXd() : vector_from_json(field(j, "hi"));
    return s;
  }
  if (type == "disk") return disk(vector_from_json(field(j, "center")), field(j, "radius").get<double>());
  if (type == "polygon") {
    const auto o = j.value("orientation", std::string("midpoint"));
    if (o != "midpoint" && o != "vertex") throw InputError("polygon orientation must be 'midpoint' or 'vertex'");
    return regular_polygon(field(j, "m").get<int>(),
                           o == "vertex" ? PolygonOrientation::vertex : PolygonOrientation::midpoint,
                           j.value("radius", 1.0));
  }
  throw InputError("unknown set type '" + type + "'");
}

Json to_json(const LipschitzCertificate& c) {
  return {{"kappa", c.kappa},   {"tau", c.tau},           {"eta", c.eta},
          {"sigma", c.sigma},   {"constant", c.constant}, {"eta_mode", c.eta_mode},
          {"inflation", c.inflation}, {"samples", c.samples}, {"seed", c.seed}};
}

std::vector<Point> parse_cloud(const std::string& text) {
  std::vector<Point> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    std::vector<double> xs;
    std::string tok = first;
    do {
      try {
        std::size_t used = 0;
        xs.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InputError("cloud line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    } while (ls >> tok);
    if (!out.empty() && static_cast<std::size_t>(out.front().size()) != xs.size())
      throw InputError("cloud line " + std::to_string(lineno) + ": dimension differs from the first point");
    out.push_back(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
  }
  if (out.empty()) throw InputError("cloud: no points");
  return out;
}

}  // namespace optstab
