#include "flatkhinchin/io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace flatkhinchin {

using nlohmann::json;

namespace {

struct Coord {
  double value = 0;
  std::optional<Rational> exact;
};

Coord parse_coord(const json& j) {
  Coord c;
  if (j.is_string()) {
    c.exact = Rational::parse(j.get<std::string>());
    c.value = c.exact->to_double();
    return c;
  }
  if (j.is_number_integer()) {
    c.exact = Rational(j.get<std::int64_t>());
    c.value = c.exact->to_double();
    return c;
  }
  if (j.is_number()) {
    c.value = j.get<double>();
    return c;
  }
  throw BadParameterError("coordinate must be a number or a string");
}

}  // namespace

TranslationSurface surface_from_json(const json& doc) {
  if (!doc.contains("polygons") || !doc.contains("gluings"))
    throw BadParameterError("surface spec needs 'polygons' and 'gluings'");

  std::vector<PolygonSpec> polys;
  bool all_exact = true;
  for (const json& jp : doc["polygons"]) {
    PolygonSpec ps;
    std::vector<RationalVec2> exact;
    bool poly_exact = true;
    for (const json& jv : jp) {
      if (!jv.is_array() || jv.size() != 2)
        throw BadParameterError("vertex must be [x, y]");
      Coord x = parse_coord(jv[0]), y = parse_coord(jv[1]);
      ps.vertices.push_back({x.value, y.value});
      if (x.exact && y.exact) {
        exact.push_back({*x.exact, *y.exact});
      } else {
        poly_exact = false;
      }
    }
    if (poly_exact) ps.exact = std::move(exact);
    all_exact = all_exact && poly_exact;
    polys.push_back(std::move(ps));
  }
  if (!all_exact)
    for (auto& ps : polys) ps.exact.reset();

  std::vector<EdgeGluing> gluings;
  for (const json& jg : doc["gluings"]) {
    if (!jg.is_array() || jg.size() != 4)
      throw BadParameterError("gluing must be [poly_a, edge_a, poly_b, edge_b]");
    gluings.push_back({jg[0].get<int>(), jg[1].get<int>(), jg[2].get<int>(),
                       jg[3].get<int>()});
  }

  std::vector<VertexRef> marked;
  if (doc.contains("marked_points"))
    for (const json& jm : doc["marked_points"])
      marked.push_back({jm[0].get<int>(), jm[1].get<int>()});

  return build_surface(std::move(polys), std::move(gluings), std::move(marked));
}

TranslationSurface surface_from_json_text(const std::string& text) {
  return surface_from_json(json::parse(text));
}

TranslationSurface surface_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParameterError("cannot open surface file: " + path);
  json doc;
  in >> doc;
  return surface_from_json(doc);
}

json surface_to_json(const TranslationSurface& s) {
  json polys = json::array();
  for (int p = 0; p < s.num_polygons(); ++p) {
    json jp = json::array();
    for (const Vec2& v : s.polygon(p).v) jp.push_back(json::array({v.x, v.y}));
    polys.push_back(jp);
  }
  json gluings = json::array();
  for (int p = 0; p < s.num_polygons(); ++p) {
    for (int e = 0; e < s.polygon(p).n; ++e) {
      const auto& link = s.link(p, e);
      if (link.poly > p || (link.poly == p && link.edge > e))
        gluings.push_back(json::array({p, e, link.poly, link.edge}));
    }
  }
  json marked = json::array();
  for (const SingularityInfo& info : s.singularities()) {
    if (!info.marked) continue;
    VertexRef best = info.corners.front();
    for (const VertexRef& c : info.corners)
      if (c.poly < best.poly || (c.poly == best.poly && c.vertex < best.vertex))
        best = c;
    marked.push_back(json::array({best.poly, best.vertex}));
  }
  return json{{"polygons", polys}, {"gluings", gluings}, {"marked_points", marked}};
}

TranslationSurface load_surface(const std::string& arg) {
  if (arg.rfind("builtin:", 0) == 0) return builtin_surface(arg.substr(8));
  return surface_from_file(arg);
}

json surface_info_json(const TranslationSurface& s) {
  json sings = json::array();
  for (const SingularityInfo& info : s.singularities()) {
    json corners = json::array();
    for (const VertexRef& c : info.corners)
      corners.push_back(json::array({c.poly, c.vertex}));
    sings.push_back(json{{"cone_angle_turns", info.cone_angle / kTwoPi},
                         {"multiplicity", info.multiplicity},
                         {"marked", info.marked},
                         {"corners", corners}});
  }
  json out{{"genus", s.genus()},
           {"sigma", s.sigma()},
           {"area", s.total_area()},
           {"multiplicity_sum", s.multiplicity_sum()},
           {"exact_input", s.exact_input()},
           {"singularities", sings}};
  if (s.has_blocking()) {
    out["shortest_saddle"] = s.shortest_saddle();
    auto c = covering_constant_formula(s);
    out["covering_constant_log2"] = c.log2_value;
    if (c.value) out["covering_constant"] = *c.value;
  }
  return out;
}

}  // namespace flatkhinchin
