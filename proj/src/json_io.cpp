#include "arakel/json_io.hpp"

namespace arakel {

namespace {

Rational rat(const nlohmann::json& j, const std::string& path) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::from_double(j.get<double>());
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path, "expected a rational literal");
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

}  // namespace

ProjPoint projpoint_parse(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "oo") return ProjPoint::infinity();
  return ProjPoint::at(Rational::parse(s));
}

ConvexProfile profile_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  std::string kind = j.value("kind", "pl");
  if (kind == "pl") {
    std::vector<Rational> bps, slopes;
    for (std::size_t i = 0; i < field(j, "breakpoints", path).size(); ++i)
      bps.push_back(rat(j["breakpoints"][i], path + ".breakpoints"));
    for (std::size_t i = 0; i < field(j, "slopes", path).size(); ++i)
      slopes.push_back(rat(j["slopes"][i], path + ".slopes"));
    Rational anchor = rat(field(j, "anchor_value", path), path + ".anchor_value");
    try {
      return ConvexProfile(std::move(bps), std::move(slopes), std::move(anchor));
    } catch (const std::exception& e) {
      throw SchemaError(path, e.what());
    }
  }
  if (kind == "sampled") {
    std::vector<double> vals;
    for (const auto& v : field(j, "values", path)) vals.push_back(v.get<double>());
    try {
      return ConvexProfile::sampled(field(j, "lo", path).get<double>(),
                                    field(j, "hi", path).get<double>(), std::move(vals),
                                    rat(field(j, "sigma_minus", path), path),
                                    rat(field(j, "sigma_plus", path), path));
    } catch (const std::exception& e) {
      throw SchemaError(path, e.what());
    }
  }
  throw SchemaError(path + ".kind", "expected \"pl\" or \"sampled\"");
}

nlohmann::json profile_to_json(const ConvexProfile& p) {
  nlohmann::json j;
  if (p.kind() == ProfileKind::piecewise_linear) {
    j["kind"] = "pl";
    j["breakpoints"] = nlohmann::json::array();
    for (const auto& b : p.pl().breakpoints) j["breakpoints"].push_back(b.to_string());
    j["slopes"] = nlohmann::json::array();
    for (const auto& s : p.pl().slopes) j["slopes"].push_back(s.to_string());
    j["anchor_value"] = p.pl().anchor_value.to_string();
    return j;
  }
  j["kind"] = "sampled";
  j["lo"] = p.grid_lo();
  j["hi"] = p.grid_hi();
  j["values"] = p.samples();
  j["sigma_minus"] = p.slope_minus().to_string();
  j["sigma_plus"] = p.slope_plus().to_string();
  return j;
}

LineMeasure measure_from_json(const nlohmann::json& j, const std::string& path) {
  LineMeasure m;
  for (const auto& a : field(j, "atoms", path)) {
    if (!a.is_array() || a.size() != 2) throw SchemaError(path + ".atoms", "expected pairs");
    m.atoms.push_back({rat(a[0], path + ".atoms"), rat(a[1], path + ".atoms")});
  }
  const auto& den = field(j, "density", path);
  if (!den.empty()) {
    if (den.size() != 2) throw SchemaError(path + ".density", "expected [breaks, values]");
    for (const auto& b : den[0]) m.density_breaks.push_back(rat(b, path + ".density"));
    for (const auto& v : den[1]) m.density_values.push_back(rat(v, path + ".density"));
  }
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  return m;
}

nlohmann::json measure_to_json(const LineMeasure& m) {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& [p, w] : m.atoms)
    j["atoms"].push_back({p.to_string(), w.to_string()});
  j["density"] = nlohmann::json::array();
  if (!m.density_breaks.empty()) {
    nlohmann::json breaks = nlohmann::json::array(), vals = nlohmann::json::array();
    for (const auto& b : m.density_breaks) breaks.push_back(b.to_string());
    for (const auto& v : m.density_values) vals.push_back(v.to_string());
    j["density"] = {breaks, vals};
  }
  return j;
}

AdditivePshTuple tuple_from_json(const nlohmann::json& j, const std::string& path) {
  AdditivePshTuple t;
  t.d = field(j, "d", path).get<std::size_t>();
  for (std::size_t e = 0; e < field(j, "entries", path).size(); ++e) {
    const auto& je = j["entries"][e];
    AdditiveEntry entry;
    std::string epath = path + ".entries[" + std::to_string(e) + "]";
    for (const auto& p : field(je, "phi", epath)) entry.phi.push_back(profile_from_json(p, epath + ".phi"));
    for (const auto& p : field(je, "psi", epath)) entry.psi.push_back(profile_from_json(p, epath + ".psi"));
    t.entries.push_back(std::move(entry));
  }
  for (const auto& r : field(j, "refs", path))
    t.refs.push_back(ReferenceProfile::pl_model(rat(r, path + ".refs")));
  try {
    t.validate();
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  return t;
}

ModelArithDivisor divisor_from_json(const nlohmann::json& j, const std::string& path) {
  ModelArithDivisor d;
  for (const auto& p : field(j, "points", path)) {
    if (!p.is_array() || p.size() != 2) throw SchemaError(path + ".points", "expected pairs");
    d.points.push_back({projpoint_parse(p[0].get<std::string>()), rat(p[1], path + ".points")});
  }
  if (j.contains("vertical"))
    for (const auto& v : j["vertical"])
      d.vertical.push_back({v[0].is_string() ? std::stoll(v[0].get<std::string>())
                                             : v[0].get<std::int64_t>(),
                            rat(v[1], path + ".vertical")});
  d.potential = profile_from_json(field(j, "green", path), path + ".green");
  if (j.contains("deviations"))
    for (const auto& [key, bumps] : j["deviations"].items()) {
      FiniteDeviation dev;
      for (const auto& b : bumps)
        dev.push_back({projpoint_parse(field(b, "center", path).get<std::string>()),
                       rat(field(b, "depth", path), path + ".deviations"),
                       rat(field(b, "coeff", path), path + ".deviations")});
      d.deviations[std::stoll(key)] = std::move(dev);
    }
  try {
    d.validate();
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  return d;
}

nlohmann::json divisor_to_json(const ModelArithDivisor& d) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& [x, m] : d.points) j["points"].push_back({x.to_string(), m.to_string()});
  j["vertical"] = nlohmann::json::array();
  for (const auto& [p, m] : d.vertical)
    j["vertical"].push_back({std::to_string(p), m.to_string()});
  j["green"] = profile_to_json(d.potential);
  j["deviations"] = nlohmann::json::object();
  for (const auto& [p, dev] : d.deviations) {
    nlohmann::json bumps = nlohmann::json::array();
    for (const auto& b : dev)
      bumps.push_back({{"center", b.center.to_string()},
                       {"depth", b.depth.to_string()},
                       {"coeff", b.coeff.to_string()}});
    j["deviations"][std::to_string(p)] = bumps;
  }
  return j;
}

AdelicArithDivisor adelic_from_json(const nlohmann::json& j, const std::string& path,
                                    std::size_t constant_terms) {
  AdelicArithDivisor a;
  if (j.contains("sequence")) {
    for (std::size_t i = 0; i < j["sequence"].size(); ++i)
      a.seq.terms.push_back(
          divisor_from_json(j["sequence"][i], path + ".sequence[" + std::to_string(i) + "]"));
    if (j.contains("modulus_base")) a.seq.modulus_base = rat(j["modulus_base"], path);
    if (j.contains("modulus_ratio")) a.seq.modulus_ratio = rat(j["modulus_ratio"], path);
    return a;
  }
  ModelArithDivisor d = divisor_from_json(j, path);
  a.seq.terms.assign(constant_terms, d);
  a.seq.modulus_base = Rational(1, 1000000);
  return a;
}

TreeInputJson tree_from_json(const nlohmann::json& j, const std::string& path) {
  TreeInputJson t;
  t.p = field(j, "p", path).get<std::int64_t>();
  for (const auto& s : field(j, "leaves", path))
    t.leaves.push_back(projpoint_parse(s.get<std::string>()));
  return t;
}

nlohmann::json tree_to_json(const BerkTree& t) {
  nlohmann::json j;
  j["p"] = t.p;
  j["leaves"] = nlohmann::json::array();
  j["edges"] = nlohmann::json::array();
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.is_leaf(v)) j["leaves"].push_back(t.vertices[v].leaf->to_string());
    if (v != t.root())
      j["edges"].push_back({{"from", t.vertices[v].parent},
                            {"to", v},
                            {"depth", t.vertices[v].depth.to_string()},
                            {"leaf", t.is_leaf(v) ? t.vertices[v].leaf->to_string() : ""}});
  }
  return j;
}

FlagFamily family_from_json(const nlohmann::json& j, const std::string& path) {
  FlagFamily fam;
  fam.g = field(j, "g", path).get<std::size_t>();
  fam.d = field(j, "d", path).get<std::size_t>();
  auto mat = [&](const nlohmann::json& a, std::size_t rows, std::size_t cols,
                 const std::string& p) {
    Eigen::MatrixXd M(rows, cols);
    if (a.size() != rows) throw SchemaError(p, "bad row count");
    for (std::size_t r = 0; r < rows; ++r) {
      if (a[r].size() != cols) throw SchemaError(p, "bad column count");
      for (std::size_t c = 0; c < cols; ++c) M(r, c) = a[r][c].get<double>();
    }
    return M;
  };
  fam.Y0 = mat(field(j, "Y0", path), fam.g, fam.g, path + ".Y0");
  for (const auto& r : field(j, "ranks", path)) fam.ranks.push_back(r.get<std::size_t>());
  const auto& blocks = field(j, "blocks", path);
  if (blocks.size() != fam.d) throw SchemaError(path + ".blocks", "need d blocks");
  for (std::size_t k = 0; k < fam.d; ++k) {
    std::size_t r = fam.ranks[k];
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(fam.g, fam.g);
    Y.topLeftCorner(r, r) = mat(blocks[k], r, r, path + ".blocks");
    fam.Yj.push_back(Y);
  }
  fam.alpha = mat(field(j, "alpha", path), fam.d + 1, fam.g, path + ".alpha");
  try {
    fam.validate();
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  return fam;
}

}  // namespace arakel
