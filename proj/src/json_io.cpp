#include "pramsey/json_io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pramsey/errors.hpp"

namespace pramsey::io {

json rat_to_json(const Rat& r) { return json(r.str()); }

Rat rat_from_json(const json& j) {
  if (j.is_string()) {
    auto parsed = Rat::parse(j.get<std::string>());
    if (!parsed) raise(ErrorKind::InvalidInput, "bad rational literal: " + j.get<std::string>());
    return *parsed;
  }
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_number_float()) return Rat::from_double(j.get<double>());
  raise(ErrorKind::InvalidInput, "expected a rational value");
}

json point_config_to_json(const PointConfig& c) {
  json j;
  j["dim"] = c.dim;
  json pts = json::array();
  for (int i = 0; i < c.size(); ++i) {
    json row = json::array();
    for (int k = 0; k < c.dim; ++k) row.push_back(c.points(i, k));
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  if (c.has_labels()) j["labels"] = c.labels;
  if (c.exact_sq) {
    SquaredDistanceMatrix m = SquaredDistanceMatrix::from_exact(*c.exact_sq);
    j["sq"] = sq_matrix_to_json(m);
  }
  return j;
}

PointConfig point_config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("points"))
    raise(ErrorKind::InvalidInput, "point config needs dim and points");
  PointConfig c;
  c.dim = j.at("dim").get<int>();
  if (c.dim < 0) raise(ErrorKind::InvalidInput, "dim must be nonnegative");
  const auto& pts = j.at("points");
  if (!pts.is_array()) raise(ErrorKind::InvalidInput, "points must be an array");
  c.points.resize(static_cast<int>(pts.size()), c.dim);
  int row = 0;
  for (const auto& p : pts) {
    if (!p.is_array() || static_cast<int>(p.size()) != c.dim)
      raise(ErrorKind::InvalidInput, "every point needs exactly dim coordinates");
    int col = 0;
    for (const auto& v : p) {
      if (v.is_string())
        c.points(row, col) = rat_from_json(v).to_double();
      else
        c.points(row, col) = v.get<double>();
      ++col;
    }
    ++row;
  }
  if (j.contains("labels")) {
    c.labels = j.at("labels").get<std::vector<std::string>>();
    if (static_cast<int>(c.labels.size()) != c.size())
      raise(ErrorKind::InvalidInput, "label count must match point count");
  }
  if (j.contains("sq")) {
    auto m = sq_matrix_from_json(j.at("sq"));
    if (m.n != c.size()) raise(ErrorKind::InvalidInput, "sq size must match point count");
    if (m.exact) c.exact_sq = m.exact;
  }
  return c;
}

json sq_matrix_to_json(const SquaredDistanceMatrix& m) {
  json j;
  j["n"] = m.n;
  j["mode"] = m.rational_mode() ? "rational" : "float";
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int k = 0; k < m.n; ++k) {
      if (m.exact)
        row.push_back(rat_to_json((*m.exact)[i][k]));
      else
        row.push_back(m.values(i, k));
    }
    rows.push_back(std::move(row));
  }
  j["sq"] = std::move(rows);
  return j;
}

SquaredDistanceMatrix sq_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("mode") || !j.contains("sq"))
    raise(ErrorKind::InvalidInput, "squared-distance matrix needs n, mode, sq");
  const int n = j.at("n").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  const auto& rows = j.at("sq");
  if (static_cast<int>(rows.size()) != n)
    raise(ErrorKind::InvalidInput, "sq row count mismatch");
  if (mode == "rational") {
    RatMatrix m(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        raise(ErrorKind::InvalidInput, "sq column count mismatch");
      for (int k = 0; k < n; ++k) m[i][k] = rat_from_json(rows[i][k]);
    }
    return SquaredDistanceMatrix::from_exact(std::move(m));
  }
  if (mode != "float") raise(ErrorKind::InvalidInput, "mode must be rational or float");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      raise(ErrorKind::InvalidInput, "sq column count mismatch");
    for (int k = 0; k < n; ++k) m(i, k) = rows[i][k].get<double>();
  }
  return SquaredDistanceMatrix::from_values(std::move(m));
}

json descriptor_to_json(const constructions::ConfigDescriptor& d) {
  using constructions::ConfigDescriptor;
  json j;
  switch (d.kind) {
    case ConfigDescriptor::Kind::Finite:
      j["type"] = "finite";
      j["config"] = point_config_to_json(d.finite);
      break;
    case ConfigDescriptor::Kind::Segment:
      j["type"] = "segment";
      j["a_sq"] = rat_to_json(d.segment->a_sq);
      j["gamma"] = rat_to_json(d.segment->gamma);
      break;
    case ConfigDescriptor::Kind::Spread: {
      j["type"] = "spread";
      if (d.spread->c_exact) {
        json c = json::array();
        for (const auto& v : *d.spread->c_exact) c.push_back(rat_to_json(v));
        j["c"] = std::move(c);
      } else {
        j["c"] = d.spread->c;
      }
      break;
    }
    case ConfigDescriptor::Kind::Brick: {
      j["type"] = "brick";
      if (d.brick->side_squares) {
        json s = json::array();
        for (const auto& v : *d.brick->side_squares) s.push_back(rat_to_json(v));
        j["side_squares"] = std::move(s);
      } else {
        j["sides"] = d.brick->sides;
      }
      break;
    }
    case ConfigDescriptor::Kind::Product:
      j["type"] = "product";
      j["left"] = descriptor_to_json(*d.prod->left);
      j["right"] = descriptor_to_json(*d.prod->right);
      break;
  }
  return j;
}

constructions::ConfigDescriptor descriptor_from_json(const json& j) {
  using constructions::ConfigDescriptor;
  if (!j.is_object() || !j.contains("type"))
    raise(ErrorKind::InvalidInput, "descriptor needs a type tag");
  const std::string type = j.at("type").get<std::string>();
  if (type == "finite") return ConfigDescriptor::make_finite(point_config_from_json(j.at("config")));
  if (type == "segment") {
    Rat a_sq = j.contains("a_sq") ? rat_from_json(j.at("a_sq"))
                                  : rat_from_json(j.at("a")) * rat_from_json(j.at("a"));
    return ConfigDescriptor::make_segment(
        constructions::SegmentSpec(a_sq, rat_from_json(j.at("gamma"))));
  }
  if (type == "spread") {
    constructions::SpreadSpec spec;
    const auto& c = j.at("c");
    bool exact = !c.empty() && c[0].is_string();
    if (exact) {
      std::vector<Rat> ce;
      for (const auto& v : c) ce.push_back(rat_from_json(v));
      for (const auto& v : ce) spec.c.push_back(v.to_double());
      spec.c_exact = std::move(ce);
    } else {
      spec.c = c.get<std::vector<double>>();
    }
    return ConfigDescriptor::make_spread(std::move(spec));
  }
  if (type == "brick") {
    if (j.contains("side_squares")) {
      std::vector<Rat> squares;
      for (const auto& v : j.at("side_squares")) squares.push_back(rat_from_json(v));
      return ConfigDescriptor::make_brick(
          constructions::BrickSpec::from_exact_squares(std::move(squares)));
    }
    if (j.at("sides").empty() || j.at("sides")[0].is_string()) {
      std::vector<Rat> squares;
      for (const auto& v : j.at("sides")) {
        Rat s = rat_from_json(v);
        squares.push_back(s * s);
      }
      return ConfigDescriptor::make_brick(
          constructions::BrickSpec::from_exact_squares(std::move(squares)));
    }
    return ConfigDescriptor::make_brick(
        constructions::BrickSpec::from_sides(j.at("sides").get<std::vector<double>>()));
  }
  if (type == "product")
    return ConfigDescriptor::make_product(descriptor_from_json(j.at("left")),
                                          descriptor_from_json(j.at("right")));
  raise(ErrorKind::InvalidInput, "unknown descriptor type: " + type);
}

json coloring_to_json(const combinatorics::Coloring& c) {
  json j;
  j["r"] = c.r;
  j["colors"] = c.colors;
  return j;
}

combinatorics::Coloring coloring_from_json(const json& j) {
  combinatorics::Coloring c;
  c.r = j.at("r").get<int>();
  c.colors = j.at("colors").get<std::vector<int>>();
  return c;
}

json congruence_map_to_json(const geometry::CongruenceMap& m) {
  json j;
  j["correspondence"] = m.correspondence;
  j["max_residual"] = m.max_residual;
  return j;
}

json coloring_search_to_json(const combinatorics::ColoringSearchResult& r) {
  json j;
  j["mode"] = r.mode == combinatorics::SearchMode::Exhaustive ? "exhaustive" : "sampled";
  j["certified"] = r.certified;
  j["colorings_checked"] = r.colorings_checked;
  j["seed"] = r.seed;
  j["copies_in_host"] = r.copies_in_host;
  if (r.counterexample) j["counterexample"] = coloring_to_json(*r.counterexample);
  if (r.sample_witness) j["witness"] = congruence_map_to_json(*r.sample_witness);
  return j;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json params_to_json(const pipeline::PipelineParams& p) {
  json j;
  j["delta"] = p.delta ? json(*p.delta) : json(nullptr);
  j["epsilon"] = p.epsilon ? json(*p.epsilon) : json(nullptr);
  j["margin"] = p.margin;
  j["search_budget"] = p.search_budget;
  j["tol"] = p.tol;
  j["seed"] = p.seed;
  return j;
}

pipeline::PipelineParams params_from_json(const json& j) {
  pipeline::PipelineParams p;
  if (j.contains("delta") && !j.at("delta").is_null()) p.delta = j.at("delta").get<double>();
  if (j.contains("epsilon") && !j.at("epsilon").is_null())
    p.epsilon = j.at("epsilon").get<double>();
  if (j.contains("margin")) p.margin = j.at("margin").get<double>();
  if (j.contains("search_budget")) p.search_budget = j.at("search_budget").get<std::uint64_t>();
  if (j.contains("tol")) p.tol = j.at("tol").get<double>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

json trace_to_json(const pipeline::PipelineTrace& t) {
  json j;
  j["input"] = point_config_to_json(t.input);
  j["d"] = t.d;
  j["slack"] = t.step1.slack;
  j["shrink_beta"] = t.step1.shrink_beta;
  j["rho"] = t.step1.rho;
  j["rho_prime"] = t.step1.rho_prime;
  j["s1"] = point_config_to_json(t.step1.s1);
  j["epsilon"] = t.epsilon_used;
  j["delta"] = t.delta_used;
  j["delta_rounds"] = t.delta_rounds;

  json spread;
  spread["c"] = t.spread.spec.c;
  spread["k"] = t.spread.k;
  spread["n"] = t.spread.n;
  spread["assignments"] = t.spread.assignments;
  spread["residual"] = t.spread.residual;
  spread["seed"] = t.spread.seed_used;
  spread["s2"] = point_config_to_json(t.spread.s2);
  j["spread"] = std::move(spread);

  j["residual_sq"] = matrix_to_json(t.residual_sq);
  j["s3"] = point_config_to_json(t.s3);
  j["regularity_beta"] = t.regularity_beta;
  j["regularity_epsilon"] = t.regularity_epsilon;

  json brick;
  brick["d"] = t.brick.d;
  json pairs = json::array();
  for (auto [a, b] : t.brick.axis_pairs) pairs.push_back(json::array({a, b}));
  brick["axis_pairs"] = std::move(pairs);
  brick["u"] = t.brick.u;
  brick["sides"] = t.brick.sides;
  brick["vertex_coords"] = matrix_to_json(t.brick.vertex_coords);
  brick["reconstruction_error"] = t.brick.reconstruction_error;
  j["brick"] = std::move(brick);

  j["f"] = point_config_to_json(t.assembled);
  j["final_residual"] = t.final_residual;
  j["rho_f"] = t.rho_f;
  j["params"] = params_to_json(t.params);
  return j;
}

json certificate_to_json(const pipeline::PRamseyCertificate& c) {
  json j;
  j["mu"] = rat_to_json(c.mu);
  j["gamma"] = rat_to_json(c.gamma_used);
  j["base_a_sq"] = rat_to_json(c.base_a_sq);
  j["margin_required"] = rat_to_json(c.margin_required);
  j["margin_achieved"] = rat_to_json(c.margin_achieved);
  j["seed"] = c.seed;
  json trials = json::array();
  for (const auto& t : c.density_trials) {
    json jt;
    jt["seed"] = t.seed;
    jt["sample_size"] = t.sample_size;
    jt["extracted_size"] = t.extracted_size;
    jt["ratio"] = rat_to_json(t.ratio);
    jt["ratio_ok"] = t.ratio_ok;
    jt["f_free"] = t.f_free;
    jt["base_segment_free"] = t.base_segment_free;
    jt["fiber_count"] = t.fiber_count;
    trials.push_back(std::move(jt));
  }
  j["density_trials"] = std::move(trials);
  json colorings = json::array();
  for (const auto& t : c.coloring_trials) {
    json jt;
    jt["host_points"] = t.host_points;
    jt["r"] = t.r;
    jt["certified"] = t.certified;
    jt["colorings_checked"] = t.colorings_checked;
    colorings.push_back(std::move(jt));
  }
  j["coloring_trials"] = std::move(colorings);
  return j;
}

std::string canonical_dump(const json& j) {
  // nlohmann's default object storage is key-sorted, and double formatting is
  // shortest-round-trip, so equal values serialize to equal bytes
  return j.dump(2) + "\n";
}

std::string digest(const json& j) {
  std::string s = canonical_dump(j);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::InvalidInput, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorKind::InvalidInput, "bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void atomic_write(const std::string& path, const std::string& contents) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << contents;
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace pramsey::io
