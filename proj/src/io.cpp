#include "potlab/io.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

namespace potlab::io {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string format_complex(cplx z) {
  const double re = z.real(), im = z.imag();
  if (im == 0.0) return num(re);
  if (re == 0.0) return num(im) + "i";
  return num(re) + (im < 0 ? "-" : "+") + num(std::abs(im)) + "i";
}

cplx parse_complex(const std::string& text) {
  static const std::regex pair(R"(^\s*([^,\s]+)\s*,\s*([^,\s]+)\s*$)");
  static const std::regex with_i(R"(^\s*([-+]?[0-9.eE]+(?:[eE][-+]?[0-9]+)?)?\s*(?:([-+])\s*([0-9.eE]*)\s*i)?\s*$)");
  static const std::regex pure_i(R"(^\s*([-+]?)([0-9.eE]*)\s*i\s*$)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
    if (std::regex_match(text, m, pure_i)) {
      const double v = m[2].length() ? std::stod(m[2]) : 1.0;
      return {0.0, m[1] == "-" ? -v : v};
    }
    if (std::regex_match(text, m, with_i) && (m[1].matched || m[2].matched)) {
      const double re = m[1].matched ? std::stod(m[1]) : 0.0;
      double im = 0.0;
      if (m[2].matched) {
        im = m[3].length() ? std::stod(m[3]) : 1.0;
        if (m[2] == "-") im = -im;
      }
      return {re, im};
    }
  } catch (const std::logic_error&) {
  }
  fail(Errc::invalid_input, "cannot read a complex number from '" + text + "'");
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  fail(Errc::invalid_input, "expected a number or [re, im], got " + j.dump());
}

// ---------------------------------------------------------------------------

std::vector<std::vector<cplx>> parse_shorthand(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(Errc::invalid_input, "empty polynomial");
  std::vector<std::vector<cplx>> c;
  size_t p = 0;
  auto bad = [&](const std::string& why) {
    fail(Errc::invalid_input, "polynomial '" + text + "': " + why + " at position " + std::to_string(p));
  };
  auto integer = [&]() {
    const size_t start = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p == start) bad("expected a digit");
    return std::stoll(s.substr(start, p - start));
  };
  while (p < s.size()) {
    double sign = 1.0;
    if (s[p] == '+' || s[p] == '-') sign = s[p++] == '-' ? -1.0 : 1.0;
    else if (p > 0) bad("expected + or -");
    double coef = 1.0;
    bool any = false;
    if (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      coef = static_cast<double>(integer());
      if (p < s.size() && s[p] == '/') {
        ++p;
        const long long d = integer();
        if (d == 0) bad("division by zero");
        coef /= static_cast<double>(d);
      }
      any = true;
    }
    int jy = 0, mz = 0;
    while (p < s.size() && s[p] != '+' && s[p] != '-') {
      if (s[p] == '*') {
        if (++p == s.size() || (s[p] != 'y' && s[p] != 'z')) bad("expected y or z after '*'");
        continue;
      }
      const char v = s[p];
      if (v != 'y' && v != 'z') bad(std::string("unexpected '") + v + "'");
      ++p;
      int e = 1;
      if (p < s.size() && s[p] == '^') {
        ++p;
        e = static_cast<int>(integer());
      }
      (v == 'y' ? jy : mz) += e;
      any = true;
    }
    if (!any) bad("empty term");
    if (static_cast<int>(c.size()) <= jy) c.resize(jy + 1);
    if (static_cast<int>(c[jy].size()) <= mz) c[jy].resize(mz + 1);
    c[jy][mz] += sign * coef;
  }
  return c;
}

BivariatePolynomial bivariate_from_shorthand(const std::string& text) {
  std::vector<Poly> p;
  for (auto& row : parse_shorthand(text)) p.emplace_back(row.empty() ? std::vector<cplx>{0.0} : row);
  return BivariatePolynomial(std::move(p));
}

Poly univariate_from_shorthand(const std::string& text) {
  std::vector<cplx> c;
  for (const auto& row : parse_shorthand(text)) {
    for (size_t m = 1; m < row.size(); ++m)
      if (row[m] != cplx{}) fail(Errc::invalid_input, "'" + text + "' must be a polynomial in y alone");
    c.push_back(row.empty() ? cplx{} : row[0]);
  }
  return Poly(std::move(c));
}

json to_json(const BivariatePolynomial& P) {
  json coeffs = json::array();
  for (const Poly& q : P.coeffs()) {
    json row = json::array();
    for (int m = 0; m <= std::max(0, q.degree()); ++m) row.push_back(to_json(q.coeff(m)));
    coeffs.push_back(row);
  }
  return {{"degree_y", P.degree_y()}, {"coeffs", coeffs}};
}

BivariatePolynomial bivariate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    fail(Errc::invalid_input, "polynomial JSON needs a \"coeffs\" array");
  std::vector<Poly> p;
  for (const json& row : j["coeffs"]) {
    if (!row.is_array()) fail(Errc::invalid_input, "each entry of \"coeffs\" must be an array of [re, im]");
    std::vector<cplx> c;
    for (const json& x : row) c.push_back(complex_from_json(x));
    if (c.empty()) c.push_back(0.0);
    p.emplace_back(std::move(c));
  }
  BivariatePolynomial P(std::move(p));
  if (j.contains("degree_y") && j["degree_y"].get<int>() != P.degree_y())
    fail(Errc::invalid_input, "degree_y does not match the coefficient list");
  return P;
}

json load_json(const std::string& arg) {
  const size_t first = arg.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return json::parse(arg);
    std::ifstream in(arg);
    if (!in) fail(Errc::invalid_input, "cannot open '" + arg + "'");
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("malformed JSON: ") + e.what());
  }
}

namespace {

bool looks_like_json(const std::string& arg) {
  const size_t first = arg.find_first_not_of(" \t\r\n");
  return (first != std::string::npos && arg[first] == '{') || std::filesystem::is_regular_file(arg);
}

}  // namespace

BivariatePolynomial load_bivariate(const std::string& arg) {
  if (looks_like_json(arg)) return bivariate_from_json(load_json(arg));
  return bivariate_from_shorthand(arg);
}

Poly load_univariate(const std::string& arg) {
  if (!looks_like_json(arg)) return univariate_from_shorthand(arg);
  const BivariatePolynomial R = bivariate_from_json(load_json(arg));
  // recover P from z P(y) - 1
  std::vector<cplx> c{0.0};
  if (R.coeff(0) != Poly{-1.0}) fail(Errc::invalid_input, "tree relation must have p_0 = -1");
  for (int j = 1; j <= R.degree_y(); ++j) {
    const Poly& q = R.coeff(j);
    if (q.degree() > 1 || q.coeff(0) != cplx{}) fail(Errc::invalid_input, "tree relation must have p_j = c_j z");
    c.push_back(q.coeff(1));
  }
  return Poly(std::move(c));
}

// ---------------------------------------------------------------------------

json to_json(const Measure& mu) {
  json atoms = json::array(), arcs = json::array();
  for (const Atom& a : mu.atoms) atoms.push_back({{"z", to_json(a.z)}, {"w", a.w}});
  for (const Arc& a : mu.arcs) {
    json pts = json::array();
    for (cplx z : a.points) pts.push_back(to_json(z));
    json arc = {{"points", pts}, {"density", a.density}};
    if (a.rule == ArcRuleKind::gauss_jacobi) {
      arc["rule"] = "gauss_jacobi";
      arc["alpha"] = a.alpha;
      arc["beta"] = a.beta;
    } else {
      arc["rule"] = "trapezoid";
    }
    arcs.push_back(arc);
  }
  return {{"atoms", atoms}, {"arcs", arcs}};
}

Measure measure_from_json(const json& j) {
  Measure mu;
  try {
    for (const json& a : j.value("atoms", json::array())) mu.atoms.push_back({complex_from_json(a.at("z")), a.at("w").get<double>()});
    for (const json& a : j.value("arcs", json::array())) {
      Arc arc;
      for (const json& p : a.at("points")) arc.points.push_back(complex_from_json(p));
      arc.density = a.at("density").get<std::vector<double>>();
      const std::string rule = a.value("rule", "trapezoid");
      if (rule == "gauss_jacobi") {
        arc.rule = ArcRuleKind::gauss_jacobi;
        arc.alpha = a.value("alpha", 0.0);
        arc.beta = a.value("beta", 0.0);
      } else if (rule != "trapezoid") {
        fail(Errc::invalid_input, "unknown arc rule '" + rule + "'");
      }
      if (arc.points.size() < 2) fail(Errc::invalid_input, "an arc needs at least two points");
      if (arc.rule == ArcRuleKind::trapezoid && arc.density.size() != arc.points.size())
        fail(Errc::invalid_input, "trapezoid arcs need one density sample per point");
      if (arc.density.empty()) fail(Errc::invalid_input, "arc without density samples");
      mu.arcs.push_back(std::move(arc));
    }
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("measure JSON: ") + e.what());
  }
  mu.validate();
  return mu;
}

json to_json(const AnalyticTree& T) {
  json nodes = json::array(), edges = json::array();
  for (cplx z : T.nodes) nodes.push_back(to_json(z));
  for (const TreeEdge& e : T.edges) {
    json ctrl = json::array();
    for (cplx z : e.ctrl) ctrl.push_back(to_json(z));
    edges.push_back({{"a", e.a}, {"b", e.b}, {"ctrl", ctrl}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

AnalyticTree tree_from_json(const json& j) {
  AnalyticTree T;
  try {
    for (const json& z : j.at("nodes")) T.nodes.push_back(complex_from_json(z));
    for (const json& e : j.at("edges")) {
      TreeEdge edge{e.at("a").get<int>(), e.at("b").get<int>(), {}};
      for (const json& z : e.value("ctrl", json::array())) edge.ctrl.push_back(complex_from_json(z));
      T.edges.push_back(std::move(edge));
    }
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("tree JSON: ") + e.what());
  }
  return T;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::invalid_input, "cannot write '" + path.string() + "'");
  out << text;
}

// ---------------------------------------------------------------------------

std::string track_csv(const BranchTrack& track, const BivariatePolynomial& P) {
  std::ostringstream out;
  const int k = P.degree_y();
  out << "t,re_z,im_z";
  for (int nu = 1; nu <= k; ++nu) out << ",re_a" << nu << ",im_a" << nu;
  out << ",residual\n";
  for (const BranchSample& s : track.samples) {
    double res = 0.0;
    out << num(s.t) << ',' << num(s.z.real()) << ',' << num(s.z.imag());
    for (cplx y : s.roots) {
      out << ',' << num(y.real()) << ',' << num(y.imag());
      res = std::max(res, P.residual(s.z, y));
    }
    out << ',' << num(res) << '\n';
  }
  json footer = {{"permutation", track.end_permutation}, {"cycles", cycle_notation(track.end_permutation)},
                 {"closed", track.closed}};
  out << "# " << footer.dump() << '\n';
  return out.str();
}

std::string level_curve_csv(const LevelCurve& c) {
  std::ostringstream out;
  out << "s,re_z,im_z,residual\n";
  for (size_t m = 0; m < c.points.size(); ++m)
    out << num(c.s[m]) << ',' << num(c.points[m].real()) << ',' << num(c.points[m].imag()) << ','
        << num(m < c.residuals.size() ? c.residuals[m] : 0.0) << '\n';
  return out.str();
}

std::string field_csv(const ConfigurationField& F) {
  std::ostringstream out;
  out << "x,y,V,active_index\n";
  for (int iy = 0; iy < F.grid.ny; ++iy)
    for (int ix = 0; ix < F.grid.nx; ++ix) {
      const size_t idx = F.grid.index(ix, iy);
      const cplx z = F.grid.node(ix, iy);
      const int a = idx < F.active.size() ? F.active[idx] : -1;
      out << num(z.real()) << ',' << num(z.imag()) << ',' << num(F.values[idx]) << ',' << a + 1 << '\n';
    }
  return out.str();
}

std::string density_csv(const RieszDensity& R) {
  std::ostringstream out;
  out << "interface,i,j,active,s,re_z,im_z,lambda\n";
  for (size_t n = 0; n < R.interfaces.size(); ++n) {
    const InterfaceDensity& d = R.interfaces[n];
    for (size_t m = 0; m < d.points.size(); ++m)
      out << n << ',' << d.i + 1 << ',' << d.j + 1 << ',' << d.a + 1 << ',' << num(d.s[m]) << ','
          << num(d.points[m].real()) << ',' << num(d.points[m].imag()) << ','
          << num(m < d.lambda.size() ? d.lambda[m] : 0.0) << '\n';
  }
  return out.str();
}

std::string tree_density_csv(const TreeMeasure& m) {
  std::ostringstream out;
  out << "edge,t,re_z,im_z,weight,re_f,im_f\n";
  for (const EdgeDensity& d : m.edges)
    for (size_t i = 0; i < d.t.size(); ++i)
      out << d.edge << ',' << num(d.t[i]) << ',' << num(d.z[i].real()) << ',' << num(d.z[i].imag()) << ','
          << num(d.weights[i]) << ',' << num(d.f[i].real()) << ',' << num(d.f[i].imag()) << '\n';
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "iteration,objective,mass_re,mass_im,tv,defect,accepted,best\n";
  for (const TraceRow& r : trace)
    out << r.iteration << ',' << num(r.objective) << ',' << num(r.mass.real()) << ',' << num(r.mass.imag()) << ','
        << num(r.tv) << ',' << num(r.defect) << ',' << (r.accepted ? 1 : 0) << ',' << num(r.best) << '\n';
  return out.str();
}

json to_json(const SubharmonicReport& r) {
  json v = json::array();
  for (const Violation& x : r.violations) v.push_back({{"x", x.z.real()}, {"y", x.z.imag()}, {"deficit", x.deficit}});
  return {{"pass", r.pass()}, {"mv_tol", r.mv_tol}, {"violations", v}};
}

// ---------------------------------------------------------------------------

std::map<std::string, double> tolerance_table() {
  return {
      {"root_max_iter", tol::root_max_iter},
      {"residual_tol", tol::residual},
      {"degenerate_tol", tol::degenerate},
      {"min_step", tol::min_step},
      {"cluster_rel", tol::cluster_rel},
      {"quad_tol", tol::quad},
      {"trace_tol", tol::trace},
      {"grad_rel", tol::grad_rel},
      {"stall_tol", tol::stall},
      {"order_rel", tol::order_rel},
      {"collinear_tol", tol::collinear},
      {"assemble_tol", tol::assemble},
      {"hull_rel", tol::hull_rel},
      {"mv_abs", tol::mv_abs},
      {"mv_curvature_factor", tol::mv_curvature_factor},
      {"mean_value_samples", tol::mean_value_samples},
      {"eval_clearance_rel", tol::eval_clearance_rel},
      {"jump_rel", tol::jump_rel},
      {"side_eps_rel", tol::side_eps_rel},
      {"tv_tol", tol::tv},
      {"anneal_t0", tol::anneal_t0},
      {"anneal_decay", tol::anneal_decay},
      {"default_grid_nodes", tol::default_grid_nodes},
      {"stokes_samples", tol::stokes_samples},
      {"tree_nodes_per_edge", TreeOptions{}.nodes_per_edge},
      {"search_move_scale", SearchConfig{}.move_scale},
      {"search_rewire_prob", SearchConfig{}.rewire_prob},
  };
}

std::string version() { return "0.1.0"; }

json RunManifest::to_json() const {
  return {{"command", command}, {"argv", argv},       {"inputs", inputs},
          {"knobs", knobs},     {"seed", seed},       {"threads", threads},
          {"version", version}, {"wall_seconds", wall_seconds}, {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.inputs = j.value("inputs", std::vector<std::string>{});
    m.knobs = j.value("knobs", std::map<std::string, double>{});
    m.seed = j.value("seed", std::uint64_t{0});
    m.threads = j.value("threads", 0);
    m.version = j.value("version", std::string{});
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.outputs = j.value("outputs", std::vector<std::string>{});
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace potlab::io
