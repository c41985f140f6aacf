// potlab command-line driver. Exit codes: 0 success, 1 input error,
// 2 numerical failure (including failed verifications).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "potlab/io.hpp"

namespace fs = std::filesystem;
using namespace potlab;
using io::json;

namespace {

struct Settings {
  std::string poly, measure, tree, grid = "", out;
  double tol = -1.0;
  std::uint64_t seed = 7;
  int threads = 0;
};

struct Run {
  std::optional<fs::path> out;
  io::RunManifest manifest;

  void input(const std::string& arg) {
    if (!arg.empty() && fs::is_regular_file(arg)) manifest.inputs.push_back(arg);
  }
  void write(const std::string& name, const std::string& text) {
    if (!out) return;
    io::write_text(*out / name, text);
    manifest.outputs.push_back((*out / name).string());
  }
};

Grid make_grid(const std::string& text, cplx center, double side) {
  int nx = tol::default_grid_nodes, ny = tol::default_grid_nodes;
  if (!text.empty()) {
    char comma = 0;
    std::istringstream in(text);
    if (!(in >> nx)) fail(Errc::invalid_input, "--grid expects NX,NY");
    if (in >> comma) {
      if (comma != ',' || !(in >> ny)) fail(Errc::invalid_input, "--grid expects NX,NY");
    } else {
      ny = nx;
    }
  }
  if (nx < 5 || ny < 5) fail(Errc::invalid_input, "grid needs at least 5 nodes per side");
  if (!(side > 0.0)) fail(Errc::invalid_input, "--side must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.h = side / (std::max(nx, ny) - 1);
  g.x0 = center.real() - 0.5 * g.h * (nx - 1);
  g.y0 = center.imag() - 0.5 * g.h * (ny - 1);
  return g;
}

std::vector<int> parse_indices(const std::string& text, int k) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const int v = std::stoi(item);
    if (v < 1 || v > k) fail(Errc::invalid_input, "index " + item + " outside 1.." + std::to_string(k));
    out.push_back(v - 1);
  }
  return out;
}

std::vector<cplx> load_path(const std::string& arg) {
  const json j = io::load_json(arg);
  const json& pts = j.is_object() ? j.at("points") : j;
  std::vector<cplx> path;
  for (const json& p : pts) path.push_back(io::complex_from_json(p));
  if (path.size() < 2) fail(Errc::invalid_input, "a path needs at least two vertices");
  return path;
}

// The harmonic tuple of the config and measure commands.
struct TupleArgs {
  std::string example, branches, base = "0", constants;
};

HarmonicTuple make_tuple(const TupleArgs& a, const Settings& s, Run& run) {
  if (a.example == "triple") return HarmonicTuple::from_branches({Poly{0.0}, Poly{2.0, 1.0}, Poly{-0.5}});
  if (!a.example.empty()) fail(Errc::invalid_input, "unknown example '" + a.example + "' (known: triple)");
  std::vector<double> c;
  if (!a.constants.empty()) {
    std::istringstream in(a.constants);
    std::string item;
    while (std::getline(in, item, ',')) c.push_back(std::stod(item));
  }
  if (!a.branches.empty()) {
    std::vector<Poly> q;
    std::istringstream in(a.branches);
    std::string item;
    while (std::getline(in, item, ';')) {
      auto rows = io::parse_shorthand(item);
      if (rows.size() > 1) fail(Errc::invalid_input, "branches are polynomials in z");
      q.emplace_back(rows[0].empty() ? std::vector<cplx>{0.0} : rows[0]);
    }
    return HarmonicTuple::from_branches(std::move(q), io::parse_complex(a.base), c);
  }
  if (s.poly.empty()) fail(Errc::invalid_input, "give --example, --branches or --poly");
  run.input(s.poly);
  return HarmonicTuple(io::load_bivariate(s.poly), io::parse_complex(a.base), {}, c);
}

json score_json(const TreeScore& s) {
  return {{"mass", io::to_json(s.mass)}, {"total_variation", s.total_variation},
          {"positivity_defect", s.positivity_defect}, {"objective", s.objective()}};
}

// Segment check for y^2 + y: sigma, densities, score and transform.
bool verify_segment(Run& run, double mass_tol) {
  const Poly P{0.0, 1.0, 1.0};
  json rep;
  bool ok = true;
  auto check = [&](const std::string& name, double value, double limit) {
    const bool pass = value <= limit;
    ok = ok && pass;
    rep["checks"].push_back({{"name", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
    std::cout << (pass ? "PASS " : "FAIL ") << name << " = " << io::num(value) << " (limit " << io::num(limit) << ")\n";
  };
  const auto sigma = critical_values(P);
  check("sigma_error", sigma.size() == 1 ? std::abs(sigma[0] + 4.0) : INFINITY, 1e-12);
  const AnalyticTree T = star_tree(sigma);
  TreeOptions opts;
  opts.nodes_per_edge = 50;
  const TreeMeasure m = tree_measure(T, P, opts);
  double dens = 0.0;
  for (const EdgeDensity& d : m.edges)
    for (size_t i = 0; i < d.t.size(); ++i) {
      const double x = d.z[i].real();
      const double exact = std::sqrt(4.0 + x) / (kTwoPi * std::sqrt(-x));
      dens = std::max(dens, std::abs(d.f[i] / d.speed[i] - exact) / exact);
    }
  check("density_rel_error", dens, 1e-6);
  const TreeScore s = score_tree(m);
  check("mass_error", std::abs(s.mass - 1.0), mass_tol);
  check("tv_error", std::abs(s.total_variation - 1.0), mass_tol);
  check("positivity_defect", s.positivity_defect, mass_tol);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(5.0, 50.0), t(0.0, kTwoPi);
  double tr = 0.0;
  for (int n = 0; n < 100; ++n) {
    const cplx z = std::polar(r(rng), t(rng));
    const cplx exact = (-1.0 + std::sqrt(1.0 + 4.0 / z)) / 2.0;
    tr = std::max(tr, std::abs(tree_cauchy(m, z) - exact) / std::abs(exact));
  }
  check("transform_rel_error", tr, 1e-8);
  const auto ext = exterior_branch(P, 100.0);
  check("exterior_a2_error", std::abs(ext.a2 + 1.0), 0.05);
  rep["pass"] = ok;
  rep["score"] = score_json(s);
  run.write("report.json", rep.dump(2) + "\n");
  run.write("tree.json", io::to_json(T).dump(2) + "\n");
  run.write("tree_density.csv", io::tree_density_csv(m));
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok;
}

int run_cli(std::vector<std::string> args);

int dispatch(std::vector<std::string> args) {
  CLI::App app{"potlab: subharmonic configurations, Cauchy transforms and branch-cut trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::version());
  Settings s;
  app.add_option("--poly", s.poly, "polynomial: JSON file, inline JSON or shorthand like \"y^2-z\"");
  app.add_option("--measure", s.measure, "measure JSON file");
  app.add_option("--tree", s.tree, "tree JSON file");
  app.add_option("--grid", s.grid, "grid nodes NX,NY");
  app.add_option("--tol", s.tol, "pass threshold for verification commands");
  app.add_option("--seed", s.seed, "random seed");
  app.add_option("--threads", s.threads, "cap on worker threads")->check(CLI::NonNegativeNumber);
  app.add_option("--out", s.out, "output directory (POTLAB_OUT overrides)");

  std::string zarg, path;
  int circle_n = 64;
  std::vector<std::string> circle;
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* c = parent->add_subcommand(name, help);
    c->fallthrough();
    return c;
  };

  auto* fiber = sub(&app, "fiber", "roots of P(z, .) at a point");
  fiber->add_option("--z", zarg, "point z")->required();

  auto* cont = sub(&app, "continue", "continue the roots along a path");
  auto* path_opt = cont->add_option("--path", path, "path JSON: [[re,im],...]");
  cont->add_option("--circle", circle, "closed circle: CENTER RADIUS")->expected(2)->excludes(path_opt);
  cont->add_option("--samples", circle_n, "vertices on a circle path");

  auto* mono = sub(&app, "monodromy", "permutation of the roots around a loop");
  auto* loop_opt = mono->add_option("--loop", path, "closed loop JSON");
  mono->add_option("--circle", circle, "CENTER RADIUS")->expected(2)->excludes(loop_opt);
  mono->add_option("--samples", circle_n, "vertices on the circle");

  // config
  auto* config = sub(&app, "config", "subharmonic configurations");
  config->require_subcommand(1);
  TupleArgs tuple;
  int k = 3;
  std::string pair, envelope = "max", indices, dir = "1,0", center = "0";
  double side = 1.0, radius = 0.1;
  int region = 1;
  auto tuple_options = [&](CLI::App* c) {
    c->add_option("--example", tuple.example, "built-in tuple: triple");
    c->add_option("--branches", tuple.branches, "explicit branches g_nu(z), ';'-separated");
    c->add_option("--base", tuple.base, "base point of the tuple");
    c->add_option("--constants", tuple.constants, "constants c_nu, ','-separated");
    c->add_option("--center", center, "grid centre");
    c->add_option("--side", side, "grid side length");
  };
  auto field_options = [&](CLI::App* c) {
    tuple_options(c);
    c->add_option("--pair", pair, "collinear configuration \"upper|lower\", 1-based ranks");
    c->add_option("--envelope", envelope, "max or min over --indices")->check(CLI::IsMember({"max", "min"}));
    c->add_option("--indices", indices, "index set, 1-based (default all)");
  };
  auto* c_enum = sub(config, "enumerate", "list collinear configurations");
  c_enum->add_option("--k", k, "number of functions")->required();
  auto* c_asm = sub(config, "assemble", "assemble a configuration and verify it");
  field_options(c_asm);
  auto* c_ver = sub(config, "verify", "mean-value subharmonicity check");
  field_options(c_ver);
  auto* c_fs = sub(config, "forward-star", "forward-star check of a dominant region");
  field_options(c_fs);
  c_fs->add_option("--region", region, "branch index, 1-based");
  c_fs->add_option("--dir", dir, "direction x,y");
  auto* c_lip = sub(config, "lipschitz", "interface Lipschitz estimate");
  field_options(c_lip);
  c_lip->add_option("--region", region, "branch index, 1-based");

  // measure
  auto* meas = sub(&app, "measure", "measures and Riesz densities");
  meas->require_subcommand(1);
  auto* m_tr = sub(meas, "transform", "Cauchy transform at a point");
  m_tr->add_option("--z", zarg, "point z")->required();
  auto* m_pot = sub(meas, "potential", "logarithmic potential at a point or on a grid");
  m_pot->add_option("--z", zarg, "point z");
  m_pot->add_option("--center", center, "grid centre");
  m_pot->add_option("--side", side, "grid side length");
  auto* m_jump = sub(meas, "jump", "jump densities of a configuration near a point");
  field_options(m_jump);
  m_jump->add_option("--radius", radius, "disk radius around --center");
  auto* m_st = sub(meas, "stokes", "Riesz mass in a disk from the boundary flux");
  field_options(m_st);
  m_st->add_option("--radius", radius, "circle radius");
  m_st->add_option("--at", zarg, "circle centre (default: grid centre)");
  auto* m_rel = sub(meas, "relation", "residual of P(z, mu^(z)) on a circle");
  m_rel->add_option("--radius", radius, "circle radius")->required();

  // tree
  auto* tree = sub(&app, "tree", "branch-cut trees for z P(y) = 1");
  tree->require_subcommand(1);
  int iterations = SearchConfig{}.iterations;
  auto* t_sigma = sub(tree, "sigma", "critical values");
  auto* t_meas = sub(tree, "measure", "jump densities along a tree (default: star tree)");
  auto* t_score = sub(tree, "score", "mass, total variation and positivity defect");
  auto* t_search = sub(tree, "search", "annealing search for a positive tree");
  t_search->add_option("--iterations", iterations, "proposals")->check(CLI::NonNegativeNumber);
  auto* t_ver = sub(tree, "verify-segment", "end-to-end check on the segment [-4, 0] for y^2 + y");

  auto* replay = sub(&app, "replay", "re-run the command recorded in a manifest");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "manifest.json")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (replay->parsed()) {
    const io::RunManifest m = io::RunManifest::from_json(io::load_json(manifest_path));
    std::vector<std::string> again;
    for (size_t i = 0; i < m.argv.size(); ++i) {
      if (m.argv[i] == "--out" && !s.out.empty()) {
        ++i;
        continue;
      }
      again.push_back(m.argv[i]);
    }
    if (!s.out.empty()) again.insert(again.end(), {"--out", s.out});
    return run_cli(again);
  }

  if (const char* env = std::getenv("POTLAB_OUT"); env && *env) s.out = env;
  set_thread_cap(s.threads);
  Run run;
  if (!s.out.empty()) run.out = fs::path(s.out);
  const auto t0 = std::chrono::steady_clock::now();
  run.manifest.argv = args;
  run.manifest.seed = s.seed;
  run.manifest.threads = s.threads;
  run.manifest.version = io::version();
  run.manifest.knobs = io::tolerance_table();
  for (CLI::App* c = &app; !c->get_subcommands().empty(); c = c->get_subcommands()[0])
    run.manifest.command += (run.manifest.command.empty() ? "" : " ") + c->get_subcommands()[0]->get_name();
  const Grid grid_default = make_grid(s.grid, io::parse_complex(center), side);
  run.manifest.knobs["grid_nx"] = grid_default.nx;
  run.manifest.knobs["grid_ny"] = grid_default.ny;
  int code = 0;

  auto need_poly = [&]() {
    if (s.poly.empty()) fail(Errc::invalid_input, "--poly is required");
    run.input(s.poly);
    return io::load_bivariate(s.poly);
  };
  auto need_measure = [&]() {
    if (s.measure.empty()) fail(Errc::invalid_input, "--measure is required");
    run.input(s.measure);
    return io::measure_from_json(io::load_json(s.measure));
  };
  auto make_field = [&](const HarmonicTuple& H) {
    const Grid g = make_grid(s.grid, io::parse_complex(center), side);
    if (!pair.empty()) return assemble_configuration(H, parse_collinear(pair, H.size()), g, io::parse_complex(center));
    std::vector<int> idx;
    if (indices.empty()) {
      idx.resize(H.size());
      std::iota(idx.begin(), idx.end(), 0);
    } else {
      idx = parse_indices(indices, H.size());
    }
    return envelope == "max" ? max_configuration(H, idx, g) : min_configuration(H, idx, g);
  };
  auto loop_from = [&]() {
    if (!circle.empty()) {
      run.manifest.knobs["circle_samples"] = circle_n;
      return circle_path(io::parse_complex(circle[0]), std::stod(circle[1]), circle_n);
    }
    if (path.empty()) fail(Errc::invalid_input, "give a path or --circle CENTER RADIUS");
    run.input(path);
    return load_path(path);
  };

  if (fiber->parsed()) {
    const auto P = need_poly();
    const cplx z = io::parse_complex(zarg);
    const auto roots = solve_fiber(P, z);
    json j = {{"z", io::to_json(z)}, {"roots", json::array()}};
    for (cplx y : roots) {
      std::cout << io::format_complex(y) << '\n';
      j["roots"].push_back(io::to_json(y));
    }
    run.write("fiber.json", j.dump(2) + "\n");
  } else if (cont->parsed()) {
    const auto P = need_poly();
    const auto p = loop_from();
    const BranchTrack track = continue_branches(P, p);
    double worst = track.max_residual(P);
    run.write("track.csv", io::track_csv(track, P));
    run.write("permutation.json", json({{"permutation", track.end_permutation},
                                        {"cycles", cycle_notation(track.end_permutation)}}).dump(2) + "\n");
    std::cout << "samples " << track.samples.size() << "\nmax_residual " << io::num(worst) << '\n';
    if (track.closed) std::cout << "permutation " << cycle_notation(track.end_permutation) << '\n';
  } else if (mono->parsed()) {
    const auto P = need_poly();
    const auto loop = loop_from();
    const Permutation perm = monodromy(P, loop.front(), loop);
    std::cout << cycle_notation(perm) << '\n';
    run.write("permutation.json", json({{"permutation", perm}, {"cycles", cycle_notation(perm)}}).dump(2) + "\n");
  } else if (c_enum->parsed()) {
    std::string text;
    for (const auto& c : enumerate_collinear_configurations(k)) {
      const std::string line = to_string(c) + (middle_active(c) ? " middle-active" : "");
      std::cout << line << '\n';
      text += line + '\n';
    }
    run.write("configurations.txt", text);
  } else if (c_asm->parsed() || c_ver->parsed()) {
    const HarmonicTuple H = make_tuple(tuple, s, run);
    const ConfigurationField F = make_field(H);
    const SubharmonicReport rep = verify_subharmonic(F);
    if (c_asm->parsed()) run.write("field.csv", io::field_csv(F));
    run.write("verify.json", io::to_json(rep).dump(2) + "\n");
    json brief = {{"pass", rep.pass()}, {"violations", rep.violations.size()}, {"mv_tol", rep.mv_tol}};
    std::cout << brief.dump() << '\n';
    code = rep.pass() ? 0 : 2;
  } else if (c_fs->parsed() || c_lip->parsed()) {
    const HarmonicTuple H = make_tuple(tuple, s, run);
    if (region < 1 || region > H.size()) fail(Errc::invalid_input, "--region outside 1..k");
    const ConfigurationField F = make_field(H);
    json j = {{"region", region}};
    if (c_fs->parsed()) {
      const cplx d = io::parse_complex(dir);
      const bool ok = verify_forward_star(region_of(F, region - 1), {d.real(), d.imag()});
      j["forward_star"] = ok;
      code = ok ? 0 : 2;
    } else {
      const double L = interface_lipschitz(F, region - 1);
      const double delta = separation_angle(H, region - 1, F.grid);
      j["lipschitz"] = L;
      j["separation_angle"] = delta;
      j["bound"] = 1.0 / std::tan(delta);
    }
    std::cout << j.dump() << '\n';
    run.write(c_fs->parsed() ? "forward_star.json" : "lipschitz.json", j.dump(2) + "\n");
  } else if (m_tr->parsed()) {
    const Measure mu = need_measure();
    const cplx v = cauchy_transform(mu, io::parse_complex(zarg));
    std::cout << io::format_complex(v) << '\n';
    run.write("transform.json", json({{"z", io::to_json(io::parse_complex(zarg))}, {"value", io::to_json(v)}}).dump(2) + "\n");
  } else if (m_pot->parsed()) {
    const Measure mu = need_measure();
    if (!zarg.empty()) {
      std::cout << io::num(log_potential(mu, io::parse_complex(zarg))) << '\n';
    } else {
      const ConfigurationField F = potential_field(mu, make_grid(s.grid, io::parse_complex(center), side));
      run.write("field.csv", io::field_csv(F));
      std::cout << "nodes " << F.grid.size() << '\n';
    }
  } else if (m_jump->parsed()) {
    const HarmonicTuple H = make_tuple(tuple, s, run);
    const ConfigurationField F = make_field(H);
    const cplx c = io::parse_complex(center);
    std::vector<LevelCurve> curves;
    for (int i = 0; i < H.size(); ++i)
      for (int j = i + 1; j < H.size(); ++j) {
        const double level = harmonic_value(H, i, c) - harmonic_value(H, j, c);
        for (bool fwd : {true, false}) {
          TraceOptions o;
          o.max_step = radius / 100;
          o.arclength_budget = 3 * radius;
          o.domain = std::pair<cplx, double>{c, 1.1 * radius};
          o.forward = fwd;
          o.backward = !fwd;
          curves.push_back(trace_level_curve(H, i, j, level, c, o));
        }
      }
    const RieszDensity R = jump_density(F, H, curves);
    run.write("density.csv", io::density_csv(R));
    const double mass = R.mass(std::pair<cplx, double>{c, radius});
    std::cout << json({{"interfaces", R.interfaces.size()}, {"mass", mass}, {"min_lambda", R.min_lambda()}}).dump() << '\n';
  } else if (m_st->parsed()) {
    ConfigurationField F;
    if (!s.measure.empty()) F = potential_field(need_measure(), make_grid(s.grid, io::parse_complex(center), side));
    else F = make_field(make_tuple(tuple, s, run));
    const cplx at = zarg.empty() ? F.grid.center() : io::parse_complex(zarg);
    std::cout << io::num(stokes_mass(F, at, radius)) << '\n';
  } else if (m_rel->parsed()) {
    const auto P = need_poly();
    const Measure mu = need_measure();
    const auto ring = circle_path(0.0, radius, 64);
    const double r = verify_algebraic_relation(P, mu, std::span<const cplx>(ring.data(), 64));
    const double limit = s.tol > 0 ? s.tol : 1e-8;
    std::cout << io::num(r) << (r <= limit ? " PASS" : " FAIL") << '\n';
    code = r <= limit ? 0 : 2;
  } else if (t_sigma->parsed() || t_meas->parsed() || t_score->parsed() || t_search->parsed()) {
    if (s.poly.empty()) fail(Errc::invalid_input, "--poly is required");
    run.input(s.poly);
    const Poly P = io::load_univariate(s.poly);
    const auto sigma = critical_values(P);
    if (t_sigma->parsed()) {
      json j = json::array();
      for (cplx v : sigma) {
        std::cout << io::format_complex(v) << '\n';
        j.push_back(io::to_json(v));
      }
      run.write("sigma.json", j.dump(2) + "\n");
    } else if (t_search->parsed()) {
      SearchConfig cfg;
      cfg.seed = s.seed;
      cfg.iterations = iterations;
      run.manifest.knobs["iterations"] = iterations;
      const SearchResult r = search_tree(P, cfg);
      run.write("best_tree.json", io::to_json(r.best).dump(2) + "\n");
      run.write("trace.csv", io::trace_csv(r.trace));
      json j = {{"initial_objective", r.initial_objective}, {"best", score_json(r.best_score)}};
      std::cout << j.dump() << '\n';
    } else {
      AnalyticTree T = star_tree(sigma);
      if (!s.tree.empty()) {
        run.input(s.tree);
        T = io::tree_from_json(io::load_json(s.tree));
      }
      const TreeMeasure m = tree_measure(T, P);
      const TreeScore sc = score_tree(m);
      if (t_meas->parsed()) run.write("tree_density.csv", io::tree_density_csv(m));
      run.write("score.json", score_json(sc).dump(2) + "\n");
      std::cout << score_json(sc).dump() << '\n';
    }
  } else if (t_ver->parsed()) {
    code = verify_segment(run, s.tol > 0 ? s.tol : 1e-8) ? 0 : 2;
  }

  run.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (run.out) io::write_text(*run.out / "manifest.json", run.manifest.to_json().dump(2) + "\n");
  return code;
}

int run_cli(std::vector<std::string> args) {
  try {
    return dispatch(std::move(args));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::input ? 1 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run_cli(std::vector<std::string>(argv + 1, argv + argc)); }
