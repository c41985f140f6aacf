#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "potlab/measure.hpp"
#include "potlab/tree.hpp"

namespace potlab::io {

using json = nlohmann::ordered_json;

/// Shortest round-tripping decimal form; used for every number written.
std::string num(double x);
/// "2", "-0.5i", "1+2i".
std::string format_complex(cplx z);
/// "1.5", "1,-2" or "1-2i" style input.
cplx parse_complex(const std::string& text);

json to_json(cplx z);
cplx complex_from_json(const json& j);

// Polynomials ---------------------------------------------------------------

/// Shorthand like "y^2 - z", "3/2 z y^3 + y" or "-z*y + 1". Integer and
/// rational coefficients only. Returns c[j][m], the coefficient of y^j z^m.
std::vector<std::vector<cplx>> parse_shorthand(const std::string& text);
/// The shorthand as a relation P(z, y).
BivariatePolynomial bivariate_from_shorthand(const std::string& text);
/// The shorthand as a polynomial in y alone (no z allowed).
Poly univariate_from_shorthand(const std::string& text);

json to_json(const BivariatePolynomial& P);
BivariatePolynomial bivariate_from_json(const json& j);

/// A --poly argument: a path to a JSON file, inline JSON, or shorthand.
BivariatePolynomial load_bivariate(const std::string& arg);
/// A --poly argument for the tree commands: shorthand in y, or a relation
/// z P(y) - 1 in JSON form.
Poly load_univariate(const std::string& arg);

// Measures and trees --------------------------------------------------------

json to_json(const Measure& mu);
Measure measure_from_json(const json& j);
json to_json(const AnalyticTree& T);
AnalyticTree tree_from_json(const json& j);

/// Reads JSON from a path, or parses the argument itself when it starts with '{' or '['.
json load_json(const std::string& arg);
void write_text(const std::filesystem::path& path, const std::string& text);

// CSV exports ---------------------------------------------------------------

/// t, re(z), im(z), re(alpha_1), im(alpha_1), ..., residual, then a
/// "# {...}" footer line holding the end permutation.
std::string track_csv(const BranchTrack& track, const BivariatePolynomial& P);
/// s, re(z), im(z), residual.
std::string level_curve_csv(const LevelCurve& c);
/// x, y, V, active_index (1-based, 0 when unset).
std::string field_csv(const ConfigurationField& F);
/// s, re(z), im(z), lambda; one block per interface with an "interface" column.
std::string density_csv(const RieszDensity& R);
/// edge, t, re(z), im(z), weight, re(f), im(f).
std::string tree_density_csv(const TreeMeasure& m);
/// iteration, objective, mass_re, mass_im, tv, defect, accepted, best.
std::string trace_csv(const std::vector<TraceRow>& trace);

json to_json(const SubharmonicReport& r);

// Run manifests -------------------------------------------------------------

struct RunManifest {
  std::string command;                 // subcommand path, e.g. "tree search"
  std::vector<std::string> argv;       // arguments after the program name
  std::vector<std::string> inputs;     // files read
  std::map<std::string, double> knobs; // every tolerance plus the run's own settings
  std::uint64_t seed = 0;
  int threads = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;    // files written

  json to_json() const;
  static RunManifest from_json(const json& j);
};

/// The library-wide tolerances by name.
std::map<std::string, double> tolerance_table();
std::string version();

}  // namespace potlab::io
