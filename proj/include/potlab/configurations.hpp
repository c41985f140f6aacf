#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "potlab/grid.hpp"
#include "potlab/harmonic.hpp"
#include "potlab/parallel.hpp"

namespace potlab {

/// A piecewise-harmonic function sampled on a grid. Branch indices are 0-based.
struct ConfigurationField {
  Grid grid;
  int k = 0;
  std::vector<double> values;
  std::vector<int> active;
  std::vector<int> index_set;
  /// components[nu][node] = H_nu + c_nu as used in the envelope (empty if not kept).
  std::vector<std::vector<double>> components;
  /// V is the envelope of pieces[piece[node]] near each node: the largest
  /// component when envelope = +1, the smallest when -1. Empty when unknown.
  std::vector<std::vector<int>> pieces;
  std::vector<int> piece;
  int envelope = 1;
};

struct RegionMask {
  Grid grid;
  std::vector<char> inside;
};

RegionMask region_of(const ConfigurationField& F, int nu);

enum class HullStatus { extreme, interior, on_edge };

struct HullProfile {
  std::vector<HullStatus> status;
  bool degenerate = false;
  std::string warning;
};

HullProfile extreme_point_profile(std::span<const cplx> gradients);
const char* hull_status_name(HullStatus s);

/// components[nu][node] = H_nu(node) + c_nu for every branch.
std::vector<std::vector<double>> evaluate_components(const HarmonicTuple& H, const Grid& grid,
                                                     Execution exec = Execution::parallel);

/// Upper envelope over index_set; ties go to the smallest index.
ConfigurationField max_configuration(const HarmonicTuple& H, std::vector<int> index_set, const Grid& grid,
                                     Execution exec = Execution::parallel);
/// Lower envelope (not subharmonic in general; a negative control).
ConfigurationField min_configuration(const HarmonicTuple& H, std::vector<int> index_set, const Grid& grid,
                                     Execution exec = Execution::parallel);

/// A pair of increasing rank sequences from 1 to k (1-based ranks).
struct CollinearConfiguration {
  std::vector<int> upper, lower;
};

std::vector<CollinearConfiguration> enumerate_collinear_configurations(int k);
/// True when some rank strictly between 1 and k appears in either half.
bool middle_active(const CollinearConfiguration& c);
std::string to_string(const CollinearConfiguration& c);
/// Parses "1,2,3|1,3".
CollinearConfiguration parse_collinear(const std::string& text, int k);

/// Branch indices ordered by the projection b_nu = grad H_nu(center) . d,
/// where d is the common gradient direction. Errors: NotCollinear, or
/// InvalidInput when two projections coincide.
struct CollinearSetup {
  std::array<double, 2> direction;
  std::vector<int> by_rank;  // by_rank[r] = branch index of rank r + 1
  std::vector<double> projection;
};
CollinearSetup collinear_setup(const HarmonicTuple& H, cplx center);

/// Collinear assembly: the plane is split by the line through `center`
/// parallel to the common gradient direction d; the half on the side of
/// rot90(d) (seam included) uses max over cfg.upper, the other cfg.lower.
/// Components are shifted so that every H_nu vanishes at the centre.
ConfigurationField assemble_configuration(const HarmonicTuple& H, const CollinearConfiguration& cfg,
                                          const Grid& grid, cplx center, Execution exec = Execution::parallel);

struct Violation {
  int ix, iy;
  cplx z;
  double deficit;
};

struct SubharmonicReport {
  std::vector<Violation> violations;
  double mv_tol = 0.0;
  bool pass() const { return violations.empty(); }
};

/// Discrete sub-mean-value test at radii h, 2h, 4h (32-point circle averages
/// of the bilinear interpolant).
SubharmonicReport verify_subharmonic(const ConfigurationField& F, Execution exec = Execution::parallel);

/// Every node reached from a true node by stepping along `direction` must be
/// true; a false node with a true 8-neighbour is tolerated.
bool verify_forward_star(const RegionMask& mask, std::array<double, 2> direction);

/// Largest slope |d rho / dy| of the boundary x = rho(y) of {active == nu}.
/// Errors: NotAGraph.
double interface_lipschitz(const ConfigurationField& F, int nu);

/// delta = min over nodes and nu != k of pi/2 - |arg(g_k - g_nu)|, the
/// half-width of the cone of directions in which H_k dominates.
double separation_angle(const HarmonicTuple& H, int dominant, const Grid& grid);

/// Largest |V(p) - V(q)| over horizontally or vertically adjacent nodes.
double max_adjacent_jump(const ConfigurationField& F);

}  // namespace potlab
