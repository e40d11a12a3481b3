// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmt/conditions.hpp"
#include "gmt/cones.hpp"
#include "gmt/geom.hpp"
#include "gmt/json.hpp"
#include "gmt/porosity.hpp"
#include "gmt/scene.hpp"
#include "gmt/visibility.hpp"

namespace gmt {

// Constants of one construction run, coupled by the defining formulas:
//   kappa = w_d / (2^{d+1} C^d M),   t = r / (2C),
//   alpha = upsilon c0 delta / 2,    tau = (t/4) sin(alpha),
//   L = 1 / cos(alpha).
// validate() rejects any set whose couplings drift beyond 1e-12 relative,
// and requires the full ledger; n1, n2 and a may stay unset (zero).
struct ConstantLedger {
  int d = 1;  // boundary dimension
  double r = 0, C = 0, M = 0;
  double rho = 1.0;  // achieved interior corkscrew fraction
  double delta = 0, eta = 0, upsilon = 0;
  double kappa = 0, c0 = 0;
  double t = 0, tau = 0, L = 0;
  double a = 0;       // separation of the two witness centers, 0 when unset
  int n1 = 0, n2 = 0; // direction net and boundary net sizes, 0 when unset

  double alpha() const { return 0.5 * upsilon * c0 * delta; }

  void validate() const;
  Json to_json() const;
};

// Derived entries filled from the free ones. eta == 0 picks the default
// upsilon / (8 C), which satisfies 4 C eta < upsilon with a factor-2 margin.
ConstantLedger couple_constants(int d, double r, double C, double M, double rho, double upsilon,
                                double delta, double c0, double eta = 0);

// Scene rewritten in the two-ball frame: the interior witness center moves
// to the origin and the exterior witness center to a * e_up, where e_up is
// +y in the plane and +z in space. rho < 1 records that the interior ball
// only reaches radius rho r / C; the exterior ball always has radius r / C.
struct NormalizeResult {
  Scene scene;
  Ball B_hat;  // the input ball, new frame
  double a = 0;
  double rho = 1.0;
  Ball interior_ball;  // centered at the origin
  Ball exterior_ball;  // centered at a * e_up
  std::string omega_label;
  RigidMotion to_world;  // new frame -> input frame
  ConditionVerdict interior_verdict, exterior_verdict;  // witnesses in the new frame

  Json to_json() const;  // omits the scene body
};

// Finds the two corkscrew balls of B(center, radius) at constant C and
// rigidly moves the scene into their frame. An empty omega_label selects
// the component with the deepest interior witness; ties within a relative
// 1e-4 band resolve to the lexicographically smaller label. The exterior
// ball must reach the full radius r / C or the hypothesis fails; the
// interior side retries at the achieved constant and reports rho < 1.
NormalizeResult normalize(const Scene& sc, const Ball& B, double C,
                          const std::string& omega_label = "");

// Directions covering the cap of arclength radius cap_radius about theta0:
// covering radius strictly below sep, pairwise separation at least
// sep * (1 - 1/256) for d == 1 and sep * (15/16) for d == 2. Deterministic.
std::vector<Vec> sphere_net(Vec theta0, double cap_radius, double sep, int d);

// Greedy first-fit tau-separated subset, returned as indices into pts in
// accept order. Every input point lies strictly within tau of some accepted
// point; accepted points are at least tau * (1 - 1e-12) apart.
std::vector<int> boundary_net(const std::vector<Point>& pts, double tau);

// Each point of E is assigned its nearest net direction and nearest net
// point; the heaviest cell wins. Ties take the smaller index everywhere.
struct PartitionResult {
  int i_star = -1, j_star = -1;
  std::vector<int> dir_index;  // per point of E
  std::vector<int> net_index;  // per point of E
  std::vector<double> cell_weight;  // n1 x n2, flat index i * n2 + j
  double total_weight = 0, best_weight = 0;
  BoundarySample E_ij;  // points of the winning cell
  std::vector<Vec> thetas_ij;  // their assigned into-domain directions

  Json to_json() const;
};

PartitionResult partition(const BoundarySample& E, const std::vector<Vec>& dirs,
                          const std::vector<Vec>& xs, const std::vector<Point>& ys);

// Distance from p to the truncated solid cone; zero exactly on members.
double cone_distance(const Cone& c, Point p);

// Union of certified cones over an apex cluster, clipped to the capsule
// hull of B_j and its translate B_j'. Every member point is star-visible
// from the center of B_j' through the cone union, each cone is convex and
// contains that center, and the whole region stays inside the component.
struct LipschitzDomainSpec {
  int i = -1, j = -1;  // winning cell, set by the pipeline
  Vec x_i;             // common cone axis
  Point y_j;           // cluster center
  double L = 0, alpha = 0, height = 0;  // graph bound, half-angle, cone height
  Ball B_j, B_j_prime;
  HullTwoBalls hull;
  BoundarySample E_ij;
  std::vector<Cone> cones;  // one per apex
  std::vector<ConeCertificate> certificates;
  double psi_scale = 0;  // length normalizing the overlap ratio

  bool in_cones(Point p) const;
  bool contains(Point p) const;  // cone union meets open hull

  Json to_json() const;
};

// Builds and certifies the cone-union subdomain over the apex cluster
// E_ij, which must lie within led.tau of y_j. Every cone is ray-verified
// inside the named component at angular spacing ray_step / t; the region
// must stay inside (1 + 1/(4C)) B_hat and classify to the component on a
// lattice sweep. Throws HypothesisError when any certificate fails.
LipschitzDomainSpec build_domain(const Scene& sc, const std::string& omega_label,
                                 const Ball& B_hat, const BoundarySample& E_ij, Vec x_i,
                                 Point y_j, const ConstantLedger& led, double ray_step);

// Boundary measure within epsilon = B_j.radius / 4 of the subdomain,
// sampled at the given resolution inside a window shrunk to the domain.
struct OverlapResult {
  double measure = 0;
  double psi_emp = 0;  // measure / psi_scale^d
  double epsilon = 0, resolution = 0;
  int points = 0;  // samples counted into the measure

  Json to_json() const;
};

OverlapResult overlap(const Scene& sc, const LipschitzDomainSpec& spec, double resolution);

// Recentering step for rho < 1: move to the boundary point nearest the
// origin and shrink to radius 2 rho r, raising the constant to 2C but
// restoring the full corkscrew fraction. Requires a normalized frame whose
// origin sits at depth rho r / C.
struct RhoReduction {
  Point xi_prime;
  Ball B_prime;
  double rho = 0;
  double ratio = 0;  // B_prime.radius over the interior depth, 2C by design

  Json to_json() const;
};

RhoReduction rho_reduce(const Scene& sc, const Ball& B, double rho, double C);

struct PropositionParams {
  double M = 0;  // regularity bound; 0 measures it from the scene
  double upsilon = 0.2;
  int grid_n = 0;  // direction grid nodes per axis; 0 picks 4096 / 32 by dimension
  double step_scale = 1e-4;  // cone ray step, in units of t
  std::string omega_label;   // empty selects automatically
  double overlap_scale = 1.0 / 64.0;  // base overlap resolution, in units of epsilon
};

// Full pipeline record. All geometric data lives in the final normalized
// frame; world_from_core maps it back to the input frame.
struct PropositionReport {
  std::string scene_name;
  ConstantLedger ledger;
  Ball B_input;
  double M_measured = 0;
  double rho_input = 0;     // rho of the first normalization
  bool rho_reduced = false;
  std::optional<RhoReduction> reduction;
  NormalizeResult norm;     // the final full-corkscrew frame
  RigidMotion world_from_core;
  SurjectivityReport surjectivity;
  double S_weight = 0, E_kappa_weight = 0, D_half = 0;
  double r_A_min = 0, r_A_max = 0;
  int resolution_rounds = 0;
  PartitionResult part;
  LipschitzDomainSpec domain;
  OverlapResult overlap_base, overlap_fine;
  double psi_stability = 0;  // |fine - base| / base
  Ball domain_bound;         // certified bound on the subdomain, final frame
  double margin_4B = 0;      // 4r - reach of domain_bound from the input center

  Json to_json() const;
};

// Runs the whole construction: normalize (reducing once if rho < 1), check
// fiber surjectivity, sample the boundary until the resolution beats tau/2,
// select the kappa-dense visible set, certify its porosity caps, pick the
// heaviest direction/location cell, build the cone subdomain, and measure
// the boundary overlap at two resolutions.
PropositionReport run_proposition(const Scene& sc, const Ball& B, double C,
                                  const PropositionParams& params = {});

}  // namespace gmt
