#pragma once
// Discretization of partition interface complexes: 1D weighted polyline
// complexes with junction coupling for n = 2 models, and closed 2D triangle
// meshes for single interfaces. Assembles weighted mass / stiffness / Jacobi /
// L_V operators, evaluates the index form Q0 in three formulations, measures
// stability margins, and checks the conjugated Brascamp-Lieb inequality.

#include <array>

#include "svp/mesh.hpp"
#include "svp/verification.hpp"

namespace svp {

// Uniform arclength mesh of one interface arc (or closed loop) of a 2D model.
struct InterfaceMesh1D {
  int i = -1, j = -1;          // cell pair, i < j; DOF values represent f_ij
  double kappa = 0.0;          // umbilic interface curvature k_i - k_j (0 on G)
  bool closed = false;         // periodic loop (last vertex connects to first)
  double h = 0.0;              // uniform arclength spacing
  std::vector<double> s;       // arclength parameters along the carrier curve
  std::vector<Vec> points;     // ambient points
  std::vector<double> weight;  // e^{-W} at the vertices (1 outside Gauss space)
  int junction_start = -1;     // junction id at the first vertex, -1 = free end
  int junction_end = -1;       // junction id at the last vertex, -1 = free end
};

struct JunctionLeg {
  int mesh = -1;         // index into PartitionComplex::meshes
  bool at_start = false; // which end of the mesh touches the junction
  double sign = 1.0;     // +1 if the cyclic pair matches the stored (i<j) DOF
  double barII = 0.0;    // (kappa_am + kappa_bm)/sqrt(3), third cell m
};

struct Junction {
  Vec p;
  double weight = 1.0;              // e^{-W(p)}: 0-dimensional junction measure
  std::array<int, 3> cells{};       // u < v < w
  std::array<JunctionLeg, 3> legs;  // cyclic pairs (u,v), (v,w), (w,u)
};

struct PartitionComplex {
  Space space;
  std::vector<InterfaceMesh1D> meshes;
  std::vector<Junction> junctions;
  std::vector<int> offsets; // DOF offset per mesh; back() = total DOF count
  double resolution = 0.0;
  double truncation = 8.0;

  int dofs() const { return offsets.back(); }
  int dof(int mesh, int vertex) const { return offsets[mesh] + vertex; }
  int end_dof(const JunctionLeg& leg) const {
    return dof(leg.mesh, leg.at_start ? 0 : static_cast<int>(meshes[leg.mesh].s.size()) - 1);
  }
};

// Build the 1D interface complex of an n = 2 partition: junctions located by
// root-finding of score ties along each interface curve, arcs activated by
// midpoint membership, unbounded interfaces truncated (Gauss: at ambient
// radius `truncation`, weight e^{-32} at radius 8 makes the cut negligible;
// other models: at intrinsic distance `truncation`) with free ends. Rejects
// junctions where more than three interface ends meet.
PartitionComplex build_complex_1d(const PartitionSpec& part, double resolution,
                                  double truncation = 8.0);

struct OperatorSet {
  Vec mass;        // lumped diagonal mass (trapezoid weights of e^{-W})
  Mat stiffness;   // FEM weighted stiffness, symmetric PSD
  Mat flux;        // boundary flux operator: one-sided dn at arc ends, weighted
  Mat laplacian;   // weighted Laplacian = mass^{-1} (-stiffness + flux)
  Mat L_jac;       // laplacian + (Ric(n,n)+|II|^2) closed-form diagonal
  Mat L_v;         // diag(V) laplacian - diag(laplacian V)
  Vec V_vertex;    // potential at the vertices
  Mat vol_rows;    // q rows: per-cell first-variation-of-volume functionals
  Mat kirchhoff;   // one row per junction: signed end values sum to zero
  Mat conformal;   // two rows per junction: equal conformal flux across pairs
  Mat constraints; // kirchhoff and conformal stacked (admissibility of u)
};

// Assemble the discrete operators with weight e^{-W} and potential V.
// ric_override replaces the closed-form zeroth-order coefficient on every
// interface (negative-control hook for constructed unstable toys).
OperatorSet assemble_operators(const PartitionComplex& cx, const PotentialSpec& V,
                               std::optional<double> ric_override = std::nullopt);

enum class Q0Mode { LJacForm, GradientForm, ConjugatedForm };

// Index form Q0(f) in the selected formulation; f must satisfy the Kirchhoff
// constraints to 1e-10 (relative). LJacForm and GradientForm agree to machine
// precision by the summation-by-parts construction; ConjugatedForm is an
// independent edge-quadrature discretization agreeing at O(h^2).
double q0_eval(const PartitionComplex& cx, const OperatorSet& ops, const Vec& f, Q0Mode mode);

// Per-cell first variation of volume (components sum to zero exactly).
Vec delta1_vol(const PartitionComplex& cx, const OperatorSet& ops, const Vec& f);

enum class StabilityMode { ImageOfLV, VolumeKernel };

// ImageOfLV: min Q0(L_V u)/||L_V u||^2_{1/V-mass} over admissible discrete u.
// VolumeKernel: min Q0(f)/||f||^2_mass over Kirchhoff fields with
// delta1_vol(f) = 0 (exploratory; not claimed equal to ImageOfLV).
double stability_margin(const PartitionComplex& cx, const OperatorSet& ops, StabilityMode mode);

// Cotangent stiffness of a triangle mesh (signature-aware edge inners);
// apply form avoids dense storage for large meshes.
Vec apply_cotan(const InterfaceMesh2D& mesh, const Vec& x);
Mat cotan_stiffness(const InterfaceMesh2D& mesh);

// Lowest `count` eigenvalues of the lumped-mass Laplace-Beltrami operator.
// Dense symmetric solve; meshes above 4000 vertices are rejected.
Vec spectrum(const InterfaceMesh2D& mesh, int count);

struct BLReport {
  double min_gap = 0.0;      // min over trials of (rhs - lhs)/rhs
  double lhs = 0.0, rhs = 0.0; // values attaining the minimum
  int trials = 0;
  double min_ricv_eig = 0.0; // smallest V Ric^V eigenvalue over mesh vertices
};

// Conjugated Brascamp-Lieb check on a closed interface mesh: for random
// smooth u set f = L_V u (discrete) and compare
//   N/(N-1) * int f^2/V  <=  int (V Ric^V)^{-1}(grad f - (grad V/V) f).
// Throws if V Ric^V is not positive definite at some vertex.
BLReport bl_check(const InterfaceMesh2D& mesh, const PotentialSpec& V, double N, int trials,
                  uint64_t seed);

} // namespace svp
