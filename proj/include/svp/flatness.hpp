#pragma once
// Moebius-flatness certificates (least-squares solve for xi), the hypo/epi
// dichotomy on H^n, and the closed-form conformally flattening potentials.

#include "svp/mobius.hpp"

namespace svp {

struct FlatnessCertificate {
  Vec xi;                // in R^{n+1} (S^n ambient coordinates), xi0 last
  double residual = 0;   // max violation over nonempty-interface rows
  bool feasible = false; // residual < 1e-9 and |xi| < 1 - 1e-9
  bool warning = false;  // residual in [1e-9, 1e-6): almost-flat input
  int solution_space_dim = 0;
};

// One linear constraint <c, xi> = -k per nonempty interface, with (c, k) the
// interface parameters lifted to S^n coordinates.
struct FlatnessRow {
  Vec c;
  double k = 0.0;
};

// Lift the nonempty interfaces of a partition to S^n-parameter rows.
std::vector<FlatnessRow> flatness_rows(const PartitionSpec& part,
                                       int sampler_count = 4096, uint64_t seed = 2026);

// Minimum-norm least-squares solve of the row system in R^{n+1}.
FlatnessCertificate solve_flatness_rows(int n, const std::vector<FlatnessRow>& rows);

// Moebius-flatness of a partition: one row per nonempty interface. On G^n the
// interfaces are affine hyperplanes, already flat: trivially feasible xi = 0.
FlatnessCertificate solve_flatness(const PartitionSpec& part,
                                   int sampler_count = 4096, uint64_t seed = 2026);

struct HypoEpi {
  enum class Kind { Hypo, Epi } classification = Kind::Epi;
  Vec witness; // xi with xi0 <= 0 satisfying the rows, set when Hypo
};

// H^n dichotomy: Hypo iff some feasible xi has xi0 <= 0. The min-norm xi
// decides directly when its xi0 <= 0; otherwise the closest-to-origin point
// of the convex set {rows} & {xi0 = 0} decides (it is inside the open unit
// ball iff any point of {rows} & {xi0 <= 0} is).
HypoEpi classify_hypo_epi(const PartitionSpec& part_H,
                          int sampler_count = 4096, uint64_t seed = 2026);

struct PotentialSpec {
  Space space;
  enum class Form { SphereAffine, EuclidQuadratic, MinkowskiAffine, GaussianConst } form;
  Vec xi;     // SphereAffine: xi in R^{n+1}; MinkowskiAffine: (xibar, xi0)
  Vec theta;  // EuclidQuadratic
  double eta = 0.0;
};

// Closed-form conformally flattening potential for a feasible certificate:
//   S^n: V(p) = 1 - <p, xi>
//   R^n: V(x) = |x|^2/2 - <x, theta> + eta, theta = xibar/(1-xi0),
//        eta = (1+xi0)/(2(1-xi0))
//   H^n: V(y) = -xi0 - <y, (xibar, 1)>_1
//   G^n: V = 1 (needs no certificate)
PotentialSpec build_potential(const Space& space, const FlatnessCertificate& cert);

double potential_eval(const PotentialSpec& V, const Vec& p);

// Ambient gradient; on H^n Lorentz-represented (dV(w) = <grad, w>_1).
Vec potential_ambient_grad(const PotentialSpec& V, const Vec& p);

// <grad V, n(p)> with n = c + k p (n = c on G^n), signature arithmetic.
double potential_normal_derivative(const PotentialSpec& V, const GeneralizedSphere& sphere,
                                   const Vec& p);

// n-1 on S^n/R^n; (n-1) xi0 on H^n; 1 on G^n.
double expected_LJac_value(const Space& space, const FlatnessCertificate& cert);

} // namespace svp
