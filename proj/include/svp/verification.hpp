#pragma once
// Pointwise numerical verification of the geometric identities: stationarity,
// the 3-tensor cancellation, conformal BCs, L_Jac V, V Ric^V, interface
// Hessian closed forms, and the integrated Bochner identity on closed
// interfaces.

#include "svp/flatness.hpp"
#include "svp/mesh.hpp"

namespace svp {

struct CheckSpec {
  int samples = 64;
  uint64_t seed = 2026;
  FDConfig fd;
  double tol = 0.0; // 0: use the check's default tolerance
  // Fault injection for negative controls: curvature of a single interface
  // perturbed at evaluation time, and a flipped co-normal sign in the
  // 3-tensor. Partition parameters themselves stay cocycle-consistent, so
  // broken data can only be produced at this level.
  std::optional<std::pair<int, int>> broken_pair;
  double k_delta = 0.0;
  bool flip_conormal = false;
};

struct VerificationReport {
  std::string check;
  double max = 0.0;
  double mean = 0.0;
  int samples = 0;
  double tol = 0.0;
  bool pass = false;
};

// (a) constancy of the weighted mean curvature along each interface,
// (b) normal sums at triple points, (c) least-squares Lagrange multipliers
// lambda with H_ij = lambda_i - lambda_j. Default tol 1e-10.
VerificationReport check_stationarity(const PartitionSpec& part, const CheckSpec& spec);

// Max |T^{abc}| with T = sum over cyclic pairs of n (x) n (x) nd minus its
// transpose pattern, at sampled triple points. Default tol 1e-10.
VerificationReport check_three_tensor(const PartitionSpec& part, const CheckSpec& spec);

// |grad_{nd} V - barII V| at sampled triple points. Default tol 1e-10.
VerificationReport check_conformal_bc(const PartitionSpec& part, const PotentialSpec& V,
                                      const CheckSpec& spec);

// FD surface Laplacian of V plus closed-form (Ric(n,n) + |II|^2) V against
// the expected constant, and the FD surface Hessian of V against its
// closed-form multiple of the metric. Default tol 1e-6.
VerificationReport check_LJac_potential(const PartitionSpec& part, const PotentialSpec& V,
                                        const CheckSpec& spec);

// Eigenvalues of V Ric^V = V Ric_Sigma - Hess V + (Lap V) g against the
// expected constant; n >= 3 only. Default tol 1e-6.
VerificationReport check_RicV(const PartitionSpec& part, const PotentialSpec& V,
                              const CheckSpec& spec);

// Quadrature evaluation of both sides of the integrated Bochner identity on
// a closed interface mesh; reports the relative gap. Default tol 0.02.
VerificationReport check_bochner_closed(const InterfaceMesh2D& mesh, const PotentialSpec& V,
                                        const AmbientFn& u, const CheckSpec& spec);

} // namespace svp
