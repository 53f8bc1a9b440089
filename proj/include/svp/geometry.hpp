#pragma once
// Model spaces S^n, R^n, H^n (hyperboloid model), G^n (Gauss space), exact
// charts on generalized spheres, and central-difference surface calculus.

#include <functional>
#include <optional>

#include "svp/vec.hpp"

namespace svp {

enum class SpaceKind { SphereS, EuclidR, HyperH, GaussG };

struct Space {
  SpaceKind kind;
  int n; // manifold dimension, 2..8

  Signature sig() const {
    return kind == SpaceKind::HyperH ? Signature::Lorentzian : Signature::Euclidean;
  }
  // Length of ambient coordinate vectors for points of this space.
  int ambient_dim() const {
    return (kind == SpaceKind::SphereS || kind == SpaceKind::HyperH) ? n + 1 : n;
  }
  bool weighted() const { return kind == SpaceKind::GaussG; }
  char letter() const {
    switch (kind) {
      case SpaceKind::SphereS: return 'S';
      case SpaceKind::EuclidR: return 'R';
      case SpaceKind::HyperH: return 'H';
      default: return 'G';
    }
  }
};

Space make_space(SpaceKind kind, int n);

// |<p,p> - 1| on S^n; |<y,y>_1 + 1| on H^n (or +inf when y0 <= 0); 0 on R^n/G^n.
double on_space_residual(const Space& space, const Vec& p);

// A single interface's (c, k) data.  kS_aux carries the spherical-curvature
// companion parameter and is present only for R^n spheres.
struct GeneralizedSphere {
  Space space;
  Vec c;
  double k = 0.0;
  std::optional<double> kS_aux;

  // Residual of the space's consistency relation:
  //   S^n: |c|^2 - 1 - k^2;  H^n: <c,c>_1 - 1 + k^2;
  //   R^n: |c|^2 + k^2 - 2 k kS - 1;  G^n: |c| - 1 (unit-normal convention).
  double consistency_residual() const;
};

struct FDConfig {
  // Balances second-difference truncation (~h^2) against roundoff (~eps/h^2):
  // residuals on strongly curved charts are V-shaped in h with minimum near 1e-3.
  double h = 1e-3;
};

// Exact local parametrization of a generalized sphere by intrinsic normal
// coordinates at an anchor point: the differential at 0 is an isometry and
// the Christoffel symbols vanish there, so plain second differences of
// F(chart(t)) give intrinsic surface derivatives at the anchor.
struct Chart {
  enum class Kind { RoundSphere, AffineFlat, HyperbolicSheet, Horosphere };

  Space space;
  Kind kind;
  Vec anchor;
  std::vector<Vec> frame; // m = n-1 tangent vectors, orthonormal at anchor
  double valid_radius = 0.0;

  // Geometric data per kind (unused fields left empty):
  Vec center;        // RoundSphere: ambient center; HyperbolicSheet: s*u
  Vec axis0;         // RoundSphere: u0 = (anchor-center)/r; HyperbolicSheet: z0
  double radius = 0; // RoundSphere: r; HyperbolicSheet: R
  Vec horo_c;        // Horosphere: c/k (curvature-normalized null normal)

  Vec at(const Vec& t) const; // t has length n-1
};

Chart sphere_chart(const Space& space, const GeneralizedSphere& sphere, const Vec& anchor);

using AmbientFn = std::function<double(const Vec&)>;

// Intrinsic surface gradient as an ambient (tangent) vector.
Vec fd_surface_gradient(const Chart& chart, const AmbientFn& f, const FDConfig& cfg = {});
// Intrinsic surface Hessian in the chart's orthonormal frame ((n-1)x(n-1)).
Mat fd_surface_hessian(const Chart& chart, const AmbientFn& f, const FDConfig& cfg = {});
// Weighted surface Laplacian: trace of the Hessian, minus <grad_S f, grad_S W>
// on Gauss space (W = |x|^2/2).
double fd_surface_laplacian(const Chart& chart, const AmbientFn& f, const FDConfig& cfg = {});

// Orthonormal completion helpers (signature-aware Gram-Schmidt).  `avoid`
// must be linearly independent with a nondegenerate Gram matrix; the result
// has `count` vectors orthogonal to all of them (spacelike in the Lorentzian
// case, which holds whenever `avoid` spans all timelike directions).
std::vector<Vec> orthonormal_complement(const std::vector<Vec>& avoid, Signature sig,
                                        size_t dim, size_t count);

} // namespace svp
