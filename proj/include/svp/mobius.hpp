#pragma once
// Stereographic projections, exact parameter transforms between model
// spaces, Moebius automorphisms of S^n as primitive-move compositions, and
// partition transport.

#include "svp/partition.hpp"

namespace svp {

struct MobiusMove {
  enum class Kind { Rotate, StereoAffine } kind;
  Mat rot;      // Rotate: orthogonal matrix on R^{n+1}
  Vec t;        // StereoAffine: translation in R^n
  double s = 1; // StereoAffine: scale > 0
};

struct MobiusMap {
  std::vector<MobiusMove> moves;
};

MobiusMove make_rotate(Mat rot);
MobiusMove make_stereo_affine(Vec t, double s);

// Random Moebius map: alternating rotations and stereo-affine moves.
MobiusMap random_mobius(int n, Rng& rng, int move_count = 2);

// pi_R(x) = (2x, |x|^2 - 1)/(|x|^2 + 1) and its inverse (undefined at N).
Vec stereo_R(const Vec& x);
Vec stereo_R_inv(const Vec& p);

// pi_H(y) = (ybar, 1)/y0 onto the open northern hemisphere, and inverse.
Vec stereo_H(const Vec& y);
Vec stereo_H_inv(const Vec& p);

// Parameter transforms (exact linear involutions):
//   c^H = (cbar^S, -k^S), k^H = -c^S_0   and its inverse.
CellParams params_H_from_S(const CellParams& cs);
CellParams params_S_from_H(const CellParams& ch);
//   c^R = cbar^S, k^R = k^S + c^S_0, carrying k^S along; and its inverse.
CellParams params_R_from_S(const CellParams& cs);
CellParams params_S_from_R(const CellParams& cr);

struct PullbackResult {
  PartitionSpec part;
  std::vector<int> index_map; // retained source cell per output cell
};

// Transport an S^n partition to R^n (all cells) or H^n (cells meeting the
// open northern hemisphere, decided by deterministic sampling).
PullbackResult pullback_partition(const PartitionSpec& part_S, SpaceKind target,
                                  int sampler_count = 8192, uint64_t seed = 2026);

// H^n cluster (all cells but the last bounded; curvature test |k_iq| > 1 on
// nonempty exterior interfaces) pushed forward to an S^n partition whose
// last cell contains the closed southern hemisphere.
PartitionSpec pushforward_cluster_H_to_S(const PartitionSpec& part_H,
                                         int sampler_count = 4096, uint64_t seed = 2026);

// Apply a Moebius map to an S^n partition (exact parameter transport) or to
// a point of S^n.
PartitionSpec mobius_apply(const MobiusMap& map, const PartitionSpec& part_S);
Vec mobius_apply_point(const MobiusMap& map, const Vec& p);

} // namespace svp
