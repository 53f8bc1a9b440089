#pragma once
// Spherical Voronoi partitions in the four model spaces: cell membership,
// interfaces, triple points with normals/co-normals, standard flat
// partitions, and Monte Carlo volumes.

#include <optional>

#include "svp/geometry.hpp"
#include "svp/rng.hpp"

namespace svp {

struct CellParams {
  Vec c;                        // quasi-center parameter
  double k = 0.0;               // curvature parameter (k^R on R^n)
  std::optional<double> kS_aux; // k^S companion, present only on R^n
};

struct PartitionSpec {
  Space space;
  std::vector<CellParams> cells;

  int q() const { return static_cast<int>(cells.size()); }
};

// Validates lengths, kS presence, finiteness, and pairwise distinctness.
PartitionSpec make_partition(const Space& space, std::vector<CellParams> cells);

// q unit vectors in R^{n+1} with pairwise inner product -1/(q-1) and zero
// sum; first vector e1, rest by deterministic Gram-Schmidt completion.
std::vector<Vec> equidistant_points(int q, int n);

// Cells c_i = R_{q,n} p_i, k_i = 0 with R_{q,n} = sqrt((q-1)/(2q)), so every
// interface has |c_ij| = 1 (a great sphere).
PartitionSpec standard_flat_partition(int n, int q);

// Voronoi score of cell j at p (lower wins).
double cell_score(const PartitionSpec& part, int j, const Vec& p);

// Strict argmin cell, or nullopt within tie tolerance 1e-12 (point on Sigma).
std::optional<int> cell_of(const PartitionSpec& part, const Vec& p);

GeneralizedSphere interface_sphere(const PartitionSpec& part, int i, int j);

// Some point on the generalized sphere (deterministic).
Vec sphere_anchor(const GeneralizedSphere& sphere);

// Random point on the sphere; unbounded types are sampled within intrinsic
// radius `truncation` of the anchor.
Vec sample_on_sphere(const GeneralizedSphere& sphere, Rng& rng, double truncation = 8.0);

// True iff some sampled point of S_ij achieves the argmin exactly at {i,j}.
bool interface_nonempty(const PartitionSpec& part, int i, int j,
                        int sampler_count = 4096, uint64_t seed = 2026);

// Unit normal n_ij = c_ij + k_ij p (signature arithmetic), pointing from
// cell i into cell j; antisymmetric in (i,j).
Vec normal_at(const PartitionSpec& part, int i, int j, const Vec& p);

struct TriplePointSample {
  Vec p;
  int i, j, k;
  Vec n_ij, n_jk, n_ki;       // interface normals at p
  Vec nd_ij, nd_jk, nd_ki;    // co-normals n_{d ab} = (n_ac + n_bc)/sqrt(3)
  double barII_ij, barII_jk, barII_ki; // (k_ac + k_bc)/sqrt(3), curvatures
};

std::vector<TriplePointSample> triple_point_samples(const PartitionSpec& part, int i, int j,
                                                    int k, int count, uint64_t seed);

// (n-1) k_ij on S/R/H; -<x, n_ij> on G (flat interfaces, W = |x|^2/2).
double weighted_mean_curvature(const PartitionSpec& part, int i, int j, const Vec& p);

struct VolumeEstimates {
  std::vector<double> measure;   // absolute on S^n/G^n; relative (fraction of
                                 // the truncation ball) on R^n/H^n
  std::vector<double> std_error;
  std::vector<bool> unbounded;   // R^n/H^n cells reaching infinity (flagged)
  double truncation_radius = 8.0;
  int samples_used = 0;
};

VolumeEstimates estimate_volumes(const PartitionSpec& part, int sample_count, uint64_t seed);

} // namespace svp
