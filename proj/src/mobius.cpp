#include "svp/mobius.hpp"

#include <cmath>

namespace svp {

namespace {
constexpr double kPoleTol = 1e-12;
constexpr double kConsistencyTol = 1e-8;
constexpr double kScoreGap = 1e-9;
} // namespace

MobiusMove make_rotate(Mat rot) {
  require(orthogonality_defect(rot) < 1e-12, "Rotate: matrix not orthogonal");
  MobiusMove m;
  m.kind = MobiusMove::Kind::Rotate;
  m.rot = std::move(rot);
  return m;
}

MobiusMove make_stereo_affine(Vec t, double s) {
  require(s > 0, "StereoAffine: scale must be positive");
  require(all_finite(t), "StereoAffine: non-finite translation");
  MobiusMove m;
  m.kind = MobiusMove::Kind::StereoAffine;
  m.t = std::move(t);
  m.s = s;
  return m;
}

MobiusMap random_mobius(int n, Rng& rng, int move_count) {
  MobiusMap map;
  for (int m = 0; m < move_count; ++m) {
    if (m % 2 == 0) {
      // Random rotation: Gram-Schmidt of a Gaussian matrix.
      size_t d = static_cast<size_t>(n) + 1;
      Mat rot;
      for (size_t i = 0; i < d; ++i) {
        Vec v = rng.normal_vec(d);
        for (const Vec& prev : rot) v = axpy(v, -inner(v, prev), prev);
        rot.push_back(normalized(v));
      }
      map.moves.push_back(make_rotate(rot));
    } else {
      Vec t = scale(rng.sphere_dir(n), rng.uniform(0.0, 0.8));
      map.moves.push_back(make_stereo_affine(t, rng.uniform(0.6, 1.8)));
    }
  }
  return map;
}

Vec stereo_R(const Vec& x) {
  double xx = inner(x, x);
  Vec p = scale(x, 2.0 / (xx + 1.0));
  p.push_back((xx - 1.0) / (xx + 1.0));
  return p;
}

Vec stereo_R_inv(const Vec& p) {
  require(std::abs(p.back() - 1.0) > kPoleTol, "stereo_R_inv: point at the north pole");
  Vec x(p.begin(), p.end() - 1);
  return scale(x, 1.0 / (1.0 - p.back()));
}

Vec stereo_H(const Vec& y) {
  require(y.back() > 0, "stereo_H: not on the upper hyperboloid sheet");
  Vec p(y.begin(), y.end() - 1);
  p.push_back(1.0);
  return scale(p, 1.0 / y.back());
}

Vec stereo_H_inv(const Vec& p) {
  require(p.back() > kPoleTol, "stereo_H_inv: point not in the open northern hemisphere");
  Vec y(p.begin(), p.end() - 1);
  y.push_back(1.0);
  return scale(y, 1.0 / p.back());
}

CellParams params_H_from_S(const CellParams& cs) {
  Vec ch(cs.c.begin(), cs.c.end() - 1);
  ch.push_back(-cs.k);
  return {std::move(ch), -cs.c.back(), std::nullopt};
}

CellParams params_S_from_H(const CellParams& ch) {
  Vec cs(ch.c.begin(), ch.c.end() - 1);
  cs.push_back(-ch.k);
  return {std::move(cs), -ch.c.back(), std::nullopt};
}

CellParams params_R_from_S(const CellParams& cs) {
  Vec cr(cs.c.begin(), cs.c.end() - 1);
  return {std::move(cr), cs.k + cs.c.back(), cs.k};
}

CellParams params_S_from_R(const CellParams& cr) {
  require(cr.kS_aux.has_value(), "params_S_from_R: kS_aux missing");
  Vec cs = cr.c;
  cs.push_back(cr.k - *cr.kS_aux);
  return {std::move(cs), *cr.kS_aux, std::nullopt};
}

PullbackResult pullback_partition(const PartitionSpec& part_S, SpaceKind target,
                                  int sampler_count, uint64_t seed) {
  require(part_S.space.kind == SpaceKind::SphereS, "pullback_partition: source must be S^n");
  const int n = part_S.space.n;
  PullbackResult out;
  if (target == SpaceKind::EuclidR) {
    std::vector<CellParams> cells;
    for (int i = 0; i < part_S.q(); ++i) {
      cells.push_back(params_R_from_S(part_S.cells[i]));
      out.index_map.push_back(i);
    }
    out.part = make_partition(make_space(SpaceKind::EuclidR, n), std::move(cells));
    return out;
  }
  require(target == SpaceKind::HyperH, "pullback_partition: target must be R or H");
  // Retain cells whose region meets the open northern hemisphere.
  std::vector<bool> seen(part_S.q(), false);
  Rng rng(seed);
  for (int s = 0; s < sampler_count; ++s) {
    Vec p = rng.sphere_dir(n + 1);
    if (p.back() <= kPoleTol) p[n] = -p[n];
    if (p.back() <= kPoleTol) continue;
    if (auto idx = cell_of(part_S, p)) seen[*idx] = true;
  }
  std::vector<CellParams> cells;
  for (int i = 0; i < part_S.q(); ++i)
    if (seen[i]) {
      cells.push_back(params_H_from_S(part_S.cells[i]));
      out.index_map.push_back(i);
    }
  require(cells.size() >= 2, "pullback_partition: fewer than two cells meet S^n_+");
  out.part = make_partition(make_space(SpaceKind::HyperH, n), std::move(cells));
  return out;
}

PartitionSpec pushforward_cluster_H_to_S(const PartitionSpec& part_H, int sampler_count,
                                         uint64_t seed) {
  require(part_H.space.kind == SpaceKind::HyperH, "pushforward: source must be H^n");
  const int q = part_H.q();
  // Cluster test: every nonempty interface with the exterior (last) cell has
  // |k_iq| > 1, which bounds all interior cells.
  for (int i = 0; i < q - 1; ++i) {
    if (!interface_nonempty(part_H, i, q - 1, 2048, seed ^ (0x9e37ULL + i))) continue;
    double kiq = part_H.cells[i].k - part_H.cells[q - 1].k;
    require(std::abs(kiq) > 1.0,
            "pushforward_cluster_H_to_S: not a cluster (|k_iq| <= 1 on an exterior interface)");
  }
  std::vector<CellParams> cells;
  for (const auto& cell : part_H.cells) cells.push_back(params_S_from_H(cell));
  PartitionSpec out = make_partition(make_space(SpaceKind::SphereS, part_H.space.n),
                                     std::move(cells));
  // The last S^n cell must contain the closed southern hemisphere.
  Rng rng(seed ^ 0xabcdULL);
  for (int s = 0; s < sampler_count; ++s) {
    Vec p = rng.sphere_dir(part_H.space.n + 1);
    if (p.back() > 0) p[part_H.space.n] = -p[part_H.space.n];
    double slast = cell_score(out, q - 1, p);
    for (int j = 0; j < q - 1; ++j)
      require(cell_score(out, j, p) >= slast - kScoreGap,
              "pushforward_cluster_H_to_S: exterior cell does not cover S^n_-");
  }
  return out;
}

namespace {

CellParams apply_move_to_cell(const MobiusMove& mv, const CellParams& cell) {
  if (mv.kind == MobiusMove::Kind::Rotate) {
    return {matvec(mv.rot, cell.c), cell.k, std::nullopt};
  }
  // StereoAffine A(x) = s x + t acting on the R^n score coefficient triple
  // (k^R, c^R, a), a = 2 k^S - k^R: the pulled-back score s*Q(A^{-1} x') has
  //   k' = k/s,  c' = c - (k/s) t,  a' = k|t|^2/s - 2<c,t> + s a,
  // and the consistency invariant |c|^2 - k a is preserved exactly.
  CellParams r = params_R_from_S(cell);
  double a = 2.0 * *r.kS_aux - r.k;
  double kp = r.k / mv.s;
  Vec cp = axpy(r.c, -kp, mv.t);
  double ap = r.k * inner(mv.t, mv.t) / mv.s - 2.0 * inner(r.c, mv.t) + mv.s * a;
  CellParams rp{std::move(cp), kp, 0.5 * (ap + kp)};
  return params_S_from_R(rp);
}

} // namespace

PartitionSpec mobius_apply(const MobiusMap& map, const PartitionSpec& part_S) {
  require(part_S.space.kind == SpaceKind::SphereS, "mobius_apply: partition must be on S^n");
  std::vector<CellParams> cells = part_S.cells;
  for (const MobiusMove& mv : map.moves)
    for (auto& cell : cells) cell = apply_move_to_cell(mv, cell);
  PartitionSpec out = make_partition(part_S.space, std::move(cells));
  for (int i = 0; i < out.q(); ++i)
    for (int j = i + 1; j < out.q(); ++j) {
      GeneralizedSphere s = interface_sphere(out, i, j);
      require(s.consistency_residual() < kConsistencyTol,
              "mobius_apply: transported parameters degenerate");
    }
  return out;
}

Vec mobius_apply_point(const MobiusMap& map, const Vec& p) {
  Vec q = p;
  for (const MobiusMove& mv : map.moves) {
    if (mv.kind == MobiusMove::Kind::Rotate) {
      q = matvec(mv.rot, q);
    } else {
      if (std::abs(q.back() - 1.0) <= kPoleTol) continue; // A fixes infinity: N -> N
      Vec x = stereo_R_inv(q);
      q = stereo_R(axpy(scale(x, mv.s), 1.0, mv.t));
    }
  }
  return q;
}

} // namespace svp
