#include "svp/partition.hpp"

#include <algorithm>
#include <cmath>

#include "svp/linalg.hpp"

namespace svp {

namespace {
constexpr double kTieTol = 1e-12;      // cell_of boundary classification
constexpr double kOnSpaceTol = 1e-8;   // point-on-space precondition
constexpr double kScoreGap = 1e-9;     // interface/junction membership gap
constexpr double kConsistencyTol = 1e-8;
const double kSqrt3 = std::sqrt(3.0);

double sq(double x) { return x * x; }
} // namespace

PartitionSpec make_partition(const Space& space, std::vector<CellParams> cells) {
  require(cells.size() >= 2 && cells.size() <= 64, "partition: q must be in [2,64]");
  for (const auto& cell : cells) {
    require(static_cast<int>(cell.c.size()) == space.ambient_dim(), "partition: bad c length");
    require(all_finite(cell.c) && std::isfinite(cell.k), "partition: non-finite parameters");
    require(cell.kS_aux.has_value() == (space.kind == SpaceKind::EuclidR),
            "partition: kS_aux present iff space is R^n");
  }
  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = i + 1; j < cells.size(); ++j) {
      double d = std::abs(cells[i].k - cells[j].k) + norm(sub(cells[i].c, cells[j].c));
      if (cells[i].kS_aux) d += std::abs(*cells[i].kS_aux - *cells[j].kS_aux);
      require(d > 1e-14, "partition: duplicate cell parameters");
    }
  return PartitionSpec{space, std::move(cells)};
}

std::vector<Vec> equidistant_points(int q, int n) {
  require(q >= 2 && q <= n + 2, "equidistant_points: need 2 <= q <= n+2");
  // Cholesky rows of the Gram matrix (1 on diagonal, -1/(q-1) off) give the
  // points; the Gram has rank q-1, so rows fit in R^{n+1}.
  const double beta = -1.0 / (q - 1);
  Mat l = mat_zeros(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < i; ++j) {
      double s = beta;
      for (int m = 0; m < j; ++m) s -= l[i][m] * l[j][m];
      l[i][j] = (l[j][j] > 1e-14) ? s / l[j][j] : 0.0;
    }
    double s = 1.0;
    for (int m = 0; m < i; ++m) s -= sq(l[i][m]);
    l[i][i] = std::sqrt(std::max(s, 0.0));
  }
  std::vector<Vec> pts(q, zeros(n + 1));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < std::min(q - 1, n + 1); ++j) pts[i][j] = l[i][j];
  return pts;
}

PartitionSpec standard_flat_partition(int n, int q) {
  double r = std::sqrt((q - 1.0) / (2.0 * q));
  std::vector<CellParams> cells;
  for (const Vec& p : equidistant_points(q, n)) cells.push_back({scale(p, r), 0.0, std::nullopt});
  return make_partition(make_space(SpaceKind::SphereS, n), std::move(cells));
}

double cell_score(const PartitionSpec& part, int j, const Vec& p) {
  const CellParams& cell = part.cells.at(j);
  switch (part.space.kind) {
    case SpaceKind::SphereS:
      return inner(cell.c, p) + cell.k;
    case SpaceKind::HyperH:
      return inner(cell.c, p, Signature::Lorentzian) - cell.k;
    case SpaceKind::EuclidR:
      return cell.k * inner(p, p) + 2.0 * inner(cell.c, p) + 2.0 * *cell.kS_aux - cell.k;
    default: // GaussG
      return inner(cell.c, p) + cell.k;
  }
}

std::optional<int> cell_of(const PartitionSpec& part, const Vec& p) {
  require(on_space_residual(part.space, p) < kOnSpaceTol, "cell_of: point off the model space");
  int best = 0;
  double smin = cell_score(part, 0, p), second = std::numeric_limits<double>::infinity();
  for (int j = 1; j < part.q(); ++j) {
    double s = cell_score(part, j, p);
    if (s < smin) {
      second = smin;
      smin = s;
      best = j;
    } else {
      second = std::min(second, s);
    }
  }
  if (second - smin <= kTieTol) return std::nullopt;
  return best;
}

GeneralizedSphere interface_sphere(const PartitionSpec& part, int i, int j) {
  require(i != j, "interface_sphere: i == j");
  const CellParams& a = part.cells.at(i);
  const CellParams& b = part.cells.at(j);
  GeneralizedSphere sph{part.space, sub(a.c, b.c), a.k - b.k, std::nullopt};
  if (part.space.kind == SpaceKind::EuclidR) sph.kS_aux = *a.kS_aux - *b.kS_aux;
  require(sph.consistency_residual() < kConsistencyTol,
          "interface_sphere: malformed partition (consistency relation violated)");
  return sph;
}

Vec sphere_anchor(const GeneralizedSphere& sphere) {
  const Vec& c = sphere.c;
  const double k = sphere.k;
  const size_t d = c.size();
  switch (sphere.space.kind) {
    case SpaceKind::SphereS: {
      double cc = inner(c, c);
      Vec x0 = scale(c, -k / cc);
      double r = std::sqrt(std::max(1.0 - k * k / cc, 0.0));
      Vec w = orthonormal_complement({c}, Signature::Euclidean, d, 1)[0];
      return axpy(x0, r, w);
    }
    case SpaceKind::EuclidR: {
      if (std::abs(k) < 1e-12) return scale(c, -*sphere.kS_aux); // |c| = 1 plane
      Vec z = scale(c, -1.0 / k);
      Vec e = orthonormal_complement({}, Signature::Euclidean, d, 1)[0];
      return axpy(z, 1.0 / std::abs(k), e);
    }
    case SpaceKind::GaussG:
      return scale(c, -k); // plane {<c,x> + k = 0}, |c| = 1
    case SpaceKind::HyperH: {
      const Signature L = Signature::Lorentzian;
      double q = inner(c, c, L);
      if (q > 1e-9) { // equidistant hypersurface
        Vec u = scale(c, 1.0 / std::sqrt(q));
        double s = k / std::sqrt(q), r = std::sqrt(1.0 + s * s);
        Vec zp = axpy(basis(d, d - 1), u.back(), u); // e_t - <e_t,u>_1 u
        double qz = inner(zp, zp, L);
        require(qz < -1e-12, "sphere_anchor: degenerate hyperbolic frame");
        Vec z0 = scale(zp, 1.0 / std::sqrt(-qz));
        return axpy(scale(u, s), r, z0);
      }
      if (q < -1e-9) { // geodesic sphere
        Vec u = scale(c, (k > 0 ? -1.0 : 1.0) / std::sqrt(-q));
        double a = std::abs(k) / std::sqrt(-q);
        require(u.back() > 0, "sphere_anchor: H^n sphere on the wrong sheet (empty)");
        require(a >= 1.0 - 1e-12, "sphere_anchor: empty geodesic sphere");
        double b = std::sqrt(std::max(a * a - 1.0, 0.0));
        Vec w0 = orthonormal_complement({u}, L, d, 1)[0];
        return axpy(scale(u, a), b, w0);
      }
      // horosphere
      require(std::abs(c.back()) > 1e-12 && std::abs(k) > 1e-12,
              "sphere_anchor: degenerate horosphere");
      double alpha = -k / c.back();
      require(alpha > 0, "sphere_anchor: horosphere on the wrong sheet (empty)");
      double beta = (1.0 - alpha * alpha) / (2.0 * alpha * c.back());
      return axpy(scale(basis(d, d - 1), alpha), beta, c);
    }
  }
  throw std::logic_error("sphere_anchor: unreachable");
}

Vec sample_on_sphere(const GeneralizedSphere& sphere, Rng& rng, double truncation) {
  Vec anchor = sphere_anchor(sphere);
  Chart ch = sphere_chart(sphere.space, sphere, anchor);
  const size_t m = ch.frame.size();
  if (ch.kind == Chart::Kind::RoundSphere) {
    // Uniform on the full round sphere via a Gaussian in span{axis0, frame}.
    Vec g = rng.normal_vec(m + 1);
    double gn = norm(g);
    while (gn < 1e-12) { g = rng.normal_vec(m + 1); gn = norm(g); }
    Vec w = scale(ch.axis0, g[0] / gn);
    for (size_t i = 0; i < m; ++i) w = axpy(w, g[i + 1] / gn, ch.frame[i]);
    return axpy(ch.center, ch.radius, w);
  }
  // Flat/hyperbolic charts are global: sample intrinsic normal coordinates
  // within the truncation radius.
  Vec t = (m == 1) ? Vec{rng.uniform(-truncation, truncation)}
                   : scale(rng.sphere_dir(m), truncation * std::pow(rng.uniform(), 1.0 / m));
  return ch.at(t);
}

namespace {
// True when the level set {score_i = score_j} provably misses the model space,
// decided from the raw pair difference. The consistency relation binds only on
// interfaces the partition actually has, so this runs before interface_sphere
// can reject a (possibly non-normalized) empty pair.
bool pair_level_set_empty(const PartitionSpec& part, int i, int j) {
  const CellParams& a = part.cells.at(i);
  const CellParams& b = part.cells.at(j);
  Vec c = sub(a.c, b.c);
  double k = a.k - b.k;
  switch (part.space.kind) {
    case SpaceKind::SphereS:
      // <c,p> + k = 0 on S^n: the range of <c,p> is [-|c|, |c|].
      return sq(k) >= inner(c, c);
    case SpaceKind::EuclidR: {
      double kS = *a.kS_aux - *b.kS_aux;
      // k|x|^2 + 2<c,x> + 2kS - k = 0: squared radius (|c|^2 - 2 k kS + k^2)/k^2.
      if (std::abs(k) > 1e-14) return inner(c, c) - 2.0 * k * kS + sq(k) < 0.0;
      return norm(c) < 1e-14; // hyperplane, empty when degenerate (c = 0, kS != 0)
    }
    case SpaceKind::HyperH: {
      // <c,y>_1 = k on the upper sheet. Spacelike c: the range is all of R.
      double cc = inner(c, c, Signature::Lorentzian);
      if (cc > 1e-14) return false;
      double ct = c.back(); // time component (future-directed iff > 0)
      if (cc < -1e-14) {
        // timelike c: range (-inf, -m] (future) or [m, inf) (past), m = sqrt(-cc)
        double m = std::sqrt(-cc);
        return ct > 0 ? k > -m : k < m;
      }
      // null c: range (-inf, 0) or (0, inf); k = 0 unreachable
      return ct > 0 ? k >= 0 : k <= 0;
    }
    default: // GaussG: affine hyperplane with c != 0 (cells distinct), never empty
      return norm(c) < 1e-14;
  }
}
} // namespace

bool interface_nonempty(const PartitionSpec& part, int i, int j, int sampler_count,
                        uint64_t seed) {
  require(i >= 0 && j >= 0 && i < part.q() && j < part.q() && i != j,
          "interface_nonempty: bad indices");
  if (pair_level_set_empty(part, i, j)) return false;
  // Sample the level set {score_i = score_j} from scale-normalized parameters:
  // the set is invariant under a common positive rescaling of the pair
  // difference, and normalizing restores the consistency relation, so empty
  // argmin sets are detected even for non-normalized pair data.
  const CellParams& ca = part.cells.at(i);
  const CellParams& cb = part.cells.at(j);
  GeneralizedSphere sph{part.space, sub(ca.c, cb.c), ca.k - cb.k, std::nullopt};
  double t2;
  switch (part.space.kind) {
    case SpaceKind::SphereS: t2 = inner(sph.c, sph.c) - sq(sph.k); break;
    case SpaceKind::EuclidR:
      sph.kS_aux = *ca.kS_aux - *cb.kS_aux;
      t2 = inner(sph.c, sph.c) + sq(sph.k) - 2.0 * sph.k * *sph.kS_aux;
      break;
    case SpaceKind::HyperH: t2 = inner(sph.c, sph.c, Signature::Lorentzian) + sq(sph.k); break;
    default: t2 = inner(sph.c, sph.c); break; // GaussG
  }
  if (t2 < 1e-14) return false; // tangent or degenerate level set
  double t = 1.0 / std::sqrt(t2);
  sph.c = scale(sph.c, t);
  sph.k *= t;
  if (sph.kS_aux) *sph.kS_aux *= t;
  Rng rng(seed);
  for (int s = 0; s < sampler_count; ++s) {
    Vec p;
    try {
      p = sample_on_sphere(sph, rng);
    } catch (const std::invalid_argument&) {
      return false; // geometrically empty sphere (wrong sheet etc.)
    }
    double si = cell_score(part, i, p), sj = cell_score(part, j, p);
    double smax = std::max(si, sj);
    bool wins = true;
    for (int o = 0; o < part.q() && wins; ++o)
      if (o != i && o != j && cell_score(part, o, p) <= smax + kScoreGap) wins = false;
    if (wins) return true;
  }
  return false;
}

Vec normal_at(const PartitionSpec& part, int i, int j, const Vec& p) {
  GeneralizedSphere sph = interface_sphere(part, i, j);
  double res;
  switch (part.space.kind) {
    case SpaceKind::SphereS: res = inner(sph.c, p) + sph.k; break;
    case SpaceKind::HyperH: res = inner(sph.c, p, Signature::Lorentzian) - sph.k; break;
    case SpaceKind::EuclidR:
      res = sph.k * inner(p, p) + 2 * inner(sph.c, p) + 2 * *sph.kS_aux - sph.k;
      break;
    default: res = inner(sph.c, p) + sph.k; break;
  }
  require(std::abs(res) < kOnSpaceTol, "normal_at: point off the interface");
  if (part.space.kind == SpaceKind::GaussG) return sph.c; // flat, k is an offset
  return axpy(sph.c, sph.k, p);
}

namespace {

// Interface curvature parameter (vanishes on G^n where interfaces are flat).
double curvature_param(const PartitionSpec& part, int a, int b) {
  if (part.space.kind == SpaceKind::GaussG) return 0.0;
  return part.cells[a].k - part.cells[b].k;
}

// Candidate junction points for the triple (i,j,k), before membership
// filtering.  Solves the two interface equations exactly per space.
std::vector<Vec> junction_candidates(const PartitionSpec& part, int i, int j, int k, int want,
                                     Rng& rng, double truncation) {
  const Space& sp = part.space;
  const size_t d = static_cast<size_t>(sp.ambient_dim());
  std::vector<Vec> out;

  if (sp.kind == SpaceKind::SphereS || sp.kind == SpaceKind::HyperH) {
    const Signature sig = sp.sig();
    GeneralizedSphere s1 = interface_sphere(part, i, j);
    GeneralizedSphere s2 = interface_sphere(part, j, k);
    double b1 = (sp.kind == SpaceKind::SphereS) ? -s1.k : s1.k;
    double b2 = (sp.kind == SpaceKind::SphereS) ? -s2.k : s2.k;
    double g11 = inner(s1.c, s1.c, sig), g12 = inner(s1.c, s2.c, sig),
           g22 = inner(s2.c, s2.c, sig);
    double det = g11 * g22 - g12 * g12;
    require(std::abs(det) > 1e-12, "triple_point_samples: degenerate interface pair");
    double al = (b1 * g22 - b2 * g12) / det, be = (b2 * g11 - b1 * g12) / det;
    Vec x0 = axpy(scale(s1.c, al), be, s2.c);
    if (sp.kind == SpaceKind::SphereS) {
      double rho2 = 1.0 - inner(x0, x0);
      if (rho2 < -1e-12) return out;
      double rho = std::sqrt(std::max(rho2, 0.0));
      auto comp = orthonormal_complement({s1.c, s2.c}, sig, d, d - 2);
      int attempts = (d == 3) ? 2 : 8 * want;
      for (int t = 0; t < attempts && static_cast<int>(out.size()) < 8 * want; ++t) {
        Vec w;
        if (d == 3) w = scale(comp[0], t == 0 ? 1.0 : -1.0);
        else {
          Vec g = rng.sphere_dir(d - 2);
          w = zeros(d);
          for (size_t m = 0; m < comp.size(); ++m) w = axpy(w, g[m], comp[m]);
        }
        out.push_back(axpy(x0, rho, w));
      }
      return out;
    }
    // H^n: y = x0 + w on the quadric <w,w>_1 = -1 - <x0,x0>_1 in the
    // Lorentz-orthogonal complement; ray-scale random directions onto it.
    double mu = -1.0 - inner(x0, x0, sig);
    // Full signature-orthonormal complement basis (spacelike + maybe timelike).
    std::vector<Vec> base;
    std::vector<double> sign;
    {
      std::vector<Vec> avoid = {s1.c, s2.c};
      std::vector<Vec> ortho;
      std::vector<double> osign;
      for (Vec v : avoid) {
        for (size_t m = 0; m < ortho.size(); ++m)
          v = axpy(v, -osign[m] * inner(v, ortho[m], sig), ortho[m]);
        double qv = inner(v, v, sig);
        require(std::abs(qv) > 1e-12, "triple_point_samples: degenerate pair (H^n)");
        ortho.push_back(scale(v, 1.0 / std::sqrt(std::abs(qv))));
        osign.push_back(qv > 0 ? 1 : -1);
      }
      for (size_t e = 0; e < d; ++e) {
        Vec v = basis(d, e);
        for (size_t m = 0; m < ortho.size(); ++m)
          v = axpy(v, -osign[m] * inner(v, ortho[m], sig), ortho[m]);
        for (size_t m = 0; m < base.size(); ++m)
          v = axpy(v, -sign[m] * inner(v, base[m], sig), base[m]);
        double qv = inner(v, v, sig);
        if (std::abs(qv) > 1e-10) {
          base.push_back(scale(v, 1.0 / std::sqrt(std::abs(qv))));
          sign.push_back(qv > 0 ? 1 : -1);
        }
        if (base.size() == d - 2) break;
      }
    }
    if (base.size() != d - 2) return out;
    for (int t = 0; t < 64 * want && static_cast<int>(out.size()) < 8 * want; ++t) {
      Vec g = rng.normal_vec(d - 2);
      if (d == 3) g[0] = (t % 2 == 0) ? 1.0 : -1.0; // enumerate the 1-dim complement
      Vec w = zeros(d);
      for (size_t m = 0; m < base.size(); ++m) w = axpy(w, g[m], base[m]);
      double nu = inner(w, w, sig);
      if (std::abs(nu) < 1e-12 || nu * mu <= 0) continue;
      w = scale(w, std::sqrt(mu / nu));
      Vec y = add(x0, w);
      if (y.back() <= 0) continue;
      if (std::cosh(truncation) < y.back()) continue; // outside truncation ball
      out.push_back(y);
    }
    return out;
  }

  // R^n / G^n: geometric sphere/plane intersections.
  struct Shape {
    bool is_sphere;
    Vec center_or_u; // sphere center, or unit plane normal
    double r_or_b;   // sphere radius, or plane offset {<u,x> = b}
  };
  auto shape_of = [&](int a, int b) -> Shape {
    GeneralizedSphere s = interface_sphere(part, a, b);
    if (sp.kind == SpaceKind::GaussG) return {false, normalized(s.c), -s.k / norm(s.c)};
    if (std::abs(s.k) < 1e-12) return {false, s.c, -*s.kS_aux};
    return {true, scale(s.c, -1.0 / s.k), 1.0 / std::abs(s.k)};
  };
  Shape sh1 = shape_of(i, j), sh2 = shape_of(j, k);
  if (!sh1.is_sphere && sh2.is_sphere) std::swap(sh1, sh2);

  Vec center0;
  double rho = 0.0;
  Vec axis; // direction orthogonal to the solution sphere within the shapes
  bool bounded = true;
  if (sh1.is_sphere && sh2.is_sphere) {
    Vec dvec = sub(sh2.center_or_u, sh1.center_or_u);
    double dd = inner(dvec, dvec);
    require(dd > 1e-20, "triple_point_samples: concentric spheres");
    double h = (dd + sq(sh1.r_or_b) - sq(sh2.r_or_b)) / (2.0 * dd);
    center0 = axpy(sh1.center_or_u, h, dvec);
    double rho2 = sq(sh1.r_or_b) - h * h * dd;
    if (rho2 < -1e-12) return out;
    rho = std::sqrt(std::max(rho2, 0.0));
    axis = normalized(dvec);
  } else if (sh1.is_sphere) {
    double delta = sh2.r_or_b - inner(sh2.center_or_u, sh1.center_or_u);
    center0 = axpy(sh1.center_or_u, delta, sh2.center_or_u);
    double rho2 = sq(sh1.r_or_b) - delta * delta;
    if (rho2 < -1e-12) return out;
    rho = std::sqrt(std::max(rho2, 0.0));
    axis = sh2.center_or_u;
  } else {
    bounded = false; // plane-plane: (n-2)-dimensional affine solution set
    Mat rows = {sh1.center_or_u, sh2.center_or_u};
    LstsqResult ls = lstsq_min_norm(rows, {sh1.r_or_b, sh2.r_or_b});
    if (ls.residual > 1e-10) return out; // parallel planes
    center0 = ls.x;
    auto comp = orthonormal_complement({sh1.center_or_u, sh2.center_or_u},
                                       Signature::Euclidean, d, d - 2);
    for (int t = 0; t < 8 * want; ++t) {
      Vec p = center0;
      if (d == 2) {
        if (t > 0) break; // unique junction point
      } else {
        Vec g = (d - 2 == 1) ? Vec{rng.uniform(-truncation, truncation)}
                             : scale(rng.sphere_dir(d - 2),
                                     truncation * std::pow(rng.uniform(), 1.0 / (d - 2.0)));
        for (size_t m = 0; m < comp.size(); ++m) p = axpy(p, g[m], comp[m]);
      }
      out.push_back(p);
    }
    return out;
  }
  (void)bounded;
  auto comp = orthonormal_complement({axis}, Signature::Euclidean, d, d - 1);
  int attempts = (d == 2) ? 2 : 8 * want;
  for (int t = 0; t < attempts; ++t) {
    Vec w;
    if (d == 2) w = scale(comp[0], t == 0 ? 1.0 : -1.0);
    else {
      Vec g = rng.sphere_dir(d - 1);
      w = zeros(d);
      for (size_t m = 0; m < comp.size(); ++m) w = axpy(w, g[m], comp[m]);
    }
    out.push_back(axpy(center0, rho, w));
  }
  return out;
}

} // namespace

std::vector<TriplePointSample> triple_point_samples(const PartitionSpec& part, int i, int j,
                                                    int k, int count, uint64_t seed) {
  require(i != j && j != k && i != k, "triple_point_samples: indices must be distinct");
  Rng rng(seed);
  std::vector<TriplePointSample> out;
  const double trunc = 8.0;
  for (int round = 0; round < 16 && static_cast<int>(out.size()) < count; ++round) {
    std::vector<Vec> cand = junction_candidates(part, i, j, k, count, rng, trunc);
    if (cand.empty() && round == 0 && out.empty()) break;
    // Newton-polish a candidate onto {score_i = score_j = score_k} and the
    // model space: near-degenerate pairs (close to parallel, or near-null in
    // H^n) leave closed-form candidates with ~1e-7 error, which the pointwise
    // identities at junctions inherit. A few min-norm Newton steps restore
    // machine precision.
    auto polish = [&](Vec p) {
      const Space& sp = part.space;
      const Signature sig = sp.sig();
      auto flip_time = [&](Vec g) {
        if (sp.kind == SpaceKind::HyperH) g.back() = -g.back();
        return g;
      };
      for (int it = 0; it < 3; ++it) {
        Mat jac;
        Vec rhs;
        auto add_pair = [&](int a, int b) {
          const CellParams& ca = part.cells[a];
          const CellParams& cb = part.cells[b];
          Vec c = sub(ca.c, cb.c);
          double dk = ca.k - cb.k;
          if (sp.kind == SpaceKind::EuclidR) {
            double dkS = *ca.kS_aux - *cb.kS_aux;
            rhs.push_back(-(dk * inner(p, p) + 2.0 * inner(c, p) + 2.0 * dkS - dk));
            jac.push_back(axpy(scale(p, 2.0 * dk), 2.0, c));
          } else if (sp.kind == SpaceKind::HyperH) {
            rhs.push_back(-(inner(c, p, sig) - dk));
            jac.push_back(flip_time(c));
          } else {
            rhs.push_back(-(inner(c, p) + dk));
            jac.push_back(c);
          }
        };
        add_pair(i, j);
        add_pair(j, k);
        if (sp.kind == SpaceKind::SphereS) {
          rhs.push_back(-0.5 * (inner(p, p) - 1.0));
          jac.push_back(p);
        } else if (sp.kind == SpaceKind::HyperH) {
          rhs.push_back(-0.5 * (inner(p, p, sig) + 1.0));
          jac.push_back(flip_time(p));
        }
        p = add(p, lstsq_min_norm(jac, rhs).x);
      }
      return p;
    };
    for (const Vec& raw : cand) {
      if (static_cast<int>(out.size()) >= count) break;
      Vec p = polish(raw);
      // membership: scores of i, j, k tie at the minimum; all others above.
      double si = cell_score(part, i, p), sj = cell_score(part, j, p),
             sk = cell_score(part, k, p);
      double smin = std::min({si, sj, sk}), smax = std::max({si, sj, sk});
      if (smax - smin > kScoreGap) continue;
      bool ok = true;
      for (int o = 0; o < part.q() && ok; ++o)
        if (o != i && o != j && o != k && cell_score(part, o, p) <= smax + kScoreGap) ok = false;
      if (!ok) continue;
      TriplePointSample s;
      s.p = p;
      s.i = i; s.j = j; s.k = k;
      s.n_ij = normal_at(part, i, j, p);
      s.n_jk = normal_at(part, j, k, p);
      s.n_ki = normal_at(part, k, i, p);
      Vec n_ik = scale(s.n_ki, -1.0), n_ji = scale(s.n_ij, -1.0), n_kj = scale(s.n_jk, -1.0);
      s.nd_ij = scale(add(n_ik, s.n_jk), 1.0 / kSqrt3);
      s.nd_jk = scale(add(n_ji, s.n_ki), 1.0 / kSqrt3);
      s.nd_ki = scale(add(n_kj, s.n_ij), 1.0 / kSqrt3);
      s.barII_ij = (curvature_param(part, i, k) + curvature_param(part, j, k)) / kSqrt3;
      s.barII_jk = (curvature_param(part, j, i) + curvature_param(part, k, i)) / kSqrt3;
      s.barII_ki = (curvature_param(part, k, j) + curvature_param(part, i, j)) / kSqrt3;
      out.push_back(std::move(s));
    }
  }
  require(!out.empty(), "triple_point_samples: empty junction");
  return out;
}

double weighted_mean_curvature(const PartitionSpec& part, int i, int j, const Vec& p) {
  Vec n = normal_at(part, i, j, p); // also validates p on the interface
  if (part.space.kind == SpaceKind::GaussG) return -inner(p, n);
  double kij = part.cells[i].k - part.cells[j].k;
  return (part.space.n - 1) * kij;
}

VolumeEstimates estimate_volumes(const PartitionSpec& part, int sample_count, uint64_t seed) {
  require(sample_count >= 10000, "estimate_volumes: need at least 1e4 samples");
  const Space& sp = part.space;
  const int q = part.q();
  Rng rng(seed);
  VolumeEstimates est;
  est.measure.assign(q, 0.0);
  est.std_error.assign(q, 0.0);
  est.unbounded.assign(q, false);

  // Flag unbounded cells (R^n: smallest quadratic coefficient wins at
  // infinity; H^n: winner along some null direction at infinity).
  if (sp.kind == SpaceKind::EuclidR) {
    double kmin = part.cells[0].k;
    for (const auto& cell : part.cells) kmin = std::min(kmin, cell.k);
    for (int a = 0; a < q; ++a) est.unbounded[a] = part.cells[a].k <= kmin + kScoreGap;
  } else if (sp.kind == SpaceKind::HyperH) {
    Rng drng(seed ^ 0x5bf03635ULL);
    for (int s = 0; s < 2048; ++s) {
      Vec w = drng.sphere_dir(sp.n);
      w.push_back(1.0); // null direction (w, 1)
      double smin = std::numeric_limits<double>::infinity();
      for (int a = 0; a < q; ++a)
        smin = std::min(smin, inner(part.cells[a].c, w, Signature::Lorentzian));
      for (int a = 0; a < q; ++a)
        if (inner(part.cells[a].c, w, Signature::Lorentzian) <= smin + kScoreGap)
          est.unbounded[a] = true;
    }
  }

  // H^n radial inverse-CDF table for density ~ sinh^{n-1}(r) on [0, R].
  std::vector<double> cdf;
  if (sp.kind == SpaceKind::HyperH) {
    const int grid = 20000;
    cdf.assign(grid + 1, 0.0);
    for (int g = 1; g <= grid; ++g) {
      double r = est.truncation_radius * g / grid;
      cdf[g] = cdf[g - 1] + std::pow(std::sinh(r), sp.n - 1);
    }
    for (auto& v : cdf) v /= cdf.back();
  }

  std::vector<long> hits(q, 0);
  long used = 0;
  for (int s = 0; s < sample_count; ++s) {
    Vec p;
    switch (sp.kind) {
      case SpaceKind::SphereS: p = rng.sphere_dir(sp.n + 1); break;
      case SpaceKind::GaussG: p = rng.normal_vec(sp.n); break;
      case SpaceKind::EuclidR:
        p = scale(rng.sphere_dir(sp.n),
                  est.truncation_radius * std::pow(rng.uniform(), 1.0 / sp.n));
        break;
      case SpaceKind::HyperH: {
        double u = rng.uniform();
        size_t lo = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        double r = est.truncation_radius * static_cast<double>(lo) / (cdf.size() - 1);
        Vec dir = rng.sphere_dir(sp.n);
        p = scale(dir, std::sinh(r));
        p.push_back(std::cosh(r));
        break;
      }
    }
    auto idx = cell_of(part, p);
    ++used;
    if (idx) ++hits[*idx];
  }
  est.samples_used = static_cast<int>(used);

  // Total measure of the sampled region.
  double total = 1.0; // G^n Gaussian mass; R^n/H^n reported relative
  if (sp.kind == SpaceKind::SphereS) {
    double m = sp.n + 1; // area of S^n = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    total = 2.0 * std::pow(3.14159265358979323846, m / 2.0) / std::tgamma(m / 2.0);
  }
  for (int a = 0; a < q; ++a) {
    double f = static_cast<double>(hits[a]) / used;
    est.measure[a] = total * f;
    est.std_error[a] = total * std::sqrt(std::max(f * (1 - f), 0.0) / used);
  }
  return est;
}

} // namespace svp
