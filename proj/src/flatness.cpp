#include "svp/flatness.hpp"

#include <cmath>

#include "svp/linalg.hpp"

namespace svp {

namespace {
constexpr double kRowTol = 1e-9;
constexpr double kWarnTol = 1e-6;
constexpr double kBallMargin = 1e-9;
} // namespace

std::vector<FlatnessRow> flatness_rows(const PartitionSpec& part, int sampler_count,
                                       uint64_t seed) {
  require(part.space.kind != SpaceKind::GaussG, "flatness_rows: G^n interfaces are affine");
  std::vector<CellParams> lifted;
  for (const CellParams& cell : part.cells) {
    switch (part.space.kind) {
      case SpaceKind::SphereS: lifted.push_back(cell); break;
      case SpaceKind::EuclidR: lifted.push_back(params_S_from_R(cell)); break;
      default: lifted.push_back(params_S_from_H(cell)); break;
    }
  }
  // Nonemptiness is decided in the original space: the flatness constraints
  // bind only on interfaces the partition actually has.
  std::vector<FlatnessRow> rows;
  for (int i = 0; i < part.q(); ++i)
    for (int j = i + 1; j < part.q(); ++j) {
      if (!interface_nonempty(part, i, j, sampler_count, seed ^ (uint64_t(i) * 131 + j)))
        continue;
      rows.push_back({sub(lifted[i].c, lifted[j].c), lifted[i].k - lifted[j].k});
    }
  return rows;
}

FlatnessCertificate solve_flatness_rows(int n, const std::vector<FlatnessRow>& rows) {
  FlatnessCertificate cert;
  if (rows.empty()) {
    cert.xi = zeros(n + 1);
    cert.feasible = true;
    cert.solution_space_dim = n + 1;
    return cert;
  }
  Mat a;
  Vec b;
  for (const FlatnessRow& row : rows) {
    require(static_cast<int>(row.c.size()) == n + 1, "solve_flatness_rows: row length");
    a.push_back(row.c);
    b.push_back(-row.k);
  }
  LstsqResult ls = lstsq_min_norm(a, b);
  cert.xi = ls.x;
  cert.residual = ls.residual;
  cert.solution_space_dim = ls.nullity;
  double norm = std::sqrt(inner(cert.xi, cert.xi));
  cert.feasible = cert.residual < kRowTol && norm < 1.0 - kBallMargin;
  cert.warning = cert.residual >= kRowTol && cert.residual < kWarnTol;
  return cert;
}

FlatnessCertificate solve_flatness(const PartitionSpec& part, int sampler_count,
                                   uint64_t seed) {
  if (part.space.kind == SpaceKind::GaussG) {
    FlatnessCertificate cert;
    cert.xi = zeros(part.space.n + 1);
    cert.feasible = true;
    cert.solution_space_dim = part.space.n + 1;
    return cert;
  }
  return solve_flatness_rows(part.space.n, flatness_rows(part, sampler_count, seed));
}

HypoEpi classify_hypo_epi(const PartitionSpec& part_H, int sampler_count, uint64_t seed) {
  require(part_H.space.kind == SpaceKind::HyperH, "classify_hypo_epi: partition must be on H^n");
  const int n = part_H.space.n;
  std::vector<FlatnessRow> rows = flatness_rows(part_H, sampler_count, seed);
  FlatnessCertificate cert = solve_flatness_rows(n, rows);
  require(cert.feasible, "classify_hypo_epi: partition is not Moebius-flat");
  HypoEpi out;
  if (cert.xi.back() <= 0) {
    out.classification = HypoEpi::Kind::Hypo;
    out.witness = cert.xi;
    return out;
  }
  // Min-norm xi has xi0 > 0: project onto the slice xi0 = 0. The projected
  // min-norm point is the closest point of {rows} & {xi0 <= 0} to the origin.
  Vec e_last = basis(n + 1, n);
  rows.push_back({e_last, 0.0});
  FlatnessCertificate sliced = solve_flatness_rows(n, rows);
  if (sliced.feasible) {
    out.classification = HypoEpi::Kind::Hypo;
    out.witness = sliced.xi;
    return out;
  }
  out.classification = HypoEpi::Kind::Epi;
  return out;
}

PotentialSpec build_potential(const Space& space, const FlatnessCertificate& cert) {
  PotentialSpec v;
  v.space = space;
  if (space.kind == SpaceKind::GaussG) {
    v.form = PotentialSpec::Form::GaussianConst;
    return v;
  }
  require(cert.feasible, "build_potential: infeasible certificate");
  require(static_cast<int>(cert.xi.size()) == space.n + 1, "build_potential: xi length");
  switch (space.kind) {
    case SpaceKind::SphereS:
      v.form = PotentialSpec::Form::SphereAffine;
      v.xi = cert.xi;
      break;
    case SpaceKind::EuclidR: {
      v.form = PotentialSpec::Form::EuclidQuadratic;
      double xi0 = cert.xi.back();
      Vec xibar(cert.xi.begin(), cert.xi.end() - 1);
      v.theta = scale(xibar, 1.0 / (1.0 - xi0));
      v.eta = 0.5 * (1.0 + xi0) / (1.0 - xi0);
      require(v.eta - 0.5 * inner(v.theta, v.theta) > 0,
              "build_potential: Euclidean positivity invariant violated");
      break;
    }
    default:
      v.form = PotentialSpec::Form::MinkowskiAffine;
      v.xi = cert.xi;
      break;
  }
  return v;
}

double potential_eval(const PotentialSpec& V, const Vec& p) {
  switch (V.form) {
    case PotentialSpec::Form::SphereAffine:
      return 1.0 - inner(p, V.xi);
    case PotentialSpec::Form::EuclidQuadratic:
      return 0.5 * inner(p, p) - inner(p, V.theta) + V.eta;
    case PotentialSpec::Form::MinkowskiAffine: {
      Vec w(V.xi.begin(), V.xi.end() - 1);
      w.push_back(1.0);
      return -V.xi.back() - inner(p, w, Signature::Lorentzian);
    }
    default:
      return 1.0;
  }
}

Vec potential_ambient_grad(const PotentialSpec& V, const Vec& p) {
  switch (V.form) {
    case PotentialSpec::Form::SphereAffine:
      return scale(V.xi, -1.0);
    case PotentialSpec::Form::EuclidQuadratic:
      return sub(p, V.theta);
    case PotentialSpec::Form::MinkowskiAffine: {
      Vec w(V.xi.begin(), V.xi.end() - 1);
      w.push_back(1.0);
      return scale(w, -1.0);
    }
    default:
      return zeros(p.size());
  }
}

double potential_normal_derivative(const PotentialSpec& V, const GeneralizedSphere& sphere,
                                   const Vec& p) {
  Vec n = sphere.space.kind == SpaceKind::GaussG ? sphere.c : axpy(sphere.c, sphere.k, p);
  return inner(potential_ambient_grad(V, p), n, sphere.space.sig());
}

double expected_LJac_value(const Space& space, const FlatnessCertificate& cert) {
  switch (space.kind) {
    case SpaceKind::SphereS:
    case SpaceKind::EuclidR:
      return space.n - 1;
    case SpaceKind::HyperH:
      require(cert.feasible, "expected_LJac_value: infeasible certificate");
      return (space.n - 1) * cert.xi.back();
    default:
      return 1.0;
  }
}

} // namespace svp
