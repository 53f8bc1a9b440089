#include "svp/geometry.hpp"

#include <cmath>
#include <limits>

namespace svp {

namespace {
constexpr double kNullTol = 1e-9;     // horosphere detection threshold on <c,c>_1
constexpr double kAnchorTol = 1e-10;  // anchor must lie on the sphere this well
} // namespace

Space make_space(SpaceKind kind, int n) {
  require(n >= 2 && n <= 8, "Space: n must be in [2,8]");
  return Space{kind, n};
}

double on_space_residual(const Space& space, const Vec& p) {
  require(static_cast<int>(p.size()) == space.ambient_dim(), "on_space_residual: bad length");
  switch (space.kind) {
    case SpaceKind::SphereS:
      return std::abs(inner(p, p) - 1.0);
    case SpaceKind::HyperH:
      if (p.back() <= 0.0) return std::numeric_limits<double>::infinity();
      return std::abs(inner(p, p, Signature::Lorentzian) + 1.0);
    default:
      return 0.0;
  }
}

double GeneralizedSphere::consistency_residual() const {
  switch (space.kind) {
    case SpaceKind::SphereS:
      return std::abs(inner(c, c) - 1.0 - k * k);
    case SpaceKind::HyperH:
      return std::abs(inner(c, c, Signature::Lorentzian) - 1.0 + k * k);
    case SpaceKind::EuclidR: {
      require(kS_aux.has_value(), "R^n sphere: kS_aux missing");
      return std::abs(inner(c, c) + k * k - 2.0 * k * *kS_aux - 1.0);
    }
    default: // GaussG: flat interfaces with unit normal
      return std::abs(norm(c) - 1.0);
  }
}

std::vector<Vec> orthonormal_complement(const std::vector<Vec>& avoid, Signature sig,
                                        size_t dim, size_t count) {
  // Normalize the avoid set into a signature-orthonormal family with signs.
  std::vector<Vec> base;
  std::vector<double> sign;
  // Projections are applied twice: one Gram-Schmidt pass leaves orthogonality
  // errors that near-singular charts amplify catastrophically.
  for (Vec v : avoid) {
    for (int pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i < base.size(); ++i)
        v = axpy(v, -sign[i] * inner(v, base[i], sig), base[i]);
    double q = inner(v, v, sig);
    require(std::abs(q) > 1e-12, "orthonormal_complement: degenerate avoid set");
    base.push_back(scale(v, 1.0 / std::sqrt(std::abs(q))));
    sign.push_back(q > 0 ? 1.0 : -1.0);
  }
  std::vector<Vec> out;
  for (size_t e = 0; e < dim && out.size() < count; ++e) {
    Vec v = basis(dim, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t i = 0; i < base.size(); ++i)
        v = axpy(v, -sign[i] * inner(v, base[i], sig), base[i]);
      for (size_t i = 0; i < out.size(); ++i)
        v = axpy(v, -inner(v, out[i], sig), out[i]); // previous outputs are spacelike units
    }
    double q = inner(v, v, sig);
    if (q > 1e-10) out.push_back(scale(v, 1.0 / std::sqrt(q)));
  }
  require(out.size() == count, "orthonormal_complement: frame deficient (Gram determinant ~ 0)");
  return out;
}

namespace {

Chart chart_round(const Space& space, const Vec& center, double r, const Vec& anchor,
                  std::vector<Vec> frame) {
  Chart ch;
  ch.space = space;
  ch.kind = Chart::Kind::RoundSphere;
  ch.anchor = anchor;
  ch.center = center;
  ch.radius = r;
  ch.axis0 = scale(sub(anchor, center), 1.0 / r);
  ch.frame = std::move(frame);
  ch.valid_radius = 0.5 * 3.14159265358979323846 * r;
  return ch;
}

} // namespace

Chart sphere_chart(const Space& space, const GeneralizedSphere& sphere, const Vec& anchor) {
  const Vec& c = sphere.c;
  const double k = sphere.k;
  const size_t d = static_cast<size_t>(space.ambient_dim());
  require(c.size() == d && anchor.size() == d, "sphere_chart: dimension mismatch");
  // Residuals of the quadratic constraints accumulate roundoff proportional to
  // the squared coordinate scale, so the tolerances are relative. Near-null
  // hyperbolic interfaces (sheet radius R, R^2 ~ 1 + k^2/<c,c>_1) additionally
  // amplify frame roundoff by R^2 through the s^2 - R^2 cancellation.
  double cond = 1.0 + inner(anchor, anchor);
  if (space.kind == SpaceKind::HyperH)
    cond += k * k / std::max(std::abs(inner(c, c, Signature::Lorentzian)), kNullTol);
  require(on_space_residual(space, anchor) < kAnchorTol * cond,
          "sphere_chart: anchor off the model space");
  const size_t m = static_cast<size_t>(space.n) - 1;

  switch (space.kind) {
    case SpaceKind::SphereS: {
      // {p in S^n : <c,p> + k = 0}: round (n-1)-sphere of radius 1/sqrt(1+k^2)
      // centered at -k c / (1+k^2) inside the affine plane c-perp.
      double cc = inner(c, c);
      require(std::abs(inner(c, anchor) + k) < kAnchorTol * (1.0 + norm(c) + std::abs(k)),
              "sphere_chart: anchor off sphere");
      Vec x0 = scale(c, -k / cc);
      double r = std::sqrt(std::max(1.0 - k * k / cc, 0.0));
      Vec u0 = scale(sub(anchor, x0), 1.0 / r);
      auto frame = orthonormal_complement({c, u0}, Signature::Euclidean, d, m);
      return chart_round(space, x0, r, anchor, std::move(frame));
    }
    case SpaceKind::EuclidR:
    case SpaceKind::GaussG: {
      if (space.kind == SpaceKind::GaussG || std::abs(k) < 1e-12) {
        // Hyperplane {<c,x> + b = 0}: affine chart.
        Chart ch;
        ch.space = space;
        ch.kind = Chart::Kind::AffineFlat;
        ch.anchor = anchor;
        ch.frame = orthonormal_complement({c}, Signature::Euclidean, d, m);
        ch.valid_radius = 1e30;
        return ch;
      }
      // Sphere of radius 1/|k| centered at -c/k.
      Vec x0 = scale(c, -1.0 / k);
      double r = norm(sub(anchor, x0));
      Vec u0 = scale(sub(anchor, x0), 1.0 / r);
      auto frame = orthonormal_complement({u0}, Signature::Euclidean, d, m);
      return chart_round(space, x0, r, anchor, std::move(frame));
    }
    case SpaceKind::HyperH: {
      const Signature L = Signature::Lorentzian;
      double q = inner(c, c, L);
      require(std::abs(inner(c, anchor, L) - k) <
                  kAnchorTol * (cond + norm(c) * norm(anchor) + std::abs(k)),
              "sphere_chart: anchor off sphere");
      if (q > kNullTol) {
        // Equidistant hypersurface/geodesic: y = s u + R z, z in unit H^{n-1}.
        Vec u = scale(c, 1.0 / std::sqrt(q));
        double s = k / std::sqrt(q);
        double R = std::sqrt(1.0 + s * s);
        Chart ch;
        ch.space = space;
        ch.kind = Chart::Kind::HyperbolicSheet;
        ch.anchor = anchor;
        ch.center = scale(u, s);
        ch.radius = R;
        ch.axis0 = scale(sub(anchor, ch.center), 1.0 / R); // z0, <z0,z0>_1 = -1
        ch.frame = orthonormal_complement({u, ch.axis0}, L, d, m);
        ch.valid_radius = 1e30;
        return ch;
      }
      if (q < -kNullTol) {
        // Geodesic sphere: y = a u + b w, w in the unit sphere of u-perp.
        Vec u = scale(c, (k > 0 ? -1.0 : 1.0) / std::sqrt(-q));
        double a = std::abs(k) / std::sqrt(-q);
        double b = std::sqrt(a * a - 1.0);
        Vec x0 = scale(u, a);
        Vec u0 = scale(sub(anchor, x0), 1.0 / b);
        auto frame = orthonormal_complement({u, u0}, L, d, m);
        Chart ch = chart_round(space, x0, b, anchor, std::move(frame));
        ch.valid_radius = 0.5 * 3.14159265358979323846 * b; // angle coordinate period
        return ch;
      }
      // Horosphere (<c,c>_1 = 0): globally flat, exact quadratic graph.
      require(std::abs(k) > 1e-12, "sphere_chart: degenerate null sphere with k = 0");
      Chart ch;
      ch.space = space;
      ch.kind = Chart::Kind::Horosphere;
      ch.anchor = anchor;
      ch.horo_c = scale(c, 1.0 / k);
      ch.frame = orthonormal_complement({anchor, c}, L, d, m);
      ch.valid_radius = 1e30;
      return ch;
    }
  }
  throw std::logic_error("sphere_chart: unreachable");
}

Vec Chart::at(const Vec& t) const {
  require(t.size() == frame.size(), "Chart::at: parameter length mismatch");
  double tn = norm(t);
  switch (kind) {
    case Kind::AffineFlat: {
      Vec p = anchor;
      for (size_t i = 0; i < frame.size(); ++i) p = axpy(p, t[i], frame[i]);
      return p;
    }
    case Kind::RoundSphere: {
      if (tn < 1e-300) return anchor;
      Vec dir = zeros(anchor.size());
      for (size_t i = 0; i < frame.size(); ++i) dir = axpy(dir, t[i] / tn, frame[i]);
      double a = tn / radius;
      Vec p = center;
      p = axpy(p, radius * std::cos(a), axis0);
      p = axpy(p, radius * std::sin(a), dir);
      return p;
    }
    case Kind::HyperbolicSheet: {
      if (tn < 1e-300) return anchor;
      Vec dir = zeros(anchor.size());
      for (size_t i = 0; i < frame.size(); ++i) dir = axpy(dir, t[i] / tn, frame[i]);
      double a = tn / radius;
      Vec p = center;
      p = axpy(p, radius * std::cosh(a), axis0);
      p = axpy(p, radius * std::sinh(a), dir);
      return p;
    }
    case Kind::Horosphere: {
      Vec p = anchor;
      for (size_t i = 0; i < frame.size(); ++i) p = axpy(p, t[i], frame[i]);
      p = axpy(p, -0.5 * tn * tn, horo_c);
      return p;
    }
  }
  throw std::logic_error("Chart::at: unreachable");
}

namespace {
void check_step(const FDConfig& cfg) {
  require(cfg.h >= 1e-7 && cfg.h <= 1e-2, "FDConfig: step outside [1e-7, 1e-2]");
}
} // namespace

Vec fd_surface_gradient(const Chart& chart, const AmbientFn& f, const FDConfig& cfg) {
  check_step(cfg);
  const size_t m = chart.frame.size();
  Vec g = zeros(chart.anchor.size());
  Vec t = zeros(m);
  for (size_t i = 0; i < m; ++i) {
    t[i] = cfg.h;
    double fp = f(chart.at(t));
    t[i] = -cfg.h;
    double fm = f(chart.at(t));
    t[i] = 0.0;
    g = axpy(g, (fp - fm) / (2.0 * cfg.h), chart.frame[i]);
  }
  return g;
}

Mat fd_surface_hessian(const Chart& chart, const AmbientFn& f, const FDConfig& cfg) {
  check_step(cfg);
  const size_t m = chart.frame.size();
  const double h = cfg.h;
  Mat hess = mat_zeros(m, m);
  Vec t = zeros(m);
  double f0 = f(chart.at(t));
  for (size_t i = 0; i < m; ++i) {
    t[i] = h;
    double fp = f(chart.at(t));
    t[i] = -h;
    double fm = f(chart.at(t));
    t[i] = 0.0;
    hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
    for (size_t j = i + 1; j < m; ++j) {
      t[i] = h; t[j] = h;
      double fpp = f(chart.at(t));
      t[j] = -h;
      double fpm = f(chart.at(t));
      t[i] = -h; t[j] = h;
      double fmp = f(chart.at(t));
      t[j] = -h;
      double fmm = f(chart.at(t));
      t[i] = 0.0; t[j] = 0.0;
      hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return hess;
}

double fd_surface_laplacian(const Chart& chart, const AmbientFn& f, const FDConfig& cfg) {
  Mat hess = fd_surface_hessian(chart, f, cfg);
  double lap = 0.0;
  for (size_t i = 0; i < hess.size(); ++i) lap += hess[i][i];
  if (chart.space.kind == SpaceKind::GaussG) {
    // Weighted correction: - <grad_S f, grad_S W>, W = |x|^2/2, grad W = x.
    Vec g = fd_surface_gradient(chart, f, cfg);
    lap -= inner(g, chart.anchor);
  }
  return lap;
}

} // namespace svp
