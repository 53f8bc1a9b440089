#include "svp/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "svp/linalg.hpp"

namespace svp {

namespace {

constexpr double kTieTol = 1e-9;      // strict-winner gap for membership tests
constexpr double kJunctionTol = 1e-7; // ambient clustering radius for junctions

// Closed-form Ric_M(n,n) + |II|^2 on an interface of curvature kappa.
double ric_plus_II2(const Space& space, double kappa) {
  switch (space.kind) {
    case SpaceKind::SphereS: return (space.n - 1) * (1.0 + kappa * kappa);
    case SpaceKind::EuclidR: return (space.n - 1) * kappa * kappa;
    case SpaceKind::HyperH: return (space.n - 1) * (kappa * kappa - 1.0);
    default: return 1.0; // Gauss: Ric_mu = g, flat interfaces
  }
}

// Umbilic interface curvature of the pair (a,b); zero on Gauss space.
double kappa_of(const PartitionSpec& part, int a, int b) {
  if (part.space.kind == SpaceKind::GaussG) return 0.0;
  return part.cells[a].k - part.cells[b].k;
}

double gauss_weight(const Space& space, const Vec& p) {
  if (space.kind != SpaceKind::GaussG) return 1.0;
  return std::exp(-0.5 * inner(p, p));
}

// Rotate a 2D vector by +90 degrees.
Vec rot90(const Vec& v) { return {-v[1], v[0]}; }

// True iff cells i and j are the joint strict winners at p.
bool pair_wins(const PartitionSpec& part, int i, int j, const Vec& p) {
  double si = cell_score(part, i, p), sj = cell_score(part, j, p);
  if (std::abs(si - sj) > kTieTol) return false;
  double smax = std::max(si, sj);
  for (int o = 0; o < part.q(); ++o)
    if (o != i && o != j && cell_score(part, o, p) <= smax + kTieTol) return false;
  return true;
}

// Gauss pairs whose cell difference is not a unit vector can only appear in a
// valid complex if their tie line is dominated by other cells; verify that by
// sampling the (normalized) tie line and reject genuinely exposed interfaces.
bool gauss_offscale_pair_empty(const PartitionSpec& part, int i, int j, double trunc) {
  Vec c = sub(part.cells[i].c, part.cells[j].c);
  double cn = norm(c);
  Vec chat = scale(c, 1.0 / cn);
  double khat = (part.cells[i].k - part.cells[j].k) / cn;
  Vec x0 = scale(chat, -khat);
  Vec d = rot90(chat);
  for (int m = 0; m <= 512; ++m) {
    double t = -trunc + 2.0 * trunc * m / 512.0;
    if (pair_wins(part, i, j, axpy(x0, t, d))) return false;
  }
  return true;
}

struct Carrier {
  int i, j;
  Chart chart;
  bool closed = false;
  double t0 = 0, t1 = 0; // open curves: truncated domain
  double period = 0;     // closed curves: arclength period
};

struct PendingEnd {
  int mesh;
  bool at_start;
  Vec p;
};

// Locate parameters on the carrier curve where a third cell ties the pair.
std::vector<double> junction_params(const PartitionSpec& part, const Carrier& car) {
  auto gamma = [&](double t) { return car.chart.at({t}); };
  double lo = car.closed ? -0.5 * car.period : car.t0;
  double hi = car.closed ? 0.5 * car.period : car.t1;
  std::vector<double> roots;
  for (int m = 0; m < part.q(); ++m) {
    if (m == car.i || m == car.j) continue;
    auto g = [&](double t) {
      Vec p = gamma(t);
      return cell_score(part, m, p) - cell_score(part, car.i, p);
    };
    const int scan = 2048;
    double prev_t = lo, prev_g = g(lo);
    for (int s = 1; s <= scan; ++s) {
      double t = lo + (hi - lo) * s / scan;
      double gt = g(t);
      if ((prev_g < 0.0) != (gt < 0.0)) {
        double a = prev_t, b = t, ga = prev_g;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (a + b), gm = g(mid);
          if ((ga < 0.0) == (gm < 0.0)) { a = mid; ga = gm; } else { b = mid; }
        }
        double tr = 0.5 * (a + b);
        Vec p = gamma(tr);
        double si = cell_score(part, car.i, p); // carrier: score_i = score_j
        double smin = si;
        int ties = 0;
        for (int o = 0; o < part.q(); ++o) {
          if (o == car.i || o == car.j || o == m) continue;
          double so = cell_score(part, o, p);
          smin = std::min(smin, so);
          if (so <= si + kTieTol) ++ties;
        }
        if (si <= smin + kTieTol) { // otherwise the root is buried inside another cell
          require(ties == 0, "build_complex_1d: quadruple point encountered");
          if (std::abs(cell_score(part, m, p) - si) < 1e-7) roots.push_back(tr);
        }
      }
      prev_t = t;
      prev_g = gt;
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double t : roots)
    if (out.empty() || t - out.back() > 1e-7) out.push_back(t);
  return out;
}

// One-sided second-order outward derivative stencil at an arc end:
// (coef, dof) triples relative to the mesh ordering.
void end_stencil(const InterfaceMesh1D& mesh, bool at_start, int base_dof,
                 std::array<std::pair<int, double>, 3>& out) {
  int nv = static_cast<int>(mesh.s.size());
  require(nv >= 3, "end_stencil: arc too short");
  double inv = 1.0 / (2.0 * mesh.h);
  if (at_start) {
    out = {{{base_dof + 0, 3.0 * inv}, {base_dof + 1, -4.0 * inv}, {base_dof + 2, 1.0 * inv}}};
  } else {
    out = {{{base_dof + nv - 1, 3.0 * inv},
            {base_dof + nv - 2, -4.0 * inv},
            {base_dof + nv - 3, 1.0 * inv}}};
  }
}

} // namespace

PartitionComplex build_complex_1d(const PartitionSpec& part, double resolution,
                                  double truncation) {
  require(part.space.n == 2, "build_complex_1d: n = 2 surface models only");
  require(resolution > 0, "build_complex_1d: resolution must be positive");
  PartitionComplex cx;
  cx.space = part.space;
  cx.resolution = resolution;
  cx.truncation = truncation;

  std::vector<PendingEnd> pending;
  for (int i = 0; i < part.q(); ++i) {
    for (int j = i + 1; j < part.q(); ++j) {
      if (part.space.kind == SpaceKind::GaussG &&
          std::abs(norm(sub(part.cells[i].c, part.cells[j].c)) - 1.0) > 1e-8) {
        require(gauss_offscale_pair_empty(part, i, j, truncation),
                "build_complex_1d: exposed Gauss interface with non-unit normal");
        continue;
      }
      GeneralizedSphere sph = interface_sphere(part, i, j);
      if (!interface_nonempty(part, i, j, 4096, 2026u ^ (uint64_t(i) * 131 + j))) continue;

      Carrier car;
      car.i = i;
      car.j = j;
      Vec anchor = sphere_anchor(sph);
      car.chart = sphere_chart(part.space, sph, anchor);
      switch (car.chart.kind) {
        case Chart::Kind::RoundSphere:
          car.closed = true;
          car.period = 2.0 * M_PI * car.chart.radius;
          break;
        case Chart::Kind::AffineFlat: {
          const Vec& d = car.chart.frame[0];
          double b = inner(anchor, d);
          double disc = b * b - (inner(anchor, anchor) - truncation * truncation);
          require(disc > 0, "build_complex_1d: interface outside the truncation radius");
          car.t0 = -b - std::sqrt(disc);
          car.t1 = -b + std::sqrt(disc);
          break;
        }
        default: // HyperbolicSheet / Horosphere: intrinsic truncation
          car.t0 = -truncation;
          car.t1 = truncation;
          break;
      }

      std::vector<double> ts = junction_params(part, car);
      auto gamma = [&](double t) { return car.chart.at({t}); };

      struct ArcSpan {
        double a, b;
        bool junction_a, junction_b;
      };
      std::vector<ArcSpan> arcs;
      bool loop = false;
      if (car.closed && ts.empty()) {
        loop = true;
        arcs.push_back({-0.5 * car.period, 0.5 * car.period, false, false});
      } else if (car.closed) {
        for (size_t r = 0; r + 1 < ts.size(); ++r) arcs.push_back({ts[r], ts[r + 1], true, true});
        arcs.push_back({ts.back(), ts.front() + car.period, true, true});
      } else {
        std::vector<double> cuts = {car.t0};
        cuts.insert(cuts.end(), ts.begin(), ts.end());
        cuts.push_back(car.t1);
        for (size_t r = 0; r + 1 < cuts.size(); ++r)
          arcs.push_back({cuts[r], cuts[r + 1], r > 0, r + 2 < cuts.size()});
      }

      for (const ArcSpan& arc : arcs) {
        double len = arc.b - arc.a;
        if (len < 4.0 / resolution && !loop) continue; // sliver below mesh scale
        if (!pair_wins(part, i, j, gamma(0.5 * (arc.a + arc.b)))) continue;
        InterfaceMesh1D mesh;
        mesh.i = i;
        mesh.j = j;
        mesh.kappa = kappa_of(part, i, j);
        mesh.closed = loop;
        int nseg = std::max(loop ? 8 : 2, static_cast<int>(std::ceil(len * resolution)));
        mesh.h = len / nseg;
        int nv = loop ? nseg : nseg + 1;
        for (int v = 0; v < nv; ++v) {
          double t = arc.a + mesh.h * v;
          Vec p = gamma(t);
          mesh.s.push_back(t);
          mesh.weight.push_back(gauss_weight(part.space, p));
          mesh.points.push_back(std::move(p));
        }
        int mesh_id = static_cast<int>(cx.meshes.size());
        cx.meshes.push_back(std::move(mesh));
        if (!loop) {
          if (arc.junction_a) pending.push_back({mesh_id, true, gamma(arc.a)});
          if (arc.junction_b) pending.push_back({mesh_id, false, gamma(arc.b)});
        }
      }
    }
  }
  require(!cx.meshes.empty(), "build_complex_1d: no nonempty interfaces");

  // Cluster arc ends into junctions and build the cyclic leg tables.
  std::vector<bool> used(pending.size(), false);
  for (size_t e = 0; e < pending.size(); ++e) {
    if (used[e]) continue;
    std::vector<size_t> cluster = {e};
    used[e] = true;
    for (size_t o = e + 1; o < pending.size(); ++o)
      if (!used[o] && norm(sub(pending[o].p, pending[e].p)) < kJunctionTol) {
        used[o] = true;
        cluster.push_back(o);
      }
    require(cluster.size() == 3,
            "build_complex_1d: unresolved junction (degree " + std::to_string(cluster.size()) +
                " at " + std::to_string(pending[e].p[0]) + "," + std::to_string(pending[e].p[1]) +
                ")");

    std::vector<int> cells;
    for (size_t idx : cluster) {
      const InterfaceMesh1D& m = cx.meshes[pending[idx].mesh];
      for (int c : {m.i, m.j})
        if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
    }
    require(cells.size() == 3, "build_complex_1d: junction cells are not a triple");
    std::sort(cells.begin(), cells.end());
    int u = cells[0], v = cells[1], w = cells[2];

    Junction jct;
    jct.p = pending[e].p;
    jct.weight = gauss_weight(part.space, jct.p);
    jct.cells = {u, v, w};
    // Cyclic pairs (u,v), (v,w), (w,u); stored meshes carry (a<b) orientation.
    std::array<std::pair<int, int>, 3> cyc = {{{u, v}, {v, w}, {w, u}}};
    int jct_id = static_cast<int>(cx.junctions.size());
    for (int leg = 0; leg < 3; ++leg) {
      auto [a, b] = cyc[leg];
      int sa = std::min(a, b), sb = std::max(a, b);
      int found = -1;
      for (size_t idx : cluster) {
        const InterfaceMesh1D& m = cx.meshes[pending[idx].mesh];
        if (m.i == sa && m.j == sb) found = static_cast<int>(idx);
      }
      require(found >= 0, "build_complex_1d: junction is missing an interface pair");
      int third = u + v + w - a - b;
      jct.legs[leg].mesh = pending[found].mesh;
      jct.legs[leg].at_start = pending[found].at_start;
      jct.legs[leg].sign = (a == sa) ? 1.0 : -1.0;
      jct.legs[leg].barII =
          (kappa_of(part, a, third) + kappa_of(part, b, third)) / std::sqrt(3.0);
      InterfaceMesh1D& m = cx.meshes[pending[found].mesh];
      (pending[found].at_start ? m.junction_start : m.junction_end) = jct_id;
    }
    cx.junctions.push_back(std::move(jct));
  }

  cx.offsets.assign(1, 0);
  for (const auto& m : cx.meshes)
    cx.offsets.push_back(cx.offsets.back() + static_cast<int>(m.s.size()));
  return cx;
}

OperatorSet assemble_operators(const PartitionComplex& cx, const PotentialSpec& V,
                               std::optional<double> ric_override) {
  const int nv = cx.dofs();
  OperatorSet ops;
  ops.mass = zeros(nv);
  ops.stiffness = mat_zeros(nv, nv);
  ops.flux = mat_zeros(nv, nv);
  ops.V_vertex = zeros(nv);

  std::vector<double> ric_mesh(cx.meshes.size());
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
    const InterfaceMesh1D& m = cx.meshes[mi];
    ric_mesh[mi] = ric_override ? *ric_override : ric_plus_II2(cx.space, m.kappa);
    const int base = cx.offsets[mi];
    const int n = static_cast<int>(m.s.size());
    for (int v = 0; v < n; ++v) {
      double vp = potential_eval(V, m.points[v]);
      require(vp > 0, "assemble_operators: potential not positive on the complex");
      ops.V_vertex[base + v] = vp;
    }
    int edges = m.closed ? n : n - 1;
    for (int e = 0; e < edges; ++e) {
      int a = base + e, b = base + (e + 1) % n;
      double wa = m.weight[e], wb = m.weight[(e + 1) % n];
      double wm = 0.5 * (wa + wb);
      ops.mass[a] += 0.5 * m.h * wa;
      ops.mass[b] += 0.5 * m.h * wb;
      double k = wm / m.h;
      ops.stiffness[a][a] += k;
      ops.stiffness[b][b] += k;
      ops.stiffness[a][b] -= k;
      ops.stiffness[b][a] -= k;
    }
    if (!m.closed) {
      for (bool at_start : {true, false}) {
        std::array<std::pair<int, double>, 3> st;
        end_stencil(m, at_start, base, st);
        int ed = st[0].first;
        double we = m.weight[ed - base];
        for (auto [dof, coef] : st) ops.flux[ed][dof] += we * coef;
      }
    }
  }

  ops.laplacian = mat_zeros(nv, nv);
  for (int r = 0; r < nv; ++r)
    for (int c = 0; c < nv; ++c)
      ops.laplacian[r][c] = (-ops.stiffness[r][c] + ops.flux[r][c]) / ops.mass[r];

  ops.L_jac = ops.laplacian;
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi)
    for (size_t v = 0; v < cx.meshes[mi].s.size(); ++v)
      ops.L_jac[cx.offsets[mi] + v][cx.offsets[mi] + v] += ric_mesh[mi];

  Vec lapV = zeros(nv);
  for (int r = 0; r < nv; ++r)
    for (int c = 0; c < nv; ++c) lapV[r] += ops.laplacian[r][c] * ops.V_vertex[c];
  ops.L_v = mat_zeros(nv, nv);
  for (int r = 0; r < nv; ++r) {
    for (int c = 0; c < nv; ++c) ops.L_v[r][c] = ops.V_vertex[r] * ops.laplacian[r][c];
    ops.L_v[r][r] -= lapV[r];
  }

  int q = 0;
  for (const auto& m : cx.meshes) q = std::max({q, m.i + 1, m.j + 1});
  ops.vol_rows = mat_zeros(q, nv);
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
    const InterfaceMesh1D& m = cx.meshes[mi];
    for (size_t v = 0; v < m.s.size(); ++v) {
      int dof = cx.offsets[mi] + static_cast<int>(v);
      ops.vol_rows[m.i][dof] += ops.mass[dof];
      ops.vol_rows[m.j][dof] -= ops.mass[dof];
    }
  }

  for (const Junction& jct : cx.junctions) {
    Vec krow = zeros(nv);
    Mat drows = mat_zeros(3, nv);
    for (int leg = 0; leg < 3; ++leg) {
      const JunctionLeg& lg = jct.legs[leg];
      const InterfaceMesh1D& m = cx.meshes[lg.mesh];
      int ed = cx.end_dof(lg);
      krow[ed] += lg.sign;
      std::array<std::pair<int, double>, 3> st;
      end_stencil(m, lg.at_start, cx.offsets[lg.mesh], st);
      for (auto [dof, coef] : st) drows[leg][dof] += lg.sign * coef;
      drows[leg][ed] -= lg.sign * lg.barII;
    }
    ops.kirchhoff.push_back(std::move(krow));
    ops.conformal.push_back(sub(drows[0], drows[1]));
    ops.conformal.push_back(sub(drows[1], drows[2]));
  }
  ops.constraints = ops.kirchhoff;
  ops.constraints.insert(ops.constraints.end(), ops.conformal.begin(), ops.conformal.end());
  return ops;
}

namespace {

// GradientForm quadratic: f^T K f - sum ric m f^2 - sum_junction barII f^2 w.
double gradient_form(const PartitionComplex& cx, const OperatorSet& ops, const Vec& f) {
  const int nv = cx.dofs();
  double q = 0;
  for (int r = 0; r < nv; ++r)
    for (int c = 0; c < nv; ++c) q += f[r] * ops.stiffness[r][c] * f[c];
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
    double ric = ops.L_jac[cx.offsets[mi]][cx.offsets[mi]] - ops.laplacian[cx.offsets[mi]][cx.offsets[mi]];
    for (size_t v = 0; v < cx.meshes[mi].s.size(); ++v) {
      int dof = cx.offsets[mi] + static_cast<int>(v);
      q -= ric * ops.mass[dof] * f[dof] * f[dof];
    }
  }
  for (const Junction& jct : cx.junctions)
    for (const JunctionLeg& lg : jct.legs) {
      double fe = f[cx.end_dof(lg)];
      q -= jct.weight * lg.barII * fe * fe;
    }
  return q;
}

} // namespace

double q0_eval(const PartitionComplex& cx, const OperatorSet& ops, const Vec& f, Q0Mode mode) {
  require(static_cast<int>(f.size()) == cx.dofs(), "q0_eval: DOF count mismatch");
  double fmax = 0;
  for (double x : f) fmax = std::max(fmax, std::abs(x));
  for (const Vec& row : ops.kirchhoff)
    require(std::abs(inner(row, f)) <= 1e-10 * (1.0 + fmax),
            "q0_eval: field violates the Kirchhoff constraints");

  const int nv = cx.dofs();
  if (mode == Q0Mode::GradientForm) return gradient_form(cx, ops, f);

  if (mode == Q0Mode::LJacForm) {
    double q = 0;
    for (int r = 0; r < nv; ++r) {
      double lj = 0;
      for (int c = 0; c < nv; ++c) lj += ops.L_jac[r][c] * f[c];
      q -= ops.mass[r] * f[r] * lj;
    }
    // Boundary term: one-sided outward derivative at every arc end.
    for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
      const InterfaceMesh1D& m = cx.meshes[mi];
      if (m.closed) continue;
      for (bool at_start : {true, false}) {
        std::array<std::pair<int, double>, 3> st;
        end_stencil(m, at_start, cx.offsets[mi], st);
        double dn = 0;
        for (auto [dof, coef] : st) dn += coef * f[dof];
        int ed = st[0].first;
        int jid = at_start ? m.junction_start : m.junction_end;
        double barII = 0, wend = m.weight[ed - cx.offsets[mi]];
        if (jid >= 0) {
          const Junction& jct = cx.junctions[jid];
          wend = jct.weight;
          for (const JunctionLeg& lg : jct.legs)
            if (lg.mesh == static_cast<int>(mi) && lg.at_start == at_start) barII = lg.barII;
        }
        q += wend * (dn - barII * f[ed]) * f[ed];
      }
    }
    return q;
  }

  // ConjugatedForm: edge-midpoint quadrature of |f' - (V'/V) f|^2, vertex
  // quadrature of (L_Jac V / V) f^2, and the boundary term
  // (grad_{n_d} V / V - barII) f^2 which vanishes for certificate potentials.
  Vec ljv = zeros(nv);
  for (int r = 0; r < nv; ++r)
    for (int c = 0; c < nv; ++c) ljv[r] += ops.L_jac[r][c] * ops.V_vertex[c];
  double q = 0;
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
    const InterfaceMesh1D& m = cx.meshes[mi];
    const int base = cx.offsets[mi];
    const int n = static_cast<int>(m.s.size());
    int edges = m.closed ? n : n - 1;
    for (int e = 0; e < edges; ++e) {
      int a = base + e, b = base + (e + 1) % n;
      double wm = 0.5 * (m.weight[e] + m.weight[(e + 1) % n]);
      double fm = 0.5 * (f[a] + f[b]), vm = 0.5 * (ops.V_vertex[a] + ops.V_vertex[b]);
      double df = (f[b] - f[a]) / m.h, dv = (ops.V_vertex[b] - ops.V_vertex[a]) / m.h;
      double conj = df - dv / vm * fm;
      q += m.h * wm * conj * conj;
    }
    for (int v = 0; v < n; ++v) {
      int dof = base + v;
      q -= ops.mass[dof] * (ljv[dof] / ops.V_vertex[dof]) * f[dof] * f[dof];
    }
    if (!m.closed) {
      for (bool at_start : {true, false}) {
        std::array<std::pair<int, double>, 3> st;
        end_stencil(m, at_start, base, st);
        double dnv = 0;
        for (auto [dof, coef] : st) dnv += coef * ops.V_vertex[dof];
        int ed = st[0].first;
        int jid = at_start ? m.junction_start : m.junction_end;
        double barII = 0, wend = m.weight[ed - base];
        if (jid >= 0) {
          const Junction& jct = cx.junctions[jid];
          wend = jct.weight;
          for (const JunctionLeg& lg : jct.legs)
            if (lg.mesh == static_cast<int>(mi) && lg.at_start == at_start) barII = lg.barII;
        }
        q += wend * (dnv / ops.V_vertex[ed] - barII) * f[ed] * f[ed];
      }
    }
  }
  return q;
}

Vec delta1_vol(const PartitionComplex& cx, const OperatorSet& ops, const Vec& f) {
  require(static_cast<int>(f.size()) == cx.dofs(), "delta1_vol: DOF count mismatch");
  Vec out;
  for (const Vec& row : ops.vol_rows) out.push_back(inner(row, f));
  return out;
}

double stability_margin(const PartitionComplex& cx, const OperatorSet& ops,
                        StabilityMode mode) {
  const int nv = cx.dofs();
  // Quadratic Q0 matrix in the GradientForm assembly.
  Mat Q = ops.stiffness;
  for (size_t mi = 0; mi < cx.meshes.size(); ++mi) {
    double ric = ops.L_jac[cx.offsets[mi]][cx.offsets[mi]] - ops.laplacian[cx.offsets[mi]][cx.offsets[mi]];
    for (size_t v = 0; v < cx.meshes[mi].s.size(); ++v) {
      int dof = cx.offsets[mi] + static_cast<int>(v);
      Q[dof][dof] -= ric * ops.mass[dof];
    }
  }
  for (const Junction& jct : cx.junctions)
    for (const JunctionLeg& lg : jct.legs) {
      int ed = cx.end_dof(lg);
      Q[ed][ed] -= jct.weight * lg.barII;
    }

  Mat C;
  if (mode == StabilityMode::ImageOfLV) {
    C = ops.constraints;
  } else {
    C = ops.kirchhoff;
    for (size_t r = 0; r + 1 < ops.vol_rows.size(); ++r) C.push_back(ops.vol_rows[r]);
  }
  Mat Z;
  if (C.empty()) {
    for (int r = 0; r < nv; ++r) Z.push_back(basis(nv, r));
  } else {
    Z = lstsq_min_norm(C, zeros(C.size())).null_basis;
  }
  require(!Z.empty(), "stability_margin: empty admissible space");

  Mat G; // candidate fields spanning the admissible image
  if (mode == StabilityMode::ImageOfLV) {
    Mat img;
    for (const Vec& z : Z) {
      Vec g = zeros(nv);
      for (int r = 0; r < nv; ++r)
        for (int c = 0; c < nv; ++c) g[r] += ops.L_v[r][c] * z[c];
      img.push_back(std::move(g));
    }
    // The nonnegativity theorem quantifies over *physical* fields of the form
    // L_V u: the image must additionally satisfy the Dirichlet-Kirchhoff
    // conditions (without them, near-constant per-mesh modes with signed sums
    // (m, m, -m) slip in and the margin is spuriously negative).
    if (ops.kirchhoff.empty()) {
      G = std::move(img);
    } else {
      Mat kc(ops.kirchhoff.size(), zeros(img.size()));
      for (size_t k = 0; k < ops.kirchhoff.size(); ++k)
        for (size_t r = 0; r < img.size(); ++r) kc[k][r] = inner(ops.kirchhoff[k], img[r]);
      Mat W = lstsq_min_norm(kc, zeros(kc.size())).null_basis;
      for (const Vec& w : W) {
        Vec g = zeros(nv);
        for (size_t r = 0; r < img.size(); ++r)
          for (int v = 0; v < nv; ++v) g[v] += w[r] * img[r][v];
        G.push_back(std::move(g));
      }
    }
  } else {
    G = Z;
  }

  const size_t r = G.size();
  Mat A = mat_zeros(r, r), B = mat_zeros(r, r);
  Mat QG; // Q * G^T columns
  for (const Vec& g : G) {
    Vec qg = zeros(nv);
    for (int i = 0; i < nv; ++i)
      for (int c = 0; c < nv; ++c) qg[i] += Q[i][c] * g[c];
    QG.push_back(std::move(qg));
  }
  for (size_t a = 0; a < r; ++a)
    for (size_t b = a; b < r; ++b) {
      A[a][b] = A[b][a] = inner(G[a], QG[b]);
      double m = 0;
      for (int v = 0; v < nv; ++v) {
        double wv = (mode == StabilityMode::ImageOfLV) ? ops.mass[v] / ops.V_vertex[v]
                                                       : ops.mass[v];
        m += wv * G[a][v] * G[b][v];
      }
      B[a][b] = B[b][a] = m;
    }
  GenEigResult ge = sym_geneig(A, B, 1e-9);
  require(!ge.eigvals.empty(), "stability_margin: empty admissible space");
  return ge.eigvals.front();
}

// ---------------------------------------------------------------------------
// 2D closed-interface machinery.

namespace {

// Per-triangle cotangent accumulation; visitor(a, b, w) means K[a][b] -= w,
// K[a][a] += w, symmetric in (a,b).
template <typename F>
void for_cotan_edges(const InterfaceMesh2D& mesh, F&& visit) {
  Signature sig = mesh.sphere.space.sig();
  for (const auto& tri : mesh.tris) {
    for (int c = 0; c < 3; ++c) {
      int vc = tri[c], va = tri[(c + 1) % 3], vb = tri[(c + 2) % 3];
      Vec ea = sub(mesh.verts[va], mesh.verts[vc]);
      Vec eb = sub(mesh.verts[vb], mesh.verts[vc]);
      double dot = inner(ea, eb, sig);
      double gram = inner(ea, ea, sig) * inner(eb, eb, sig) - dot * dot;
      double cot = dot / (2.0 * std::sqrt(std::max(gram, 1e-300)));
      visit(va, vb, cot);
    }
  }
}

} // namespace

Vec apply_cotan(const InterfaceMesh2D& mesh, const Vec& x) {
  require(x.size() == mesh.verts.size(), "apply_cotan: size mismatch");
  Vec y = zeros(x.size());
  for_cotan_edges(mesh, [&](int a, int b, double w) {
    y[a] += w * (x[a] - x[b]);
    y[b] += w * (x[b] - x[a]);
  });
  return y;
}

Mat cotan_stiffness(const InterfaceMesh2D& mesh) {
  const size_t n = mesh.verts.size();
  Mat k = mat_zeros(n, n);
  for_cotan_edges(mesh, [&](int a, int b, double w) {
    k[a][a] += w;
    k[b][b] += w;
    k[a][b] -= w;
    k[b][a] -= w;
  });
  return k;
}

Vec spectrum(const InterfaceMesh2D& mesh, int count) {
  require(mesh_closed(mesh.tris), "spectrum: closed meshes only");
  require(mesh.verts.size() <= 4000,
          "spectrum: mesh above the 4000-vertex dense-solve cap");
  Mat k = cotan_stiffness(mesh);
  Vec areas = vertex_areas(mesh);
  const size_t n = mesh.verts.size();
  for (size_t i = 0; i < n; ++i) {
    require(areas[i] > 0, "spectrum: degenerate vertex area");
    double si = 1.0 / std::sqrt(areas[i]);
    for (size_t j = 0; j < n; ++j) k[i][j] *= si;
  }
  for (size_t j = 0; j < n; ++j) {
    double sj = 1.0 / std::sqrt(areas[j]);
    for (size_t i = 0; i < n; ++i) k[i][j] *= sj;
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double s = 0.5 * (k[i][j] + k[j][i]);
      k[i][j] = k[j][i] = s;
    }
  EigResult eig = sym_eig(k);
  Vec out;
  for (int e = 0; e < count && e < static_cast<int>(n); ++e) out.push_back(eig.eigvals[e]);
  return out;
}

BLReport bl_check(const InterfaceMesh2D& mesh, const PotentialSpec& V, double N, int trials,
                  uint64_t seed) {
  require(mesh_closed(mesh.tris), "bl_check: closed meshes only");
  require(N > 1.0 || N < 0.0, "bl_check: N must be in [n-1, inf) or negative");
  const Space& space = mesh.sphere.space;
  const Signature sig = space.sig();
  const size_t nv = mesh.verts.size();
  Vec areas = vertex_areas(mesh);
  Vec vvert(nv);
  for (size_t v = 0; v < nv; ++v) {
    vvert[v] = potential_eval(V, mesh.verts[v]);
    require(vvert[v] > 0, "bl_check: potential not positive on the mesh");
  }

  // Per-vertex V Ric^V tensor (chart frame) and inverse; Ric_Sigma from the
  // closed form, Hessian/Laplacian of V by finite differences in the chart.
  AmbientFn fv = [&](const Vec& p) { return potential_eval(V, p); };
  double kappa = mesh.sphere.k;
  double ric;
  switch (space.kind) {
    case SpaceKind::SphereS: ric = (space.n - 2) * (1.0 + kappa * kappa); break;
    case SpaceKind::EuclidR: ric = (space.n - 2) * kappa * kappa; break;
    case SpaceKind::HyperH: ric = (space.n - 2) * (kappa * kappa - 1.0); break;
    default: require(false, "bl_check: Gauss interfaces are never closed"); ric = 0;
  }
  FDConfig fd;
  BLReport rep;
  rep.trials = trials;
  rep.min_ricv_eig = 1e300;
  std::vector<Mat> tinv(nv);
  std::vector<std::vector<Vec>> frames(nv);
  for (size_t v = 0; v < nv; ++v) {
    Chart chart = sphere_chart(space, mesh.sphere, mesh.verts[v]);
    double lap = fd_surface_laplacian(chart, fv, fd);
    Mat hess = fd_surface_hessian(chart, fv, fd);
    Mat t = hess;
    for (size_t a = 0; a < t.size(); ++a) {
      for (size_t b = 0; b < t.size(); ++b) t[a][b] = -t[a][b];
      t[a][a] += vvert[v] * ric + lap;
    }
    EigResult eig = sym_eig(t);
    rep.min_ricv_eig = std::min(rep.min_ricv_eig, eig.eigvals.front());
    require(eig.eigvals.front() > 0, "bl_check: V Ric^V is not positive definite");
    // Inverse from the eigendecomposition (2x2).
    Mat inv = mat_zeros(t.size(), t.size());
    for (size_t k = 0; k < t.size(); ++k)
      for (size_t a = 0; a < t.size(); ++a)
        for (size_t b = 0; b < t.size(); ++b)
          inv[a][b] += eig.eigvecs[k][a] * eig.eigvecs[k][b] / eig.eigvals[k];
    tinv[v] = std::move(inv);
    frames[v] = chart.frame;
  }

  // Discrete weighted Laplacian: lumped mass + cotangent stiffness.
  auto lap_of = [&](const Vec& x) {
    Vec y = apply_cotan(mesh, x);
    for (size_t v = 0; v < nv; ++v) y[v] = -y[v] / areas[v];
    return y;
  };
  Vec lapV = lap_of(vvert);

  // Vertex gradients: area-weighted average of P1 triangle gradients.
  auto vertex_gradients = [&](const Vec& x) {
    std::vector<Vec> g(nv, zeros(mesh.verts[0].size()));
    Vec wsum = zeros(nv);
    for (const auto& tri : mesh.tris) {
      Vec e1 = sub(mesh.verts[tri[1]], mesh.verts[tri[0]]);
      Vec e2 = sub(mesh.verts[tri[2]], mesh.verts[tri[0]]);
      double g11 = inner(e1, e1, sig), g12 = inner(e1, e2, sig), g22 = inner(e2, e2, sig);
      double det = g11 * g22 - g12 * g12;
      double d1 = x[tri[1]] - x[tri[0]], d2 = x[tri[2]] - x[tri[0]];
      double c1 = (g22 * d1 - g12 * d2) / det, c2 = (g11 * d2 - g12 * d1) / det;
      Vec grad = axpy(scale(e1, c1), c2, e2);
      double area = 0.5 * std::sqrt(std::max(det, 0.0));
      for (int v : tri) {
        g[v] = axpy(g[v], area, grad);
        wsum[v] += area;
      }
    }
    for (size_t v = 0; v < nv; ++v) g[v] = scale(g[v], 1.0 / wsum[v]);
    return g;
  };

  Rng rng(seed);
  rep.min_gap = 1e300;
  for (int t = 0; t < trials; ++t) {
    // Random low-order smooth ambient u sampled at the vertices.
    const size_t d = mesh.verts[0].size();
    Vec lin = rng.normal_vec(d);
    Mat quad(d, zeros(d));
    for (size_t a = 0; a < d; ++a)
      for (size_t b = 0; b < d; ++b) quad[a][b] = 0.3 * rng.normal();
    Vec u(nv);
    for (size_t v = 0; v < nv; ++v) {
      const Vec& p = mesh.verts[v];
      double s = inner(lin, p);
      for (size_t a = 0; a < d; ++a)
        for (size_t b = 0; b < d; ++b) s += quad[a][b] * p[a] * p[b];
      u[v] = s;
    }
    Vec lapU = lap_of(u);
    Vec f(nv);
    for (size_t v = 0; v < nv; ++v) f[v] = vvert[v] * lapU[v] - u[v] * lapV[v];

    double lhs = 0;
    for (size_t v = 0; v < nv; ++v) lhs += areas[v] * f[v] * f[v] / vvert[v];
    lhs *= N / (N - 1.0);

    auto gf = vertex_gradients(f);
    auto gv = vertex_gradients(vvert);
    double rhs = 0;
    for (size_t v = 0; v < nv; ++v) {
      Vec w_amb = axpy(gf[v], -f[v] / vvert[v], gv[v]);
      const auto& fr = frames[v];
      Vec w(fr.size());
      for (size_t a = 0; a < fr.size(); ++a) w[a] = inner(w_amb, fr[a], sig);
      double quad_form = 0;
      for (size_t a = 0; a < fr.size(); ++a)
        for (size_t b = 0; b < fr.size(); ++b) quad_form += w[a] * tinv[v][a][b] * w[b];
      rhs += areas[v] * quad_form;
    }
    double gap = (rhs < 1e-12 && lhs < 1e-12) ? 0.0 : (rhs - lhs) / std::max(rhs, 1e-300);
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.lhs = lhs;
      rep.rhs = rhs;
    }
  }
  return rep;
}

} // namespace svp
