#include "svp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace svp {

TriMesh icosphere(int level) {
  require(level >= 0 && level <= 7, "icosphere: level in [0,7]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec& v : m.verts) v = normalized(v);
  m.tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      m.verts.push_back(normalized(add(m.verts[a], m.verts[b])));
      int idx = static_cast<int>(m.verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.tris.size() * 4);
    for (const auto& tri : m.tris) {
      int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.tris = std::move(next);
  }
  return m;
}

InterfaceMesh2D mesh_interface_sphere(const GeneralizedSphere& sphere, int level) {
  require(sphere.space.n == 3, "mesh_interface_sphere: ambient dimension must be 3");
  require(sphere.consistency_residual() < 1e-8, "mesh_interface_sphere: malformed sphere");
  TriMesh unit = icosphere(level);
  InterfaceMesh2D mesh;
  mesh.sphere = sphere;
  mesh.tris = unit.tris;

  switch (sphere.space.kind) {
    case SpaceKind::SphereS: {
      // {<c,p> = -k} & S^3: Euclidean 2-sphere centered at m = -k c/|c|^2 of
      // radius sqrt(1 - k^2/|c|^2) in the hyperplane c-perp.
      double cc = inner(sphere.c, sphere.c);
      Vec m = scale(sphere.c, -sphere.k / cc);
      double r = std::sqrt(1.0 - sphere.k * sphere.k / cc);
      auto frame = orthonormal_complement({sphere.c}, Signature::Euclidean, 4, 3);
      for (const Vec& u : unit.verts) {
        Vec p = m;
        for (int a = 0; a < 3; ++a) p = axpy(p, r * u[a], frame[a]);
        mesh.verts.push_back(p);
      }
      break;
    }
    case SpaceKind::EuclidR: {
      require(std::abs(sphere.k) > 1e-12, "mesh_interface_sphere: flat R^3 interface");
      // k|x|^2 + 2<c,x> + 2kS - k = 0 is |x + c/k| = 1/|k| by consistency.
      Vec center = scale(sphere.c, -1.0 / sphere.k);
      double r = 1.0 / std::abs(sphere.k);
      for (const Vec& u : unit.verts) mesh.verts.push_back(axpy(center, r, u));
      break;
    }
    case SpaceKind::HyperH: {
      double q = inner(sphere.c, sphere.c, Signature::Lorentzian);
      require(q < -1e-12, "mesh_interface_sphere: H^3 interface is not a compact sphere");
      double s = std::sqrt(-q);
      Vec z = scale(sphere.c, -(sphere.k > 0 ? 1.0 : -1.0) / s);
      require(z.back() > 0, "mesh_interface_sphere: geodesic sphere center not future-pointing");
      double ch = std::abs(sphere.k) / s;
      require(ch >= 1.0, "mesh_interface_sphere: empty geodesic sphere");
      double sh = std::sqrt(ch * ch - 1.0);
      auto frame = orthonormal_complement({z}, Signature::Lorentzian, 4, 3);
      for (const Vec& u : unit.verts) {
        Vec p = scale(z, ch);
        for (int a = 0; a < 3; ++a) p = axpy(p, sh * u[a], frame[a]);
        mesh.verts.push_back(p);
      }
      break;
    }
    default:
      require(false, "mesh_interface_sphere: G^3 interfaces are affine (never closed)");
  }
  return mesh;
}

bool mesh_closed(const std::vector<std::array<int, 3>>& tris) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : tris)
    for (int e = 0; e < 3; ++e) edge_count[std::minmax(tri[e], tri[(e + 1) % 3])] += 1;
  for (const auto& [edge, count] : edge_count)
    if (count != 2) return false;
  return true;
}

Vec vertex_areas(const InterfaceMesh2D& mesh) {
  Signature sig = mesh.sphere.space.sig();
  Vec areas = zeros(mesh.verts.size());
  for (const auto& tri : mesh.tris) {
    Vec a = sub(mesh.verts[tri[1]], mesh.verts[tri[0]]);
    Vec b = sub(mesh.verts[tri[2]], mesh.verts[tri[0]]);
    double gram = inner(a, a, sig) * inner(b, b, sig) - inner(a, b, sig) * inner(a, b, sig);
    double area = 0.5 * std::sqrt(std::max(gram, 0.0));
    for (int v = 0; v < 3; ++v) areas[tri[v]] += area / 3.0;
  }
  return areas;
}

} // namespace svp
