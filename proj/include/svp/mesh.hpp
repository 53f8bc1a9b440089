#pragma once
// Icosphere meshes and exact embeddings of closed 2-sphere interfaces in the
// three-dimensional model spaces (ambient n = 3).

#include <array>

#include "svp/partition.hpp"

namespace svp {

struct TriMesh {
  std::vector<Vec> verts;
  std::vector<std::array<int, 3>> tris;
};

// Unit icosphere: subdivided icosahedron, vertices renormalized. Level 0 has
// 12 vertices; each level quadruples the triangle count.
TriMesh icosphere(int level);

struct InterfaceMesh2D {
  GeneralizedSphere sphere;
  std::vector<Vec> verts; // ambient coordinates, exactly on the sphere
  std::vector<std::array<int, 3>> tris;
};

// Embed an icosphere onto a closed generalized-sphere interface. Requires a
// geometrically compact sphere: S^3 always; R^3 with k != 0; H^3 with
// timelike quasi-center (|k| > 1). Flat/unbounded interfaces are rejected.
InterfaceMesh2D mesh_interface_sphere(const GeneralizedSphere& sphere, int level);

// True iff every edge is shared by exactly two triangles.
bool mesh_closed(const std::vector<std::array<int, 3>>& tris);

// Lumped vertex quadrature weights: one third of the adjacent triangle areas
// (signature-aware Gram-determinant areas of the flat ambient triangles).
Vec vertex_areas(const InterfaceMesh2D& mesh);

} // namespace svp
