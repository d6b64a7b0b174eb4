#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "neulap/profile.hpp"

namespace neulap::fem {

enum class BoundaryTag { Gamma0, GammaL, Lateral, Outer, Interface };

const char* tag_name(BoundaryTag tag);

struct BoundaryEdge {
  int a = 0, b = 0;
  BoundaryTag tag = BoundaryTag::Outer;
};

// Uniform tensor grid of bilinear quads on an axis-aligned rectangle.
// Node (i,j) has index j*(nx+1)+i; quads are stored (ll, lr, ur, ul).
struct StructuredMesh {
  int nx = 0, ny = 0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 4>> quads;
  std::vector<BoundaryEdge> boundary;

  int node_index(int i, int j) const { return j * (nx + 1) + i; }
};

StructuredMesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                               BoundaryTag tag);

// reference cylinder Q = (0, L) x (-1, 1); y1=0 edges tagged gamma0, y1=L gammaL,
// |y2|=1 lateral
StructuredMesh build_channel_mesh(const geometry::ChannelProfile& profile, int nx, int ny);

// plain text, one record per line: "node <index> <x> <y>", "quad <index> <n0> <n1> <n2> <n3>",
// "edge <index> <a> <b> <tag>"
void dump_mesh(const StructuredMesh& mesh, std::ostream& os);
void dump_mesh_file(const StructuredMesh& mesh, const std::string& path);

}  // namespace neulap::fem
