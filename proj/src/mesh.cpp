#include "neulap/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "neulap/errors.hpp"

namespace neulap::fem {

const char* tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Gamma0: return "gamma0";
    case BoundaryTag::GammaL: return "gammaL";
    case BoundaryTag::Lateral: return "lateral";
    case BoundaryTag::Outer: return "outer";
    case BoundaryTag::Interface: return "interface";
  }
  return "?";
}

StructuredMesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                               BoundaryTag tag) {
  if (nx < 4 || ny < 4) throw ParameterError("mesh needs nx, ny >= 4");
  if (!(x1 > x0) || !(y1 > y0)) throw ParameterError("degenerate mesh rectangle");
  StructuredMesh m;
  m.nx = nx;
  m.ny = ny;
  m.nodes.reserve(static_cast<size_t>((nx + 1) * (ny + 1)));
  const double hx = (x1 - x0) / nx, hy = (y1 - y0) / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({x0 + hx * i, y0 + hy * j});
  m.quads.reserve(static_cast<size_t>(nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.quads.push_back({m.node_index(i, j), m.node_index(i + 1, j),
                         m.node_index(i + 1, j + 1), m.node_index(i, j + 1)});
  for (int j = 0; j < ny; ++j) {
    m.boundary.push_back({m.node_index(0, j), m.node_index(0, j + 1), tag});
    m.boundary.push_back({m.node_index(nx, j), m.node_index(nx, j + 1), tag});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary.push_back({m.node_index(i, 0), m.node_index(i + 1, 0), tag});
    m.boundary.push_back({m.node_index(i, ny), m.node_index(i + 1, ny), tag});
  }
  return m;
}

StructuredMesh build_channel_mesh(const geometry::ChannelProfile& profile, int nx, int ny) {
  if (nx < 4 || ny < 4) throw ParameterError("mesh needs nx, ny >= 4");
  const double L = profile.length();
  StructuredMesh m;
  m.nx = nx;
  m.ny = ny;
  m.nodes.reserve(static_cast<size_t>((nx + 1) * (ny + 1)));
  const double hx = L / nx, hy = 2.0 / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({hx * i, -1.0 + hy * j});
  m.quads.reserve(static_cast<size_t>(nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.quads.push_back({m.node_index(i, j), m.node_index(i + 1, j),
                         m.node_index(i + 1, j + 1), m.node_index(i, j + 1)});
  for (int j = 0; j < ny; ++j) {
    m.boundary.push_back({m.node_index(0, j), m.node_index(0, j + 1), BoundaryTag::Gamma0});
    m.boundary.push_back({m.node_index(nx, j), m.node_index(nx, j + 1), BoundaryTag::GammaL});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary.push_back({m.node_index(i, 0), m.node_index(i + 1, 0), BoundaryTag::Lateral});
    m.boundary.push_back({m.node_index(i, ny), m.node_index(i + 1, ny), BoundaryTag::Lateral});
  }
  return m;
}

void dump_mesh(const StructuredMesh& mesh, std::ostream& os) {
  char buf[128];
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "node %zu %.17g %.17g\n", i, mesh.nodes[i][0],
                  mesh.nodes[i][1]);
    os << buf;
  }
  for (size_t q = 0; q < mesh.quads.size(); ++q) {
    const auto& e = mesh.quads[q];
    std::snprintf(buf, sizeof(buf), "quad %zu %d %d %d %d\n", q, e[0], e[1], e[2], e[3]);
    os << buf;
  }
  for (size_t e = 0; e < mesh.boundary.size(); ++e) {
    const auto& be = mesh.boundary[e];
    std::snprintf(buf, sizeof(buf), "edge %zu %d %d %s\n", e, be.a, be.b, tag_name(be.tag));
    os << buf;
  }
}

void dump_mesh_file(const StructuredMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open mesh dump path: " + path);
  dump_mesh(mesh, os);
}

}  // namespace neulap::fem
