#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "neulap/domain.hpp"
#include "neulap/mesh.hpp"

namespace neulap::fem {

using SpMat = Eigen::SparseMatrix<double>;

// Reduced symmetric pair K, M plus the operator recovering nodal values from
// reduced degrees of freedom (identity rows for free nodes, zero rows for
// Dirichlet nodes, interpolation rows for tied interface nodes).
struct AssembledForms {
  SpMat K, M;
  SpMat expand;                            // n_nodes x n_dofs
  std::vector<std::uint8_t> dirichlet_mask;  // per node
  std::vector<int> dof_map;                  // node -> dof index, -1 if eliminated
  bool dirichlet_active = false;
  int n_nodes = 0;

  int n() const { return static_cast<int>(K.rows()); }
};

// Mapped channel forms on the reference cylinder:
//   K = Int_Q [ (phi_y1 - (g'/g) y2 phi_y2)^2 + (1/g^2) phi_y2^2 ] g dy
//   M = Int_Q phi^2 g dy
// 2x2 Gauss points per quad; Dirichlet on gamma0, optionally on gammaL too.
AssembledForms assemble_mapped_channel_forms(const StructuredMesh& mesh,
                                             const geometry::ChannelProfile& profile,
                                             bool dirichlet_gammaL = false);

// plain Laplace + mass forms on a physical rectangle mesh
AssembledForms assemble_rect_forms(const StructuredMesh& mesh, bool dirichlet_all);

// Dirichlet oscillating-top domain (0,1) x (-1, a(1+sin(x/eps))), mapped onto the
// unit reference square via y = -1 + H(x)*t, H(x) = 1 + a(1+sin(x/eps)).
AssembledForms build_oscillating_forms(double a, double eps, int nx, int ny,
                                       StructuredMesh* mesh_out = nullptr);

// base rectangle (-1,0) x (-h/2,h/2) with uniform elements of size ~ h_base
AssembledForms build_base_forms(double height, double h_base,
                                StructuredMesh* mesh_out = nullptr);

struct DumbbellAssembly {
  StructuredMesh base_mesh;     // physical coordinates
  StructuredMesh channel_mesh;  // reference coordinates; mouth edges tagged interface
  AssembledForms forms;         // combined tied pair, pure Neumann
  AssembledForms base;          // base-only pair (H1(Omega_0) norms)
  AssembledForms channel;       // channel-only mapped pair (H1(channel) norms)
  int base_nodes = 0;           // combined node ids: base [0, nb), channel [nb, nb+nc)
  int channel_nodes = 0;
};

// Composite dumbbell: base rectangle meshed at h_base, channel meshed nx x ny in
// mapped coordinates, channel mouth nodes tied to the base edge trace by linear
// interpolation; pure Neumann.
DumbbellAssembly build_dumbbell_forms(const geometry::PerturbedDomain& domain,
                                      double h_base, int nx, int ny);

}  // namespace neulap::fem
