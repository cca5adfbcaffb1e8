#pragma once

#include <vector>

#include "latentflow/fvm/assembly.hpp"
#include "latentflow/fvm/field.hpp"

namespace lf::fvm {

/// Darcy velocities on cell faces. x-faces: (nx+1) x ny, index j*(nx+1)+i is the face west of
/// cell i. y-faces: nx x (ny+1), index j*nx+i is the face south of cell (i, j).
struct FaceVelocities {
  std::size_t nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  std::vector<double> ux;
  std::vector<double> uy;

  double x_face(std::size_t i, std::size_t j) const { return ux[j * (nx + 1) + i]; }
  double y_face(std::size_t i, std::size_t j) const { return uy[j * nx + i]; }
};

/// u = -K grad h with harmonic face conductivities, half-cell ghost distance at Dirichlet faces
/// and zero normal velocity on no-flux faces. Matches the assembled fluxes exactly.
FaceVelocities darcy_velocity(const ScalarField2D& K, const ScalarField2D& h, const BoundaryConditions& bc);

/// Net volumetric outflow per cell (per unit depth).
ScalarField2D divergence(const FaceVelocities& u);

}  // namespace lf::fvm
