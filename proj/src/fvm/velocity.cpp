#include "latentflow/fvm/velocity.hpp"

namespace lf::fvm {

FaceVelocities darcy_velocity(const ScalarField2D& K, const ScalarField2D& h, const BoundaryConditions& bc) {
  require_same_grid(K, h, "darcy_velocity");
  FaceVelocities u;
  u.nx = K.nx();
  u.ny = K.ny();
  u.dx = K.dx();
  u.dy = K.dy();
  const std::size_t nx = u.nx, ny = u.ny;
  u.ux.assign((nx + 1) * ny, 0.0);
  u.uy.assign(nx * (ny + 1), 0.0);

  for (std::size_t j = 0; j < ny; ++j) {
    double* row = u.ux.data() + j * (nx + 1);
    row[0] = -K(0, j) * (h(0, j) - bc.left_head) / (0.5 * u.dx);
    for (std::size_t i = 1; i < nx; ++i)
      row[i] = -harmonic_face_conductivity(K(i - 1, j), K(i, j)) * (h(i, j) - h(i - 1, j)) / u.dx;
    row[nx] = -K(nx - 1, j) * (bc.right_head - h(nx - 1, j)) / (0.5 * u.dx);
  }
  for (std::size_t j = 1; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      u.uy[j * nx + i] = -harmonic_face_conductivity(K(i, j - 1), K(i, j)) * (h(i, j) - h(i, j - 1)) / u.dy;
  return u;
}

ScalarField2D divergence(const FaceVelocities& u) {
  ScalarField2D div(u.nx, u.ny, u.dx, u.dy);
  for (std::size_t j = 0; j < u.ny; ++j)
    for (std::size_t i = 0; i < u.nx; ++i)
      div(i, j) = (u.x_face(i + 1, j) - u.x_face(i, j)) * u.dy + (u.y_face(i, j + 1) - u.y_face(i, j)) * u.dx;
  return div;
}

}  // namespace lf::fvm
