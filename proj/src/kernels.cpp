#include "crfv/kernels.hpp"

#include "crfv/omp_compat.hpp"

namespace crfv::kernels {

void element_gradients(const CRVecField& v, std::vector<Mat3>& out, Exec exec) {
  const TetMesh& mesh = v.mesh();
  const auto ne = static_cast<long>(mesh.num_elements());
  out.resize(mesh.num_elements());
  if (exec == Exec::Serial) {
    for (long k = 0; k < ne; ++k) out[static_cast<std::size_t>(k)] = grad_h(v, static_cast<int>(k));
    return;
  }
#pragma omp parallel for schedule(static)
  for (long k = 0; k < ne; ++k) {
    const int ki = static_cast<int>(k);
    Mat3 g = Mat3::Zero();
    const auto& faces = mesh.element_faces(ki);
    for (int i = 0; i < 4; ++i) g.noalias() += v.at(faces[static_cast<std::size_t>(i)]) * basis_gradient(mesh, ki, i).transpose();
    out[static_cast<std::size_t>(k)] = g;
  }
}

void element_means(const CRVecField& v, std::vector<Vec3>& out, Exec exec) {
  const TetMesh& mesh = v.mesh();
  const auto ne = static_cast<long>(mesh.num_elements());
  out.resize(mesh.num_elements());
  if (exec == Exec::Serial) {
    const QVecField m = element_mean(v);
    out = m.values();
    return;
  }
#pragma omp parallel for schedule(static)
  for (long k = 0; k < ne; ++k) {
    const auto& f = mesh.element_faces(static_cast<int>(k));
    out[static_cast<std::size_t>(k)] = 0.25 * (v.at(f[0]) + v.at(f[1]) + v.at(f[2]) + v.at(f[3]));
  }
}

void face_normal_velocity(const CRVecField& u, std::vector<double>& un, Exec exec) {
  const TetMesh& mesh = u.mesh();
  if (exec == Exec::Serial) {
    un = FaceVelocity(u).un;
    return;
  }
  const auto nf = static_cast<long>(mesh.num_faces());
  un.resize(mesh.num_faces());
#pragma omp parallel for schedule(static)
  for (long f = 0; f < nf; ++f) un[static_cast<std::size_t>(f)] = u.at(static_cast<int>(f)).dot(mesh.face(static_cast<int>(f)).normal);
}

namespace {

double continuity_row(const QField& rho, const QField& rho_prev, const FaceVelocity& un, const QField& rho_b,
                      const BoundaryClassification& cls, double dt, double diffusion, int k) {
  const TetMesh& mesh = rho.mesh();
  const double rk = rho.at(k);
  double r = mesh.volume(k) * (rk - rho_prev.at(k)) / dt;
  for (int i = 0; i < 4; ++i) {
    const int f = mesh.element_faces(k)[static_cast<std::size_t>(i)];
    const Face& face = mesh.face(f);
    const double a = un.outward(mesh, k, i);
    if (face.is_boundary()) {
      r += face.area * (cls.is_inflow(f) ? rho_b.at(k) : rk) * a;
      continue;
    }
    const int l = mesh.across(k, i);
    // Ties go to the face owner.
    const double up = un[static_cast<std::size_t>(f)] >= 0.0 ? rho.at(face.owner) : rho.at(face.neighbor);
    r += face.area * (up * a + diffusion * (rk - rho.at(l)));
  }
  return r;
}

}  // namespace

void continuity_residual(const QField& rho, const QField& rho_prev, const FaceVelocity& un, const QField& rho_b,
                         const BoundaryClassification& cls, double dt, double diffusion, std::vector<double>& out,
                         Exec exec) {
  const TetMesh& mesh = rho.mesh();
  out.assign(mesh.num_elements(), 0.0);
  if (exec == Exec::Serial) {
    // Reference: scatter over faces.
    for (std::size_t k = 0; k < out.size(); ++k) {
      const int ki = static_cast<int>(k);
      out[k] = mesh.volume(ki) * (rho[k] - rho_prev[k]) / dt;
    }
    for (int f : mesh.interior_faces()) {
      const Face& face = mesh.face(f);
      const double a = un[static_cast<std::size_t>(f)];
      const double flux = face.area * (a >= 0.0 ? rho.at(face.owner) : rho.at(face.neighbor)) * a;
      const double pen = face.area * diffusion * (rho.at(face.owner) - rho.at(face.neighbor));
      out[static_cast<std::size_t>(face.owner)] += flux + pen;
      out[static_cast<std::size_t>(face.neighbor)] -= flux + pen;
    }
    for (int f : mesh.boundary_faces()) {
      const Face& face = mesh.face(f);
      const auto k = static_cast<std::size_t>(face.owner);
      out[k] += face.area * (cls.is_inflow(f) ? rho_b[k] : rho[k]) * un[static_cast<std::size_t>(f)];
    }
    return;
  }
  const auto ne = static_cast<long>(mesh.num_elements());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < ne; ++k)
    out[static_cast<std::size_t>(k)] = continuity_row(rho, rho_prev, un, rho_b, cls, dt, diffusion, static_cast<int>(k));
}

EnergySums energy(const QField& rho, const std::vector<Vec3>& w, const PressureLaw& law,
                  const RegularizationParams& reg, Exec exec) {
  const TetMesh& mesh = rho.mesh();
  EnergySums e;
  e.kinetic = chunked_sum(
      rho.size(), [&](std::size_t k) { return 0.5 * mesh.volume(static_cast<int>(k)) * rho[k] * w[k].squaredNorm(); },
      exec);
  e.internal = chunked_sum(
      rho.size(), [&](std::size_t k) { return mesh.volume(static_cast<int>(k)) * H_h(law, reg, rho[k]); }, exec);
  return e;
}

}  // namespace crfv::kernels
