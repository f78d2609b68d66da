#include "crfv/diagnostics.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

namespace {

using namespace crfv;

struct Fixture {
  TetMesh mesh;
  CRVecField u;
  QField rho, rho_prev, rho_b;
  BoundaryClassification cls;

  explicit Fixture(int n) : mesh(structured_box_mesh(n, n, n)), u(mesh), rho(mesh), rho_prev(mesh), rho_b(mesh) {
    u = project_V(mesh, [](const Vec3& x) { return Vec3(std::sin(3 * x[1]), x[0] * x[2], 0.2 + x[0]); });
    rho = project_Q(mesh, [](const Vec3& x) { return 1.0 + 0.3 * x[0] * x[1]; });
    rho_prev = project_Q(mesh, [](const Vec3& x) { return 1.0 + 0.2 * x[2]; });
    rho_b = rho;
    cls = classify_boundary(mesh, u);
  }
};

const Fixture& fixture(int n) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[n];
  if (!f) f = std::make_unique<Fixture>(n);
  return *f;
}

Exec policy(const benchmark::State& s) { return s.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_ElementGradients(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  std::vector<Mat3> out;
  for (auto _ : s) {
    kernels::element_gradients(f.u, out, policy(s));
    benchmark::DoNotOptimize(out.data());
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(f.mesh.num_elements()));
}

void BM_ContinuityResidual(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  const FaceVelocity un(f.u);
  std::vector<double> out;
  for (auto _ : s) {
    kernels::continuity_residual(f.rho, f.rho_prev, un, f.rho_b, f.cls, 0.1, 0.01, out, policy(s));
    benchmark::DoNotOptimize(out.data());
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(f.mesh.num_elements()));
}

void BM_Energy(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  const PressureLaw law = PressureLaw::isentropic(1.0, 1.4);
  RegularizationParams reg;
  reg.kappa_tilde = 1;
  reg.h = f.mesh.h();
  std::vector<Vec3> w;
  kernels::element_means(f.u, w, Exec::Serial);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::energy(f.rho, w, law, reg, policy(s)));
  s.SetItemsProcessed(s.iterations() * static_cast<long>(f.mesh.num_elements()));
}

void args(benchmark::internal::Benchmark* b) {
  for (int n : {8, 16, 24})
    for (int p : {0, 1}) b->Args({n, p});
  b->ArgNames({"n", "parallel"});
}

}  // namespace

BENCHMARK(BM_ElementGradients)->Apply(args);
BENCHMARK(BM_ContinuityResidual)->Apply(args);
BENCHMARK(BM_Energy)->Apply(args);

BENCHMARK_MAIN();
