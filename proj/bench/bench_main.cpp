// Timing harness comparing the OpenMP kernels against their serial reference
// implementations on benchmark-sized problems.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "denest/dynamics.hpp"
#include "denest/filter.hpp"
#include "denest/fpops.hpp"
#include "denest/kde.hpp"
#include "denest/linalg.hpp"
#include "denest/scenario.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int agents = 300000;
  int nx = 120;
  int reps = 5;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const int value = std::atoi(argv[i + 1]);
    if (key == "--agents") agents = value;
    else if (key == "--grid") nx = value;
    else if (key == "--reps") reps = value;
    else {
      std::fprintf(stderr, "usage: %s [--agents N] [--grid N] [--reps N]\n", argv[0]);
      return 1;
    }
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernels run serially\n");
#endif
  std::printf("agents=%d grid=%dx%d reps=%d (best-of timing)\n\n", agents, nx, nx, reps);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  const denest::Grid grid = denest::build_grid(nx, nx, 0.0, 1.0, 0.0, 1.0);
  const denest::MixtureScenario scen;
  const denest::VelocityField vel = denest::scenario_velocity(scen);
  const denest::DiffusionModel diff = denest::make_diffusion(scen.diffusion);
  const denest::KdeConfig kcfg = denest::make_kde_config(0.05, 2);

  {
    denest::AgentEnsemble a = denest::init_agents(agents, grid, 7);
    denest::AgentEnsemble b = a;
    report("step_agents",
           time_best_of(reps, [&] { denest::step_agents_serial(a, vel, diff, 0.1, grid); }),
           time_best_of(reps, [&] { denest::step_agents(b, vel, diff, 0.1, grid); }));

    const double serial_kde =
        time_best_of(reps, [&] { (void)denest::kde_on_grid_serial(a, grid, kcfg); });
    const double parallel_kde =
        time_best_of(reps, [&] { (void)denest::kde_on_grid(a, grid, kcfg); });
    report("kde_on_grid", serial_kde, parallel_kde);
  }

  const denest::FpOperator op = denest::assemble_operator(grid, vel, diff, 0.0);
  const int cells = grid.cells();
  const denest::DensityField p = denest::DensityField::constant(grid, 1.0);
  report("apply_operator",
         time_best_of(reps, [&] { (void)denest::apply_operator_serial(op, p); }),
         time_best_of(reps, [&] { (void)denest::apply_operator(op, p); }));

  denest::DenseMat P = denest::DenseMat::Identity(cells, cells);
  P.array() += 0.01;
  denest::DenseMat S(cells, cells), T(cells, cells);
  const Eigen::VectorXd scale = Eigen::VectorXd::Constant(cells, 2.0);
  report("spmm", time_best_of(reps, [&] { denest::spmm_serial(op.matrix, P, S); }),
         time_best_of(reps, [&] { denest::spmm(op.matrix, P, S); }));
  report("scale_columns",
         time_best_of(reps, [&] { denest::scale_columns_serial(P, scale, T); }),
         time_best_of(reps, [&] { denest::scale_columns(P, scale, T); }));

  denest::spmm(op.matrix, P, S);
  denest::DenseMat Q = T * T.transpose();
  denest::DenseMat C = S * S.transpose();
  denest::DenseMat Pa = P, Pb = P;
  report("symmetric_subtract",
         time_best_of(reps, [&] { denest::symmetric_subtract_serial(Pa, Q, 1e-4); }),
         time_best_of(reps, [&] { denest::symmetric_subtract(Pb, Q, 1e-4); }));
  report("symmetric_congruence",
         time_best_of(reps,
                      [&] { denest::symmetric_congruence_update_serial(Pa, S, C, 1e-4); }),
         time_best_of(reps,
                      [&] { denest::symmetric_congruence_update(Pb, S, C, 1e-4); }));

  {
    const Eigen::VectorXd r = Eigen::VectorXd::Constant(cells, 0.1);
    denest::DenseMat Pr1 = denest::DenseMat::Identity(cells, cells);
    denest::DenseMat Pr2 = Pr1;
    const double dt = 0.9 / (2.0 * op.max_abs_diag);  // one inner step exactly
    report("riccati substep",
           time_best_of(reps,
                        [&] {
                          denest::DenseMat s(cells, cells), st(cells, cells), c(cells, cells),
                              w(cells, cells), q(cells, cells);
                          denest::scale_columns_serial(Pr1, r.cwiseSqrt().cwiseInverse(), w);
                          q.noalias() = w * w.transpose();
                          denest::symmetric_subtract_serial(Pr1, q, dt);
                          denest::spmm_serial(op.matrix, Pr1, s);
                          st = s.transpose();
                          denest::spmm_serial(op.matrix, st, c);
                          denest::symmetric_congruence_update_serial(Pr1, s, c, dt);
                        }),
           time_best_of(reps, [&] {
             denest::riccati_advance(op.matrix, op.max_abs_diag, r, Pr2, dt);
           }));
  }

  const double gemm =
      time_best_of(reps, [&] { Q.noalias() = T * T.transpose(); });
  std::printf("\n(reference: %dx%d dense gemm %10.3f ms)\n", cells, cells, gemm);
  return 0;
}
