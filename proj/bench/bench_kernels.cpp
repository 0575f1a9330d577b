#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "bmkt/laplace.hpp"
#include "bmkt/noise.hpp"
#include "bmkt/simulate.hpp"

using namespace bmkt;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %8.3f s  parallel %8.3f s  speedup %5.2f\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  const auto model = ModelSpec::linear(1.0);
  laplace::InversionRequest inv{ShapeEvaluator::observable(model), {}, 1e-8, true};
  for (int k = 0; k <= 2000; ++k) inv.lags.push_back(0.01 * k);
  report("laplace inversion", seconds([&] { laplace::invert_serial(inv); }),
         seconds([&] { laplace::invert(inv); }));

  const double h = 0.05;
  noise::SpectrumTarget target{
      [shape = ShapeEvaluator::force(model)](double w) { return laplace::spectral_density(shape, w); },
      2.0};
  noise::NoiseRequest req{target, 1u << 14, h, 64, 7};
  report("colored noise", seconds([&] { noise::generate_colored_serial(req); }),
         seconds([&] { noise::generate_colored(req); }));

  simulate::GleRun run;
  run.h = h;
  run.n_steps = 1u << 13;
  run.n_paths = 32;
  run.seed = 7;
  report("GLE ensemble", seconds([&] { simulate::gle_returns_serial(model, run); }),
         seconds([&] { simulate::gle_returns(model, run); }));
  return 0;
}
