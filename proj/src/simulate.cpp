#include "bmkt/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bmkt/errors.hpp"
#include "bmkt/laplace.hpp"
#include "bmkt/noise.hpp"
#include "bmkt/volterra.hpp"

namespace bmkt::simulate {
namespace {

PathEnsemble run_gle(const ModelSpec& model, const GleRun& run, bool parallel) {
  model.validate();
  if (model.variant != Variant::WhiteNoise && model.variant != Variant::LinearSelfSimilar &&
      model.variant != Variant::StockTheta)
    throw CapabilityError("simulate: no GLE kernel for model " + to_string(model.variant));
  if (!(run.h > 0.0) || !std::isfinite(run.h)) throw InputError("simulate: h must be > 0");
  if (run.n_steps < 2) throw InputError("simulate: n_steps must be >= 2");
  if (run.n_paths == 0) throw InputError("simulate: n_paths must be >= 1");

  const double tau = model.correlation_time();
  const std::size_t burn =
      run.burn_in == static_cast<std::size_t>(-1)
          ? static_cast<std::size_t>(std::ceil(5.0 * tau / run.h))
          : run.burn_in;
  const std::size_t total = std::bit_ceil(burn + run.n_steps);
  const double market = model.tau_R > 0.0 ? model.tau_R : tau;
  const std::size_t kpoints =
      run.kernel_points > 0
          ? std::min(run.kernel_points, total)
          : std::min(total, static_cast<std::size_t>(std::ceil(64.0 * market / run.h)) + 1);
  const KernelSeries kernel = volterra::model_kernel(model, run.h, kpoints);

  PathEnsemble force;
  if (kernel.local_rate > 0.0) {
    force = noise::generate_wiener_increments(total, run.h, run.n_paths, run.seed);
    const double scale = std::sqrt(2.0 * model.variance * kernel.local_rate) / run.h;
    for (std::size_t i = 0; i < force.n_paths(); ++i)
      for (double& v : force.path(i)) v *= scale;
    force.set_label(PathLabel::Force);
  } else {
    const auto shape = ShapeEvaluator::force(model);
    noise::SpectrumTarget target{[shape](double w) { return laplace::spectral_density(shape, w); },
                                 2.0 / model.tau_R};
    noise::NoiseRequest req{target, total, run.h, run.n_paths, run.seed};
    force = parallel ? noise::generate_colored(req) : noise::generate_colored_serial(req);
  }
  const auto r0 = noise::initial_values(run.n_paths, model.variance, run.seed);
  const PathEnsemble full = parallel ? volterra::integrate_gle_ensemble(kernel, force, r0)
                                     : volterra::integrate_gle_ensemble_serial(kernel, force, r0);

  PathEnsemble out(run.n_paths, run.n_steps, run.h, PathLabel::ReturnRate, run.seed,
                   full.stream());
  for (std::size_t i = 0; i < run.n_paths; ++i) {
    const auto src = full.path(i).subspan(burn, run.n_steps);
    std::copy(src.begin(), src.end(), out.path(i).begin());
  }
  return out;
}

}  // namespace

PathEnsemble gle_returns(const ModelSpec& model, const GleRun& run) {
  return run_gle(model, run, true);
}

PathEnsemble gle_returns_serial(const ModelSpec& model, const GleRun& run) {
  return run_gle(model, run, false);
}

}  // namespace bmkt::simulate
