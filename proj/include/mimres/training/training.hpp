#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimres/kinds.hpp"
#include "mimres/losses/losses.hpp"
#include "mimres/metrics/metrics.hpp"

namespace mimres {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  AdamState(std::size_t size, AdamConfig config = {});
};

/// Raised on a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, double loss, double max_abs_gradient);

  std::size_t iteration() const { return iteration_; }
  double loss() const { return loss_; }
  double max_abs_gradient() const { return max_abs_gradient_; }

 private:
  std::size_t iteration_;
  double loss_;
  double max_abs_gradient_;
};

/// One bias-corrected Adam update. Throws DivergenceError (iteration = the
/// step about to be taken, loss NaN) if the gradient has a non-finite entry.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient);

struct RunConfig {
  ProblemKind problem = ProblemKind::Poisson;
  MethodKind method = MethodKind::MIM1;
  VariantKind variant = VariantKind::All;
  std::size_t dim = 2;
  double time_horizon = 1.0;
  std::size_t depth = 2;
  std::size_t width = 10;
  ActivationKind activation = ActivationKind::Square;
  std::size_t iters = 20000;
  double lr = 1e-3;
  std::size_t batch_interior = 1024;
  std::size_t batch_boundary = 256;
  std::size_t batch_initial = 256;
  std::size_t eval_points = kDefaultEvalPoints;
  std::size_t cadence = 100;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t checkpoint_every = 0;
  std::size_t window = 1000;
  /// Fill the wall_s column of metrics.csv. Off by default so that reruns
  /// produce identical files.
  bool wall_time = false;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on inconsistent settings.
void validate(const RunConfig& config);

ModelConfig model_config(const RunConfig& config);

struct MetricsRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  ErrorSet errors;
  double wall_s = 0.0;
};

struct TrainHooks {
  std::function<void(const MetricsRecord&)> on_record;
  std::function<void(std::size_t iteration, std::span<const double> params)> on_checkpoint;
};

struct TrainResult {
  std::vector<MetricsRecord> records;
  std::vector<double> params;
  NeumannForm neumann = NeumannForm::None;
  std::optional<std::string> warning;
  double wall_s = 0.0;
};

/// Records at iterations 0, cadence, 2 cadence, ... and at `iters`; the loss
/// logged at iteration k is computed before the k-th update. On divergence
/// the records so far have already gone through on_record.
TrainResult train(const RunConfig& config, const TrainHooks& hooks = {});

/// Mean of each error over records with iteration > last - window (all
/// records past iteration 0 when the window covers the run; the final
/// record alone if nothing else qualifies).
ErrorSet trailing_mean(std::span<const MetricsRecord> records, std::size_t window);

}  // namespace mimres
