#include "mimres/training/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mimres/network/model.hpp"

namespace mimres {

AdamState::AdamState(std::size_t size, AdamConfig cfg) : config(cfg), m(size, 0.0), v(size, 0.0) {}

namespace {

std::string divergence_message(std::size_t iteration, double loss, double max_g) {
  std::ostringstream s;
  s << "training diverged at iteration " << iteration << ": loss " << loss << ", max |g| " << max_g;
  return s.str();
}

double max_abs(std::span<const double> g) {
  double m = 0.0;
  for (double x : g) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

DivergenceError::DivergenceError(std::size_t iteration, double loss, double max_abs_gradient)
    : std::runtime_error(divergence_message(iteration, loss, max_abs_gradient)),
      iteration_(iteration),
      loss_(loss),
      max_abs_gradient_(max_abs_gradient) {}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient) {
  if (params.size() != gradient.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and state sizes differ");
  }
  const double max_g = max_abs(gradient);
  if (!std::isfinite(max_g)) {
    throw DivergenceError(state.t + 1, std::numeric_limits<double>::quiet_NaN(), max_g);
  }
  const AdamConfig& c = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

void validate(const RunConfig& c) {
  validate_combination(c.method, c.problem, c.variant);
  if (c.dim == 0) throw ConfigError("dim must be positive");
  if (c.depth == 0 || c.width == 0) throw ConfigError("depth and width must be positive");
  if (c.cadence == 0) throw ConfigError("cadence must be positive");
  if (c.batch_interior == 0 || c.batch_boundary == 0 || c.batch_initial == 0) {
    throw ConfigError("batch sizes must be positive");
  }
  if (c.eval_points == 0) throw ConfigError("eval_points must be positive");
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) throw ConfigError("lr must be positive");
  if (c.lambda1 < 0.0 || c.lambda2 < 0.0 || c.lambda3 < 0.0) throw ConfigError("penalty weights must be nonnegative");
  if (c.problem == ProblemKind::KdV && !(c.time_horizon > 0.0)) throw ConfigError("time_horizon must be positive");
  if (c.problem == ProblemKind::MongeAmpere && c.dim > 8) throw ConfigError("monge-ampere supports dim <= 8");
}

ModelConfig model_config(const RunConfig& c) {
  return {c.method, c.problem, c.variant, c.dim, c.depth, c.width, c.activation};
}

TrainResult train(const RunConfig& config, const TrainHooks& hooks) {
  validate(config);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const ProblemSpec problem = make_problem(config.problem, config.dim, config.time_horizon);
  Model model(model_config(config), make_stream(config.seed, StreamPurpose::Init).next());
  const UnknownLayout& layout = model.layout();

  // MIM on the Poisson problem satisfies the Neumann condition exactly.
  const bool multiplier = config.problem == ProblemKind::Poisson && config.method != MethodKind::DGM;
  std::optional<NeumannMultiplierField> wrapped;
  if (multiplier) wrapped.emplace(model.field(), layout.p);
  const Field& field = multiplier ? static_cast<const Field&>(*wrapped) : model.field();

  Sampler sampler(problem.domain(), {config.batch_interior, config.batch_boundary, config.batch_initial, config.seed});
  const EvalSet eval = make_eval_set(problem, config.eval_points, config.seed);
  const PenaltyWeights weights{config.lambda1, config.lambda2, config.lambda3};

  TrainResult result;
  result.warning = derivative_order_warning(config.problem, config.method, config.variant, config.activation);
  AdamState adam(model.params().size(), AdamConfig{config.lr});
  Tape tape;

  for (std::size_t k = 0; k <= config.iters; ++k) {
    tape.clear();
    model.bind(tape);
    const LossBatch batch = draw_batch(problem, sampler);
    const LossRecord loss = build_loss(tape, problem, config.method, field, layout, batch, weights, multiplier);
    result.neumann = loss.neumann;
    const double value = tape.scalar(loss.total);

    if (k % config.cadence == 0 || k == config.iters) {
      MetricsRecord rec{k, value, evaluate_all(problem, field, layout, eval), elapsed()};
      result.records.push_back(rec);
      if (hooks.on_record) hooks.on_record(rec);
    }
    if (!std::isfinite(value)) throw DivergenceError(k, value, std::numeric_limits<double>::quiet_NaN());
    if (k == config.iters) break;

    const Adjoint adj = tape.backward(loss.total);
    const double max_g = max_abs(adj.gradient);
    if (!std::isfinite(max_g)) throw DivergenceError(k, value, max_g);
    adam_step(adam, model.params(), adj.gradient);

    if (config.checkpoint_every > 0 && (k + 1) % config.checkpoint_every == 0 && hooks.on_checkpoint) {
      hooks.on_checkpoint(k + 1, model.params());
    }
  }
  result.params.assign(model.params().begin(), model.params().end());
  result.wall_s = elapsed();
  return result;
}

ErrorSet trailing_mean(std::span<const MetricsRecord> records, std::size_t window) {
  ErrorSet out;
  if (records.empty()) return out;
  const std::size_t last = records.back().iteration;
  std::vector<const MetricsRecord*> chosen;
  for (const MetricsRecord& r : records) {
    if (r.iteration > 0 && r.iteration + window > last) chosen.push_back(&r);
  }
  if (chosen.empty()) chosen.push_back(&records.back());
  auto mean = [&](std::optional<double> ErrorSet::*field) -> std::optional<double> {
    if (!(chosen.front()->errors.*field)) return std::nullopt;
    double s = 0.0;
    for (const MetricsRecord* r : chosen) s += *(r->errors.*field);
    return s / static_cast<double>(chosen.size());
  };
  out.u = mean(&ErrorSet::u);
  out.grad_u = mean(&ErrorSet::grad_u);
  out.lap_u = mean(&ErrorSet::lap_u);
  out.grad_lap_u = mean(&ErrorSet::grad_lap_u);
  out.diag_hess_u = mean(&ErrorSet::diag_hess_u);
  return out;
}

}  // namespace mimres
