#include "swarmcso/decision.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "swarmcso/errors.hpp"
#include "swarmcso/linalg.hpp"
#include "swarmcso/measurement.hpp"

namespace swarmcso {

namespace {

Vec3 own_position_derivative(const ActionVector& action, ActionParam p, double speed) {
  if (p == ActionParam::heading) {
    return Vec3(-speed * std::sin(action.gamma), speed * std::cos(action.gamma), 0.0);
  }
  return Vec3(0.0, 0.0, 1.0);
}

double trace_of_inverse_times(const Mat66& f, const Mat66& d) {
  Eigen::LLT<Mat66> llt(f);
  if (llt.info() != Eigen::Success) {
    throw NonPositiveDefiniteInformation("post-action Fisher total not positive definite");
  }
  return llt.solve(d).trace();
}

}  // namespace

DecisionContext build_decision_context(
    const FisherView& view, std::span<const std::optional<PeerPrediction>> peer_predictions,
    std::span<const std::optional<SimulatedTrueState>> sim_states, const EnuVector& own_pos,
    const NoiseModel& noise, double detect_scale, double speed) {
  DecisionContext ctx;
  ctx.own_pos = own_pos;
  ctx.noise = noise;
  ctx.detect_scale = detect_scale;
  ctx.speed = speed;
  for (std::size_t i = 0; i < view.own_fims.size(); ++i) {
    if (!view.own_fims[i] || i >= sim_states.size() || !sim_states[i]) continue;
    const int target = static_cast<int>(i);
    const Mat66 pre = preaction_total(view, target);
    const Mat66 peer_sum = peer_information_sum(view, target, peer_predictions, *sim_states[i],
                                                noise, detect_scale, speed);
    ctx.target_ids.push_back(target);
    ctx.pre_total.push_back(pre);
    ctx.constant_fim.push_back(*view.own_fims[i] + peer_sum);
    ctx.sim_states.push_back(*sim_states[i]);
  }
  return ctx;
}

Mat66 postaction_fim_derivative(const Vec6& target_state, const EnuVector& own_pos,
                                const ActionVector& action, ActionParam p, const NoiseModel& noise,
                                double detect_scale, double speed) {
  const EnuVector post = post_action_position(own_pos, action, speed);
  const EnuVector target_pos{target_state(0), target_state(1), target_state(2)};
  const EnuVector rel = target_pos - post;
  if (singular_geometry(rel)) return Mat66::Zero();

  const Vec3 drel = -own_position_derivative(action, p, speed);
  const double r = rel.norm();
  const double dr = rel.vec().dot(drel) / r;

  const double pi_d = predicted_detection_prob(rel, detect_scale);
  const double dpi_d = -pi_d * (2.0 * r / detect_scale) * dr;

  const Mat36 h = jacobian(rel);
  const Mat36 dh = jacobian_directional_derivative(rel, drel);
  const Vec3 rinv = noise.inverse_variances();

  const Mat66 m = h.transpose() * rinv.asDiagonal() * h;
  const Mat66 dm =
      dh.transpose() * rinv.asDiagonal() * h + h.transpose() * rinv.asDiagonal() * dh;
  return dpi_d * m + pi_d * dm;
}

double estimated_loss(const DecisionContext& ctx, const ActionVector& action) {
  const EnuVector post = post_action_position(ctx.own_pos, action, ctx.speed);
  double loss = 0.0;
  for (std::size_t i = 0; i < ctx.target_ids.size(); ++i) {
    const Mat66 fhat = ctx.constant_fim[i] + measurement_information(ctx.sim_states[i], post,
                                                                     ctx.noise, ctx.detect_scale);
    loss -= log_det_spd(fhat) - log_det_spd(ctx.pre_total[i]);
  }
  return loss;
}

double loss_gradient(const DecisionContext& ctx, const ActionVector& action, ActionParam p,
                     const GradientStepConfig& cfg) {
  const EnuVector post = post_action_position(ctx.own_pos, action, ctx.speed);
  double grad = 0.0;
  for (std::size_t i = 0; i < ctx.target_ids.size(); ++i) {
    const Mat66 fhat = ctx.constant_fim[i] + measurement_information(ctx.sim_states[i], post,
                                                                     ctx.noise, ctx.detect_scale);
    const Mat66 dfhat = postaction_fim_derivative(ctx.sim_states[i], ctx.own_pos, action, p,
                                                  ctx.noise, ctx.detect_scale, ctx.speed);
    double term = trace_of_inverse_times(fhat, dfhat);
    if (cfg.determinant_form) term *= std::exp(log_det_spd(fhat));
    grad -= term;
  }
  return grad;
}

ActionVector decide(const DecisionContext& ctx, const ActionVector& prev,
                    const GradientStepConfig& cfg) {
  if (ctx.target_ids.empty()) return {wrap_angle(prev.gamma), prev.y_u};
  const double dg = loss_gradient(ctx, prev, ActionParam::heading, cfg);
  const double gamma_new = wrap_angle(prev.gamma - cfg.heading_step * dg);
  // vertical derivative is taken at the already-updated heading
  const double du =
      loss_gradient(ctx, ActionVector{gamma_new, prev.y_u}, ActionParam::vertical, cfg);
  return {gamma_new, prev.y_u - cfg.vertical_step * du};
}

std::optional<PeerPrediction> predict_peer_action(const std::optional<PeerSnapshot>& snap) {
  if (!snap) return std::nullopt;
  return PeerPrediction{snap->pos, snap->last_action};
}

std::vector<std::optional<Vec6>> predict_targets(
    std::span<const std::optional<TrackEstimate>> tracks, const MotionModel& model) {
  std::vector<std::optional<Vec6>> out(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i]) out[i] = predict(*tracks[i], model).x;
  }
  return out;
}

std::vector<ActionVector> seesaw_step(int n_members, const ContextBuilder& build_context,
                                      std::span<const ActionVector> initial,
                                      const GradientStepConfig& cfg, const ImproveFn& improve) {
  std::vector<ActionVector> candidates(initial.begin(), initial.end());
  std::vector<bool> decided(static_cast<std::size_t>(n_members), false);
  const ImproveFn step = improve ? improve
                                 : ImproveFn([&cfg](int, const DecisionContext& ctx,
                                                    const ActionVector& cur) {
                                     return decide(ctx, cur, cfg);
                                   });
  for (int it = 0; it < cfg.seesaw_iters; ++it) {
    for (int j = 0; j < n_members; ++j) {
      const DecisionContext ctx = build_context(j, candidates, decided);
      candidates[static_cast<std::size_t>(j)] =
          step(j, ctx, candidates[static_cast<std::size_t>(j)]);
      decided[static_cast<std::size_t>(j)] = true;
    }
  }
  return candidates;
}

}  // namespace swarmcso
