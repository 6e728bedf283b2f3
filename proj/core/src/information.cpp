#include "swarmcso/information.hpp"

#include <cmath>

#include "swarmcso/errors.hpp"
#include "swarmcso/linalg.hpp"
#include "swarmcso/measurement.hpp"

namespace swarmcso {

double predicted_detection_prob(const EnuVector& rel, double scale) {
  return std::exp(-rel.squared_norm() / scale);
}

SimulatedTrueState sample_simulated_true_state(const TrackEstimate& predicted, Rng& rng) {
  const Mat66 root = psd_sqrt(predicted.p);
  Vec6 eps;
  for (int i = 0; i < 6; ++i) eps(i) = rng.normal();
  return predicted.x + root * eps;
}

Mat66 total_preaction_fim(std::span<const Mat66> per_agent_fims) {
  Mat66 total = Mat66::Zero();
  for (const Mat66& f : per_agent_fims) total += f;
  return total;
}

Mat66 measurement_information(const Vec6& target_state, const EnuVector& sensor_pos,
                              const NoiseModel& noise, double detect_scale) {
  const EnuVector target_pos{target_state(0), target_state(1), target_state(2)};
  const EnuVector rel = target_pos - sensor_pos;
  if (singular_geometry(rel)) return Mat66::Zero();
  const double pi_d = predicted_detection_prob(rel, detect_scale);
  const Mat36 h = jacobian(rel);
  return pi_d * h.transpose() * noise.inverse_variances().asDiagonal() * h;
}

Mat66 peer_information_sum(const FisherView& view, int target,
                           std::span<const std::optional<PeerPrediction>> peer_predictions,
                           const SimulatedTrueState& sim_state, const NoiseModel& noise,
                           double detect_scale, double speed) {
  Mat66 sum = Mat66::Zero();
  for (std::size_t l = 0; l < view.peers.size(); ++l) {
    const auto& snap = view.peers[l];
    if (!snap || !snap->fresh || l >= peer_predictions.size() || !peer_predictions[l]) continue;
    const auto t = static_cast<std::size_t>(target);
    if (t < snap->fims.size() && snap->fims[t]) sum += *snap->fims[t];
    const EnuVector peer_post =
        post_action_position(peer_predictions[l]->base_pos, peer_predictions[l]->action, speed);
    sum += measurement_information(sim_state, peer_post, noise, detect_scale);
  }
  return sum;
}

Mat66 preaction_total(const FisherView& view, int target) {
  const auto t = static_cast<std::size_t>(target);
  Mat66 total = view.own_fims[t].value();
  for (const auto& snap : view.peers) {
    if (snap && t < snap->fims.size() && snap->fims[t]) total += *snap->fims[t];
  }
  return total;
}

Mat66 predicted_postaction_fim(const FisherView& view, int target, const ActionVector& own_action,
                               const EnuVector& own_pos,
                               std::span<const std::optional<PeerPrediction>> peer_predictions,
                               const SimulatedTrueState& sim_state, const NoiseModel& noise,
                               double detect_scale, double speed) {
  const auto t = static_cast<std::size_t>(target);
  Mat66 f = view.own_fims[t].value();
  f += measurement_information(sim_state, post_action_position(own_pos, own_action, speed), noise,
                               detect_scale);
  f += peer_information_sum(view, target, peer_predictions, sim_state, noise, detect_scale, speed);
  return f;
}

double true_loss(std::span<const Mat66> pre_totals, std::span<const Mat66> post_totals) {
  double loss = 0.0;
  for (std::size_t i = 0; i < pre_totals.size(); ++i) {
    loss -= log_det_spd(post_totals[i]) - log_det_spd(pre_totals[i]);
  }
  return loss;
}

double estimated_loss(std::span<const Mat66> preaction_totals,
                      std::span<const Mat66> postaction_totals) {
  return true_loss(preaction_totals, postaction_totals);
}

}  // namespace swarmcso
