#pragma once

#include <optional>
#include <span>
#include <vector>

#include "swarmcso/ekf2.hpp"
#include "swarmcso/rng.hpp"
#include "swarmcso/types.hpp"

namespace swarmcso {

/// One agent's decision block: heading (radians, wrapped) and absolute vertical position.
struct ActionVector {
  double gamma = 0.0;
  double y_u = 0.0;
};

/// Target state with covariance-matched randomness added, used so the estimated
/// loss matches the distribution of the true loss.
using SimulatedTrueState = Vec6;

/// Position after executing an action from pos: one horizontal step of length
/// speed along the heading, vertical set to the chosen y_u.
inline EnuVector post_action_position(const EnuVector& pos, const ActionVector& a, double speed) {
  return {pos.e + speed * std::cos(a.gamma), pos.n + speed * std::sin(a.gamma), a.y_u};
}

/// Detection probability exp(-|rel|^2 / scale).
double predicted_detection_prob(const EnuVector& rel, double scale);

/// Draw x_hat + eps with eps ~ N(0, P) through a matrix square root of P.
SimulatedTrueState sample_simulated_true_state(const TrackEstimate& predicted, Rng& rng);

/// Elementwise sum of per-agent Fisher information matrices.
Mat66 total_preaction_fim(std::span<const Mat66> per_agent_fims);

/// Expected information added by one sensor at sensor_pos measuring a target at
/// target_state: pi_d * H^T R^-1 H. Returns zero at singular geometry (the
/// sensor contributes nothing, consistent with a skipped update).
Mat66 measurement_information(const Vec6& target_state, const EnuVector& sensor_pos,
                              const NoiseModel& noise, double detect_scale);

/// What one agent knows about a peer, refreshed whenever the peer's message gets
/// through: the peer's per-target Fisher matrices, where it was, which way it was
/// heading, and the action it last executed.
struct PeerSnapshot {
  int step = -1;            // step the snapshot was taken at
  bool fresh = false;       // delivered at the most recent communicate phase
  EnuVector pos;
  double gamma = 0.0;
  ActionVector last_action;
  std::vector<std::optional<Mat66>> fims;  // per target; nullopt if the peer has no track
};

/// Per-agent view used in the decide step: own pre-action Fisher matrices plus
/// the latest peer snapshots (stale if contact was lost). Indexed by target and
/// by peer agent id.
struct FisherView {
  std::vector<std::optional<Mat66>> own_fims;
  std::vector<std::optional<PeerSnapshot>> peers;
};

/// A peer's assumed behavior this step: where it starts and the action it will
/// take. Its post-action position is post_action_position(base_pos, action, speed).
struct PeerPrediction {
  EnuVector base_pos;
  ActionVector action;
};

/// Sum of the peer terms of the predicted post-action Fisher for one target.
/// Only peers whose message got through at the current communicate phase
/// (snapshot fresh, the communication indicator) count: each contributes its
/// communicated FIM (zero if it has none for this target) plus its predicted
/// measurement information. A peer out of contact drops out entirely, which is
/// what pulls a strayed agent back toward the targets on its own information.
Mat66 peer_information_sum(const FisherView& view, int target,
                           std::span<const std::optional<PeerPrediction>> peer_predictions,
                           const SimulatedTrueState& sim_state, const NoiseModel& noise,
                           double detect_scale, double speed);

/// Pre-action total for one target as this agent can know it: own FIM plus the
/// last communicated FIM of every snapshotted peer, stale or not.
Mat66 preaction_total(const FisherView& view, int target);

/// Predicted post-action total Fisher for one target given this agent's own
/// candidate action and the peers' predicted actions.
Mat66 predicted_postaction_fim(const FisherView& view, int target, const ActionVector& own_action,
                               const EnuVector& own_pos,
                               std::span<const std::optional<PeerPrediction>> peer_predictions,
                               const SimulatedTrueState& sim_state, const NoiseModel& noise,
                               double detect_scale, double speed);

/// -sum_i (log|post_i| - log|pre_i|). Throws NonPositiveDefiniteInformation.
double true_loss(std::span<const Mat66> pre_totals, std::span<const Mat66> post_totals);

/// Same form evaluated on predicted post-action totals.
double estimated_loss(std::span<const Mat66> preaction_totals,
                      std::span<const Mat66> postaction_totals);

}  // namespace swarmcso
