#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "swarmcso/information.hpp"

namespace swarmcso {

/// Step sizes and schedule for the per-agent stochastic gradient update.
struct GradientStepConfig {
  double heading_step = 1.0;    // a_k
  double vertical_step = 0.1;   // b_k
  int seesaw_iters = 2;
  double agent_speed = 1.0;
  // Use the determinant-times-trace gradient form instead of the
  // log-determinant trace form. Off by default; kept for comparison.
  bool determinant_form = false;
};

enum class ActionParam { heading, vertical };

/// Everything one agent needs to evaluate and differentiate its estimated loss
/// for one decide call. Peer terms do not depend on the agent's own action, so
/// they are folded into constant_fim once per call.
struct DecisionContext {
  EnuVector own_pos;
  std::vector<int> target_ids;       // targets this agent has a live track for
  std::vector<Mat66> constant_fim;   // own FIM + peer FIMs + peer measurement terms
  std::vector<Mat66> pre_total;      // own FIM + peer FIMs
  std::vector<Vec6> sim_states;      // simulated true state per listed target
  NoiseModel noise;
  double detect_scale = 100.0;
  double speed = 1.0;
};

DecisionContext build_decision_context(
    const FisherView& view, std::span<const std::optional<PeerPrediction>> peer_predictions,
    std::span<const std::optional<SimulatedTrueState>> sim_states, const EnuVector& own_pos,
    const NoiseModel& noise, double detect_scale, double speed);

/// d/dp of the agent's own measurement information term, p = heading or
/// vertical. Assembled from the detection-probability derivative and the
/// Jacobian derivative matrices. Zero at singular geometry.
Mat66 postaction_fim_derivative(const Vec6& target_state, const EnuVector& own_pos,
                                const ActionVector& action, ActionParam p, const NoiseModel& noise,
                                double detect_scale, double speed);

/// Estimated loss of a candidate action against the context's pre-action totals.
double estimated_loss(const DecisionContext& ctx, const ActionVector& action);

/// dL/dp at the given action: -sum_i tr(Fhat_i^-1 dFhat_i/dp)
/// (times |Fhat_i| under the determinant form).
double loss_gradient(const DecisionContext& ctx, const ActionVector& action, ActionParam p,
                     const GradientStepConfig& cfg);

/// One gradient update: heading first at the previous action, then vertical at
/// the new heading. With no live tracks the previous action is kept.
ActionVector decide(const DecisionContext& ctx, const ActionVector& prev,
                    const GradientStepConfig& cfg);

/// Hold prediction for a snapshotted peer: same heading and vertical as last
/// known, advanced one step from its last known position.
std::optional<PeerPrediction> predict_peer_action(const std::optional<PeerSnapshot>& snap);

/// Constant-velocity projection of each live track, one step ahead.
std::vector<std::optional<Vec6>> predict_targets(
    std::span<const std::optional<TrackEstimate>> tracks, const MotionModel& model);

/// Rebuilds a member's context from the current candidate actions of its group.
/// decided[l] tells whether member l has already produced an action this step.
using ContextBuilder = std::function<DecisionContext(
    int member, std::span<const ActionVector> candidates, const std::vector<bool>& decided)>;

/// Per-member improvement rule; the default is decide().
using ImproveFn =
    std::function<ActionVector(int member, const DecisionContext& ctx, const ActionVector& cur)>;

/// Cyclic pass over the group: for a prescribed number of iterations each member
/// in order improves its own action block conditioned on the most recent
/// candidates of the others. Returns the final per-member actions.
std::vector<ActionVector> seesaw_step(int n_members, const ContextBuilder& build_context,
                                      std::span<const ActionVector> initial,
                                      const GradientStepConfig& cfg,
                                      const ImproveFn& improve = {});

}  // namespace swarmcso
