#include "cellfree/env.hpp"

#include <ostream>

#include "cellfree/errors.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

namespace {
constexpr std::uint64_t kBlockStreamBase = 0x626c6f636bULL;  // "block"
}

UplinkEnv::UplinkEnv(Scenario scenario, Options options)
    : scenario_(std::move(scenario)), options_(options) {
  const ScenarioConfig& c = scenario_.config;
  pilots_ = build_pilots(c.K, c.K, c.pilot_power_normalized());  // tau_p = K
  sic_.p.assign(c.K, c.data_power_normalized());
  sic_.sensitivity = c.sic_sensitivity_linear();
  sample_block_(0);
}

void UplinkEnv::sample_block_(std::uint64_t block_id) {
  Rng rng = Rng::stream(scenario_.config.seed, kBlockStreamBase + block_id);
  channel_.block_id = block_id;
  channel_.fading = sample_fading_block(scenario_, rng);
  channel_.est = estimate_gains(channel_.fading, pilots_, scenario_.config.gamma_shape(),
                                scenario_.config.gamma_rate(), rng);
  // The receiver picks the decode order from the powers it can measure:
  // the estimate-scaled effective gains.
  Mat d_est(scenario_.config.M, scenario_.config.K);
  const double tau_p = pilots_.config.tau_p;
  for (int m = 0; m < scenario_.config.M; ++m) {
    for (int k = 0; k < scenario_.config.K; ++k) {
      const double e2 = channel_.est.E(m, k) * channel_.est.E(m, k);
      d_est(m, k) = tau_p * pilots_.config.rho[k] * sic_.p[k] * e2 * channel_.est.Ghat2(m, k);
    }
  }
  const std::vector<int> order = sic_order(d_est);
  channel_.lp = build_link_powers(channel_.fading, channel_.est, pilots_, sic_, &order);
}

EnvState UplinkEnv::reset() {
  const std::uint64_t block_id =
      options_.csi == CsiMode::kFixedBlock ? 0 : episodes_started_;
  ++episodes_started_;
  if (block_id != channel_.block_id) sample_block_(block_id);

  Mat ones(M(), K(), 1.0);
  return EnvState{compute_sinr(ones, channel_.lp), channel_.block_id};
}

std::vector<double> UplinkEnv::gamma_of(const Mat& W) const {
  return compute_sinr(W, channel_.lp);
}

LinkPowers UplinkEnv::estimated_link_powers() const {
  FadingBlock est_block;
  est_block.F = channel_.fading.F;
  est_block.H2 = channel_.est.Ghat2;  // unused by the power terms
  est_block.G2 = channel_.est.Ghat2;
  return build_link_powers(est_block, channel_.est, pilots_, sic_);
}

bool UplinkEnv::feasible_of(const Mat& W) const {
  return check_sic_constraints(W, channel_.lp, sic_.sensitivity).feasible();
}

double UplinkEnv::reward_of(const Mat& W) const {
  if (!feasible_of(W)) return -options_.lambda_penalty;
  return sum_rate(compute_sinr(W, channel_.lp));
}

UplinkEnv::StepResult UplinkEnv::step(const Mat& W) {
  if (W.rows != M() || W.cols != K()) throw DimensionError("env step: W shape mismatch");
  for (double w : W.a) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ContractError("env step: action entry outside [0, 1]");
    }
  }

  StepResult out;
  out.state.block_id = channel_.block_id;
  out.state.gamma = compute_sinr(W, channel_.lp);
  out.rate = sum_rate(out.state.gamma);
  out.feasible = check_sic_constraints(W, channel_.lp, sic_.sensitivity).feasible();
  out.reward = out.feasible ? out.rate : -options_.lambda_penalty;

  if (trace_ != nullptr) {
    *trace_ << step_index_ << ',' << out.reward;
    for (double g : out.state.gamma) *trace_ << ',' << g;
    *trace_ << ',' << (out.feasible ? 1 : 0) << '\n';
  }
  ++step_index_;
  return out;
}

void UplinkEnv::set_trace(std::ostream* trace) {
  trace_ = trace;
  if (trace_ != nullptr) {
    *trace_ << "step,reward";
    for (int k = 1; k <= K(); ++k) *trace_ << ",gamma_" << k;
    *trace_ << ",feasible\n";
  }
}

}  // namespace cellfree
