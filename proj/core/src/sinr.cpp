#include "cellfree/sinr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cellfree/errors.hpp"

namespace cellfree {

LinkPowers build_link_powers(const FadingBlock& block, const EstimationResult& est,
                             const PilotPlan& pilots, const SicConfig& sic,
                             const std::vector<int>* order_override) {
  const int M = block.G2.rows, K = block.G2.cols;
  if (static_cast<int>(sic.p.size()) != K) throw DimensionError("build_link_powers: p length != K");

  const double tau_p = pilots.config.tau_p;
  const std::vector<double>& rho = pilots.config.rho;
  const Mat X = pilots.matrix.cross_gram();
  const Mat& G2 = block.G2;
  const Mat& E = est.E;

  LinkPowers lp;
  lp.M = M;
  lp.K = K;
  lp.D = Mat(M, K);
  lp.contamV = Mat(M, K);
  lp.contamU = Mat(M, K);
  lp.gbar = Mat(M, K);
  lp.noise_coef.assign(M, 0.0);

  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double e2 = E(m, k) * E(m, k);
      lp.D(m, k) = tau_p * rho[k] * sic.p[k] * e2 * G2(m, k);
      lp.gbar(m, k) = sic.p[k] * G2(m, k);
    }
  }

  // T[q] = p_q E_mq^2 * tau_p * sum_{u != q} rho_u |phi_q^H phi_u|^2 |g_mu|^2
  std::vector<double> T(K);
  for (int m = 0; m < M; ++m) {
    double noise = 1.0;
    double t_total = 0.0;
    for (int q = 0; q < K; ++q) {
      double cross = 0.0;
      for (int u = 0; u < K; ++u) {
        if (u == q) continue;
        cross += rho[u] * X(q, u) * G2(m, u);
      }
      const double e2 = E(m, q) * E(m, q);
      T[q] = sic.p[q] * e2 * tau_p * cross;
      t_total += T[q];
      noise += sic.p[q] * e2 * X(q, q);
    }
    lp.noise_coef[m] = noise;
    for (int k = 0; k < K; ++k) {
      lp.contamV(m, k) = T[k];              // v-sum: k's own symbol over alien pilots
      lp.contamU(m, k) = t_total - T[k];    // q != k double sum
    }
  }

  lp.sic_order = order_override != nullptr ? *order_override : sic_order(lp.D);
  return lp;
}

std::vector<int> sic_order(const Mat& effective_gains) {
  const int K = effective_gains.cols;
  std::vector<double> colsum(K, 0.0);
  for (int m = 0; m < effective_gains.rows; ++m) {
    for (int k = 0; k < K; ++k) colsum[k] += effective_gains(m, k);
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&colsum](int a, int b) { return colsum[a] < colsum[b]; });
  return order;
}

std::vector<double> compute_sinr(const Mat& W, const LinkPowers& lp, InterferenceMode mode) {
  const int M = lp.M, K = lp.K;
  if (W.rows != M || W.cols != K) throw DimensionError("compute_sinr: W shape mismatch");
  for (double w : W.a) {
    if (!std::isfinite(w)) throw NumericalError("compute_sinr: non-finite weight");
  }
  for (double d : lp.D.a) {
    if (!std::isfinite(d)) throw NumericalError("compute_sinr: non-finite gain input");
  }

  // Suffix sums of D over the SIC order: suffix[m][i] = sum_{j >= i} D[m][order[j]].
  Mat suffix(M, K + 1);
  for (int m = 0; m < M; ++m) {
    for (int i = K - 1; i >= 0; --i) {
      suffix(m, i) = suffix(m, i + 1) + lp.D(m, lp.sic_order[i]);
    }
  }

  std::vector<double> gamma(K, 0.0);
  for (int i = 0; i < K; ++i) {
    const int k = lp.sic_order[i];
    double signal = 0.0, interference = 0.0, noise = 0.0;
    for (int m = 0; m < M; ++m) {
      const double w2 = W(m, k) * W(m, k);
      if (w2 == 0.0) continue;
      const double inter_ue = (mode == InterferenceMode::kSicOrdered)
                                  ? suffix(m, i + 1)
                                  : suffix(m, 0) - lp.D(m, k);
      signal += w2 * lp.D(m, k);
      interference += w2 * (inter_ue + lp.contamV(m, k) + lp.contamU(m, k));
      noise += w2 * lp.noise_coef[m];
    }
    gamma[k] = (noise > 0.0) ? signal / (interference + noise) : 0.0;
  }
  return gamma;
}

double sum_rate(const std::vector<double>& gamma) {
  double rate = 0.0;
  for (double g : gamma) rate += std::log2(1.0 + g);
  return rate;
}

SicCheck check_sic_constraints(const Mat& W, const LinkPowers& lp, double sensitivity,
                               double relative_headroom) {
  const int M = lp.M, K = lp.K;
  if (W.rows != M || W.cols != K) throw DimensionError("check_sic_constraints: W shape mismatch");

  // Ordered squared weights and their prefix sums per eAP.
  Mat w2(M, K);
  Mat prefix(M, K + 1);
  for (int m = 0; m < M; ++m) {
    for (int i = 0; i < K; ++i) {
      const double w = W(m, lp.sic_order[i]);
      w2(m, i) = w * w;
      prefix(m, i + 1) = prefix(m, i) + w2(m, i);
    }
  }

  SicCheck check;
  for (int l = 1; l < K; ++l) {          // ordered position, paper's l = 2..K
    for (int d = 0; d < l; ++d) {        // ordered position, paper's delta = 1..l-1
      ++check.conditions_checked;
      double lhs = 0.0;
      double positive = 0.0;
      const int ue_l = lp.sic_order[l];
      for (int m = 0; m < M; ++m) {
        const double later = prefix(m, l + 1) - prefix(m, d + 1);  // i in [d+1, l]
        const double g = lp.gbar(m, ue_l);
        lhs += (w2(m, d) - later) * g;
        positive += w2(m, d) * g;
      }
      const double need = sensitivity + relative_headroom * positive;
      if (lhs < need) {
        check.violations.push_back({l + 1, d + 1, lhs - need});
      }
    }
  }
  return check;
}

}  // namespace cellfree
