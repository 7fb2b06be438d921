#pragma once

#include "oneshot/rng.hpp"
#include "oneshot/types.hpp"
#include "oneshot/world.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oneshot {

/// Piecewise-linear margin surrogate: 1 for t <= 0, 1 - t/rho on (0, rho),
/// 0 for t >= rho. Dominates the 0-1 loss pointwise.
double ramp_loss(double t, double rho);

/// Finite outcome space of (f, f_A, y) triples with probabilities.
struct SignTable {
  VectorXd f;
  VectorXd f_a;
  VectorXd y;
  VectorXd prob;

  void validate() const;
};

/// Scaled squared-loss risk (1/4) E[(g - y)^2] over a finite table.
double risk_squared(const VectorXd& g, const VectorXd& y, const VectorXd& prob);

/// P(y g <= 0) over a finite table.
double zero_one_risk(const VectorXd& g, const VectorXd& y, const VectorXd& prob);

struct Prop1Result {
  double lhs = 0.0;       // R(ensemble) - R(f)
  double rhs = 0.0;       // accuracy gap + diversity term
  double gap = 0.0;       // |lhs - rhs|
};

/// Risk decomposition of the two-view ensemble (f + f_A)/2: the identity
/// R(ens) - R(f) = (E[fy] - E[f_A y])/4 + (E[f f_A] - 1)/8, evaluated exactly.
Prop1Result verify_prop1(const SignTable& table);

struct Prop1Audit {
  long tables = 0;
  double max_gap = 0.0;
};

/// Every table with support of size <= 4 over the 8 sign triples and
/// probabilities on the grid {1/denominator, ..., 1}.
Prop1Audit verify_prop1_exhaustive(int denominator);
Prop1Audit verify_prop1_random(long tables, Rng& rng);

/// Query-prototype pair in input space: the hypothesis maps input to the
/// prototype's feature space. label is +1 for a matching pair, -1 otherwise.
struct PairwiseInstance {
  VectorXd input;
  VectorXd prototype;
  int label = 1;
};

/// Finite atom distribution; keeps every population quantity exactly
/// computable.
struct PairwiseWorld {
  std::vector<PairwiseInstance> atoms;
  VectorXd prob;

  void validate() const;
};

/// Finite lattice of linear encoders. Entry 0 is the reference encoder.
struct EncoderGrid {
  std::vector<MatrixXd> weights;

  double max_spectral_norm() const;
};

struct MarginConfig {
  double rho = 1.0;
  double beta = 0.0;
  double delta = 0.1;
  int m = 200;

  void validate() const;
};

/// g_theta(x) = beta - ||W input - prototype||^2.
double pairwise_score(const MatrixXd& w, const PairwiseInstance& inst, double beta);

/// Frozen atom world drawn from a GmmWorld: inputs are template + noise,
/// prototypes are reference-encoded template means.
PairwiseWorld make_pairwise_world(const GmmWorld& world, const MatrixXd& ref_encoder, int atoms,
                                  Rng& rng);
PairwiseWorld scale_pairwise_world(const PairwiseWorld& world, double factor);

/// Reference encoder plus lattice perturbations of bounded norm.
EncoderGrid make_encoder_grid(const MatrixXd& ref_encoder, int count, double spread,
                              std::uint64_t seed);

/// Midpoint of the mean within-pair and cross-pair squared distances under the
/// reference encoder.
double calibrate_beta(const PairwiseWorld& world, const MatrixXd& ref_encoder);

/// Monte Carlo empirical Rademacher complexity of the score class:
/// g_values is hypotheses x sample; the estimate averages sup_j of the
/// sign-weighted means over `sign_vectors` draws.
double rademacher_score_mc(const MatrixXd& g_values, int sign_vectors, Rng& rng);

/// Coordinate-sign (vector) complexity of the difference-feature class;
/// omegas[j] holds the m x d difference features of hypothesis j.
double rademacher_vector_mc(const std::vector<MatrixXd>& omegas, int sign_vectors, Rng& rng);

struct BoundAuditResult {
  int trials = 0;
  double holding_fraction = 0.0;
  double mc_sigma = 0.0;        // binomial std error of the fraction
  double mean_rademacher = 0.0; // score-class MC estimate, averaged over trials
  double slack_term = 0.0;      // sqrt(log(1/delta) / (2m))
  bool passed = false;          // holding_fraction >= 1 - delta - 3 sigma
};

/// Theorem-level audit: per trial, draws a fresh size-m sample, computes the
/// exact population risk of every hypothesis, the empirical margin risk, and
/// the MC Rademacher term, and checks the bound simultaneously over the grid.
BoundAuditResult margin_bound_audit(const PairwiseWorld& world, const EncoderGrid& grid,
                                    const MarginConfig& cfg, int trials, int sign_vectors,
                                    std::uint64_t seed, int jobs);

struct RadiusScalingResult {
  double radius_full = 0.0;
  double radius_half = 0.0;
  double score_full = 0.0;
  double score_half = 0.0;
  double score_ratio = 0.0;    // quadratic in the scale: expect ~0.25
  double feature_full = 0.0;
  double feature_half = 0.0;
  double feature_ratio = 0.0;  // linear in the scale: expect ~0.5
};

/// Halves the feature radius by shrinking the world by 0.5 and re-estimates
/// both Rademacher quantities on the same sample indices.
RadiusScalingResult radius_scaling_experiment(const PairwiseWorld& world, const EncoderGrid& grid,
                                              const MarginConfig& cfg, int sign_vectors,
                                              std::uint64_t seed);

/// Score-class MC estimate as a function of the sample size, for the 1/sqrt(m)
/// rate check.
std::vector<std::pair<int, double>> rademacher_vs_m(const PairwiseWorld& world,
                                                    const EncoderGrid& grid,
                                                    const MarginConfig& cfg,
                                                    const std::vector<int>& sample_sizes,
                                                    int sign_vectors, std::uint64_t seed);

enum class Prop3Distribution { standard_normal, uniform, point_mass };

Prop3Distribution parse_prop3_distribution(const std::string& s);

struct Prop3Result {
  int dim = 0;
  int m = 0;
  long trials = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  bool passed = false;  // estimate > 0.5 with one-sided 3 sigma margin
};

/// P(max_i ||(Omega_i^0 + Omega_i^1)/2|| < max_i ||Omega_i^0||) by Monte
/// Carlo; requires m > 1 and a continuous distribution.
Prop3Result verify_prop3(int dim, int m, long trials, Prop3Distribution dist, std::uint64_t seed,
                         int jobs);

/// Generative pairwise sampler over a GmmWorld under a fixed linear encoder.
/// Augmented views are fresh same-class draws, the i.i.d. abstraction used by
/// the radius-reduction statement.
class PairwiseSampler {
 public:
  struct DrawnPair {
    PairwiseInstance inst;
    int query_class = 0;
  };

  PairwiseSampler(const GmmWorld& world, MatrixXd ref_encoder);

  DrawnPair draw(Rng& rng) const;
  VectorXd difference(const PairwiseInstance& inst) const;
  /// Difference feature of a fresh same-class view, drawn directly in feature
  /// space (W eps ~ N(0, s^2 W W^T)).
  VectorXd fresh_difference(const DrawnPair& pair, Rng& rng) const;
  /// Mean difference vector of a fresh (class, partner) context.
  VectorXd draw_mean_difference(Rng& rng) const;
  VectorXd noisy_difference(const VectorXd& mean, Rng& rng) const;
  const MatrixXd& encoder() const { return ref_; }

 private:
  const GmmWorld* world_;
  MatrixXd ref_;
  MatrixXd encoded_templates_;   // class x feature
  MatrixXd feature_noise_chol_;  // s * chol(W W^T)
};

struct BoundComparisonReport {
  int m_base = 0, m_novel = 0, m_tr = 0, m_test = 0;
  double b_x = 0.0, l_enc = 0.0, c_enc = 0.0;
  double train_sample_size = 0.0;
  double train_emp_margin_risk = 0.0;
  double train_complexity_term = 0.0;
  double train_slack_term = 0.0;
  std::string train_discrepancy = "+ disc_G";  // carried symbolically, never estimated
  double r0_base_aug = 0.0;
  double test_emp_margin_risk = 0.0;
  double test_complexity_term = 0.0;
  double test_slack_term = 0.0;
  double r_hat_novel = 0.0;
  double r0_novel = 0.0;
  long radius_resamples = 0;
  double radius_reduction_fraction = 0.0;
  double radius_reduction_std_error = 0.0;
  bool radius_claim_passed = false;  // fraction > 0.5, one-sided 3 sigma
};

/// Appendix-style comparison of the train-time and test-time bound right-hand
/// sides. The train-side transfer discrepancy is reported symbolically only.
BoundComparisonReport bound_comparison_report(const GmmWorld& base_world,
                                              const GmmWorld& novel_world,
                                              const MatrixXd& ref_encoder, const MarginConfig& cfg,
                                              int m_base, int m_novel, int m_tr, int m_test,
                                              std::optional<double> c_enc, long radius_resamples,
                                              std::uint64_t seed, int jobs);

}  // namespace oneshot
