#pragma once

#include "oneshot/augment.hpp"
#include "oneshot/types.hpp"
#include "oneshot/world.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oneshot {

struct LabeledImage {
  RasterImage image;
  int label = 0;  // episode-local class index in [0, way)
  int world_class = 0;
};

struct Episode {
  int way = 0;
  int shot = 0;
  int queries_per_class = 0;
  std::vector<int> classes;  // world class per episode-local label
  std::vector<LabeledImage> supports;
  std::vector<LabeledImage> queries;
};

/// N-way K-shot task: classes sampled without replacement, images drawn as
/// template + Gaussian(s) per pixel.
Episode sample_episode(const GmmWorld& world, int way, int shot, int queries_per_class, Rng& rng);

/// Frozen feature map. The Lipschitz constant is the operator norm for the
/// linear kinds and 1/factor for average pooling.
class Encoder {
 public:
  enum class Kind { identity, fixed_random_linear, avg_pool };

  static Encoder identity();
  static Encoder fixed_random_linear(int in_dim, int out_dim, std::uint64_t seed);
  static Encoder avg_pool(int factor);

  Kind kind() const { return kind_; }
  VectorXd encode(const RasterImage& x) const;
  double lipschitz_constant() const { return lipschitz_; }
  const MatrixXd& weights() const { return weights_; }

 private:
  Encoder() = default;
  Kind kind_ = Kind::identity;
  MatrixXd weights_;  // fixed_random_linear only
  int pool_factor_ = 1;
  double lipschitz_ = 1.0;
};

/// Convex view weights: view 0 gets original_weight, the rest split the
/// remainder equally. extra_views == 0 collapses to {1}.
VectorXd default_view_weights(int extra_views, double original_weight);

void check_weights(const VectorXd& alpha);

/// z_bar = sum_k alpha_k Phi(view_k).
VectorXd aggregate_support(const AugmentedSet& views, const Encoder& enc, const VectorXd& alpha);

/// Per-class mean of aggregated support embeddings, one row per class.
MatrixXd prototypes(const Episode& episode, const std::vector<VectorXd>& aggregated_supports);

enum class Metric { euclidean, cosine };

struct Classification {
  int predicted = 0;
  VectorXd logits;
};

/// Query-side logit averaging: logits_c = sum_k alpha_k kappa(Phi(view_k), p_c)
/// with kappa the negative squared distance (euclidean) or cosine similarity.
/// Ties break toward the smallest class index.
Classification classify_query(const AugmentedSet& query_views, const MatrixXd& protos,
                              const Encoder& enc, const VectorXd& alpha, Metric metric);

/// Feature-averaging route for the euclidean metric: nearest prototype of the
/// alpha-averaged query embedding. Used to cross-check the logit route.
int classify_query_feature_avg(const AugmentedSet& query_views, const MatrixXd& protos,
                               const Encoder& enc, const VectorXd& alpha);

enum class AugMode { none, one_shot_daug, traditional, oracle };

AugMode parse_aug_mode(const std::string& s);
std::string aug_mode_name(AugMode mode);

/// Brightness/contrast jitter used by the traditional baseline.
struct PhotometricJitter {
  double contrast = 0.2;
  double brightness = 0.1;
};

/// Traditional baseline view: shape tweak plus photometric jitter, no
/// generative step.
RasterImage traditional_view(const RasterImage& x, const ShapeTweakRanges& ranges,
                             const PhotometricJitter& jitter, Rng& rng);

struct BenchmarkConfig {
  int way = 5;
  int shot = 1;
  int queries_per_class = 3;
  int episodes = 2000;
  int ka_sup = 2;
  int ka_qry = 2;
  AugMode mode = AugMode::one_shot_daug;
  Metric metric = Metric::euclidean;
  double original_weight = 0.5;
  AugConfig aug;
  PhotometricJitter jitter;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct EpisodeResult {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows true, cols predicted
  std::uint64_t episode_seed = 0;
};

struct BenchmarkSummary {
  double mean_accuracy = 0.0;
  double ci95 = 0.0;
  std::vector<EpisodeResult> per_episode;
};

/// Builds the view stack for one image under the given mode. Oracle views are
/// fresh world samples of the same class; view 0 is always the original.
AugmentedSet make_views(const RasterImage& x, int world_class, int extra_views, AugMode mode,
                        const BenchmarkConfig& cfg, const GmmWorld& world,
                        const VarianceSchedule& schedule, Rng& rng);

/// Episode e uses RNG streams derived from (seed, e); identical configs and
/// seeds give identical summaries regardless of the job count.
BenchmarkSummary run_benchmark(const GmmWorld& world, const VarianceSchedule& schedule,
                               const Encoder& enc, const BenchmarkConfig& cfg);

double summary_mean(const std::vector<EpisodeResult>& results);
double summary_ci95(const std::vector<EpisodeResult>& results);

/// Binary query-prototype reduction of an episode: one pair per (query, class
/// prototype), labeled +1 when the prototype matches the query's class.
struct BinaryPair {
  VectorXd query_feature;
  VectorXd prototype;
  int label = 1;
};

std::vector<BinaryPair> episode_to_pairs(const Episode& episode, const Encoder& enc,
                                         const MatrixXd& protos);

/// Fraction of pairs with y * (beta - ||z - p||^2) <= 0.
double binary_pair_error(const std::vector<BinaryPair>& pairs, double beta);

}  // namespace oneshot
