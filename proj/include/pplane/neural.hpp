#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pplane/geometry.hpp"

namespace pplane {

inline constexpr int kExpandedFeatureCount = 15;
inline constexpr int kRawFeatureCount = 2;
inline constexpr int kHiddenWidth = 50;
inline constexpr int kHiddenLayers = 3;

/// Lift (x, y) to the 15-term feature vector, in order:
/// x, y, x*y, sin(2πx), cos(2πx), x², sin(2πy), cos(2πy), y²,
/// sin(3πx), cos(3πx), x³, sin(3πy), cos(3πy), y³.
std::array<double, kExpandedFeatureCount> expand_features(double x, double y);

struct TrainingPoint {
  double x = 0.0;
  double y = 0.0;
  int net_id = 0;  // 1..m
};

struct TrainConfig {
  double learning_rate = 0.002;
  int max_epochs = 300;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool early_stop_on_full_accuracy = true;
};

/// Fully connected classifier with tanh hidden activations and linear class
/// scores. The production architecture is input -> 50 -> 50 -> 50 -> m;
/// arbitrary layer shapes are supported so gradients can be checked on small
/// networks.
class MlpClassifier {
 public:
  /// Random symmetric init: weights uniform in [-a, a], a = sqrt(6/(fan_in +
  /// fan_out)); biases zero.
  MlpClassifier(std::vector<int> layer_sizes, std::uint64_t seed);

  int input_dim() const { return layer_sizes_.front(); }
  int class_count() const { return layer_sizes_.back(); }
  bool expanded_input() const { return input_dim() == kExpandedFeatureCount; }

  /// Class scores for a batch; rows are samples.
  Eigen::MatrixXd scores(const Eigen::MatrixXd& features) const;

  /// Softmax probabilities for a batch (row-normalized).
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& features) const;

  /// Predicted net id (1-based) for one board point; ties break to the lowest id.
  int predict_point(double x, double y) const;

  /// Mean cross-entropy of the batch against 0-based targets.
  double loss(const Eigen::MatrixXd& features, const std::vector<int>& targets) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double loss = 0.0;
    int correct = 0;  // argmax (lowest-index ties) matches target
  };

  /// Analytic gradients of the mean cross-entropy, plus loss and accuracy of
  /// the same forward pass.
  Gradients loss_and_gradients(const Eigen::MatrixXd& features,
                               const std::vector<int>& targets) const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }

  int epochs_trained = 0;  // filled by train()

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l]: out x in
  std::vector<Eigen::VectorXd> biases_;
};

/// Row-wise feature matrix for a point set; expanded or raw (x, y) input.
Eigen::MatrixXd feature_matrix(const std::vector<TrainingPoint>& points,
                               bool feature_expansion);

/// Feature matrix of all cell centers of a resolution x resolution grid,
/// row-major. Computed once per solve and shared across evaluations.
Eigen::MatrixXd grid_feature_matrix(int resolution, bool feature_expansion);

/// Fit the paper architecture to the labeled points with full-batch Adam.
/// Deterministic per seed. Throws TrainingDivergedError on non-finite loss.
MlpClassifier train(const std::vector<TrainingPoint>& points, int class_count,
                    const TrainConfig& config, std::uint64_t seed,
                    bool feature_expansion = true);

/// Classify every cell center; ties break to the lowest net id.
Grid predict_grid(const MlpClassifier& classifier, int resolution);

/// Same, against a precomputed grid_feature_matrix for the resolution.
Grid predict_grid(const MlpClassifier& classifier, const Eigen::MatrixXd& grid_features,
                  int resolution);

/// Flat text dump of the parameters, for inspection.
void dump_parameters(const MlpClassifier& classifier, std::ostream& out);

}  // namespace pplane
