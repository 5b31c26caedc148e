#include "pplane/neural.hpp"

#include <cmath>
#include <ostream>

#include "pplane/rng.hpp"

namespace pplane {

namespace {

constexpr double kPi = 3.14159265358979323846;

int argmax_row(const Eigen::MatrixXd& scores, Eigen::Index row) {
  int best = 0;
  double best_score = scores(row, 0);
  for (Eigen::Index c = 1; c < scores.cols(); ++c) {
    if (scores(row, c) > best_score) {
      best_score = scores(row, c);
      best = static_cast<int>(c);
    }
  }
  return best;
}

// Row-wise log-sum-exp, numerically stable.
Eigen::VectorXd log_sum_exp_rows(const Eigen::MatrixXd& scores) {
  Eigen::VectorXd max_per_row = scores.rowwise().maxCoeff();
  Eigen::VectorXd lse(scores.rows());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      sum += std::exp(scores(r, c) - max_per_row(r));
    }
    lse(r) = max_per_row(r) + std::log(sum);
  }
  return lse;
}

}  // namespace

std::array<double, kExpandedFeatureCount> expand_features(double x, double y) {
  return {x,
          y,
          x * y,
          std::sin(2.0 * kPi * x),
          std::cos(2.0 * kPi * x),
          x * x,
          std::sin(2.0 * kPi * y),
          std::cos(2.0 * kPi * y),
          y * y,
          std::sin(3.0 * kPi * x),
          std::cos(3.0 * kPi * x),
          x * x * x,
          std::sin(3.0 * kPi * y),
          std::cos(3.0 * kPi * y),
          y * y * y};
}

MlpClassifier::MlpClassifier(std::vector<int> layer_sizes, std::uint64_t seed)
    : layer_sizes_(std::move(layer_sizes)) {
  RandomStream rng(seed);
  const std::size_t layers = layer_sizes_.size() - 1;
  weights_.reserve(layers);
  biases_.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = layer_sizes_[l];
    const int fan_out = layer_sizes_[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-a, a);
      }
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::MatrixXd MlpClassifier::scores(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd h = features;
  const std::size_t layers = weights_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    h = (h * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    if (l + 1 < layers) h = h.array().tanh();
  }
  return h;
}

Eigen::MatrixXd MlpClassifier::probabilities(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd s = scores(features);
  const Eigen::VectorXd lse = log_sum_exp_rows(s);
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      s(r, c) = std::exp(s(r, c) - lse(r));
    }
  }
  return s;
}

int MlpClassifier::predict_point(double x, double y) const {
  Eigen::MatrixXd f(1, input_dim());
  if (expanded_input()) {
    const auto e = expand_features(x, y);
    for (int c = 0; c < kExpandedFeatureCount; ++c) f(0, c) = e[c];
  } else {
    f(0, 0) = x;
    f(0, 1) = y;
  }
  return argmax_row(scores(f), 0) + 1;
}

double MlpClassifier::loss(const Eigen::MatrixXd& features,
                           const std::vector<int>& targets) const {
  const Eigen::MatrixXd s = scores(features);
  const Eigen::VectorXd lse = log_sum_exp_rows(s);
  double total = 0.0;
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    total += lse(r) - s(r, targets[static_cast<std::size_t>(r)]);
  }
  return total / static_cast<double>(s.rows());
}

MlpClassifier::Gradients MlpClassifier::loss_and_gradients(
    const Eigen::MatrixXd& features, const std::vector<int>& targets) const {
  const std::size_t layers = weights_.size();
  const Eigen::Index batch = features.rows();

  // Forward pass, keeping activations per layer.
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(layers + 1);
  activations.push_back(features);
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z =
        (activations.back() * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    if (l + 1 < layers) z = z.array().tanh();
    activations.push_back(std::move(z));
  }

  const Eigen::MatrixXd& logits = activations.back();
  const Eigen::VectorXd lse = log_sum_exp_rows(logits);

  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);

  // Softmax minus one-hot, scaled by 1/batch (mean loss).
  Eigen::MatrixXd delta(batch, logits.cols());
  double total_loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (Eigen::Index r = 0; r < batch; ++r) {
    const int target = targets[static_cast<std::size_t>(r)];
    total_loss += lse(r) - logits(r, target);
    if (argmax_row(logits, r) == target) ++g.correct;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double p = std::exp(logits(r, c) - lse(r));
      delta(r, c) = (p - (c == target ? 1.0 : 0.0)) * inv_batch;
    }
  }
  g.loss = total_loss * inv_batch;

  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta.transpose() * activations[l];
    g.biases[l] = delta.colwise().sum();
    if (l > 0) {
      // Backprop through tanh: activations[l] already holds tanh(z).
      delta = (delta * weights_[l]).cwiseProduct(
          (1.0 - activations[l].array().square()).matrix());
    }
  }
  return g;
}

Eigen::MatrixXd feature_matrix(const std::vector<TrainingPoint>& points,
                               bool feature_expansion) {
  const int dim = feature_expansion ? kExpandedFeatureCount : kRawFeatureCount;
  Eigen::MatrixXd f(static_cast<Eigen::Index>(points.size()), dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (feature_expansion) {
      const auto e = expand_features(points[i].x, points[i].y);
      for (int c = 0; c < kExpandedFeatureCount; ++c) f(static_cast<Eigen::Index>(i), c) = e[c];
    } else {
      f(static_cast<Eigen::Index>(i), 0) = points[i].x;
      f(static_cast<Eigen::Index>(i), 1) = points[i].y;
    }
  }
  return f;
}

Eigen::MatrixXd grid_feature_matrix(int resolution, bool feature_expansion) {
  std::vector<TrainingPoint> centers;
  centers.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      centers.push_back({cell_center(c, resolution), cell_center(r, resolution), 0});
    }
  }
  return feature_matrix(centers, feature_expansion);
}

MlpClassifier train(const std::vector<TrainingPoint>& points, int class_count,
                    const TrainConfig& config, std::uint64_t seed,
                    bool feature_expansion) {
  if (points.empty()) throw InputError("training set is empty");
  if (class_count < 1) throw InputError("class_count must be >= 1");
  if (!(config.learning_rate > 0.0)) throw InputError("learning_rate must be positive");

  std::vector<int> targets(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int id = points[i].net_id;
    if (id < 1 || id > class_count) {
      throw InputError("training label " + std::to_string(id) + " outside 1.." +
                       std::to_string(class_count));
    }
    targets[i] = id - 1;
  }

  const int input_dim = feature_expansion ? kExpandedFeatureCount : kRawFeatureCount;
  MlpClassifier net({input_dim, kHiddenWidth, kHiddenWidth, kHiddenWidth, class_count},
                    seed);
  const Eigen::MatrixXd features = feature_matrix(points, feature_expansion);

  // Adam state per parameter tensor.
  const std::size_t layers = net.weights().size();
  std::vector<Eigen::MatrixXd> m_w(layers), v_w(layers);
  std::vector<Eigen::VectorXd> m_b(layers), v_b(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    m_w[l] = Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols());
    v_w[l] = m_w[l];
    m_b[l] = Eigen::VectorXd::Zero(net.biases()[l].size());
    v_b[l] = m_b[l];
  }

  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double eps = config.adam_epsilon;
  const int sample_count = static_cast<int>(points.size());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto g = net.loss_and_gradients(features, targets);
    if (!std::isfinite(g.loss)) {
      throw TrainingDivergedError("loss became non-finite at epoch " +
                                  std::to_string(epoch));
    }
    if (config.early_stop_on_full_accuracy && g.correct == sample_count) {
      net.epochs_trained = epoch - 1;
      return net;
    }
    const double bc1 = 1.0 - std::pow(b1, epoch);
    const double bc2 = 1.0 - std::pow(b2, epoch);
    const double step = config.learning_rate * std::sqrt(bc2) / bc1;
    for (std::size_t l = 0; l < layers; ++l) {
      m_w[l] = b1 * m_w[l] + (1.0 - b1) * g.weights[l];
      v_w[l] = b2 * v_w[l] + (1.0 - b2) * g.weights[l].cwiseProduct(g.weights[l]);
      net.weights()[l].noalias() -=
          step * m_w[l].cwiseQuotient((v_w[l].cwiseSqrt().array() + eps).matrix());
      m_b[l] = b1 * m_b[l] + (1.0 - b1) * g.biases[l];
      v_b[l] = b2 * v_b[l] + (1.0 - b2) * g.biases[l].cwiseProduct(g.biases[l]);
      net.biases()[l] -=
          step * m_b[l].cwiseQuotient((v_b[l].cwiseSqrt().array() + eps).matrix());
    }
  }
  net.epochs_trained = config.max_epochs;
  return net;
}

Grid predict_grid(const MlpClassifier& classifier, const Eigen::MatrixXd& grid_features,
                  int resolution) {
  Grid grid(resolution, 0);
  const Eigen::MatrixXd s = classifier.scores(grid_features);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    grid.labels[static_cast<std::size_t>(i)] = argmax_row(s, i) + 1;
  }
  return grid;
}

Grid predict_grid(const MlpClassifier& classifier, int resolution) {
  return predict_grid(classifier,
                      grid_feature_matrix(resolution, classifier.expanded_input()),
                      resolution);
}

void dump_parameters(const MlpClassifier& classifier, std::ostream& out) {
  out.precision(17);
  const auto& sizes = classifier.layer_sizes();
  out << "layers";
  for (int s : sizes) out << ' ' << s;
  out << '\n';
  for (std::size_t l = 0; l < classifier.weights().size(); ++l) {
    const auto& w = classifier.weights()[l];
    out << "W" << l << ' ' << w.rows() << 'x' << w.cols() << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        out << w(r, c) << (c + 1 == w.cols() ? '\n' : ' ');
      }
    }
    const auto& b = classifier.biases()[l];
    out << "b" << l << ' ' << b.size() << '\n';
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      out << b(r) << (r + 1 == b.size() ? '\n' : ' ');
    }
  }
}

}  // namespace pplane
