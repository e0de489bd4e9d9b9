// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/mlpreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "fpgacost/error.hpp"
#include "fpgacost/metrics.hpp"
#include "fpgacost/rng.hpp"

namespace fpgacost {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMat>;
using Weights = Eigen::Map<RowMat>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using Vec = Eigen::Map<Eigen::VectorXd>;

}  // namespace

std::string_view to_string(Target t) {
  switch (t) {
    case Target::BRAM: return "bram";
    case Target::DSP: return "dsp";
    case Target::FF: return "ff";
    case Target::LUT: return "lut";
    case Target::Cycles: return "cycles";
  }
  return "?";
}

Target parse_target(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Target t : kAllTargets) {
    if (n == to_string(t)) return t;
  }
  throw ConfigError("unknown target '" + std::string(name) + "'");
}

double target_value(const Targets& t, Target target) {
  switch (target) {
    case Target::BRAM: return t.bram_pct;
    case Target::DSP: return t.dsp_pct;
    case Target::FF: return t.ff_pct;
    case Target::LUT: return t.lut_pct;
    case Target::Cycles: return t.cycles;
  }
  return 0;
}

ModelShape tuned_shape(Target target, std::size_t board_cardinality) {
  ModelShape s;
  s.board_cardinality = board_cardinality;
  switch (target) {
    case Target::BRAM:
      s.block1 = {32, 16, 32};
      s.block2 = {256, 256, 256, 64, 32, 64, 64};
      break;
    case Target::DSP:
      s.block1 = {64, 32, 32};
      s.block2 = {256, 16, 32, 32, 64};
      break;
    case Target::FF:
      s.block1 = {64, 16, 32};
      s.block2 = {64, 128, 64, 256, 32};
      break;
    case Target::LUT:
      s.block1 = {64, 16, 32, 32};
      s.block2 = {64, 128, 128, 64};
      break;
    case Target::Cycles:
      s.block1 = {32, 16, 64};
      s.block2 = {256, 32, 32, 32, 256, 128, 128, 32, 16, 16, 64};
      break;
  }
  return s;
}

TrainConfig default_train_config(Target target) {
  TrainConfig c;
  switch (target) {
    case Target::BRAM: c.batch_size = 64; c.learning_rate = 1e-4; break;
    case Target::DSP: c.batch_size = 32; c.learning_rate = 1e-4; break;
    case Target::FF: c.batch_size = 64; c.learning_rate = 1e-4; break;
    case Target::LUT: c.batch_size = 32; c.learning_rate = 1e-4; break;
    case Target::Cycles: c.batch_size = 64; c.learning_rate = 1e-3; break;
  }
  return c;
}

ModelInput model_input(const EngineeredFeatures& f) {
  const auto num = numeric_features(f);
  return {std::vector<double>(num.begin(), num.end()), f.board_index, f.strategy_index};
}

MlpRegressor::MlpRegressor(Target target, ModelShape shape, std::uint64_t seed)
    : target_(target), shape_(std::move(shape)) {
  if (shape_.numeric_dim == 0) throw std::invalid_argument("model needs at least one numeric input");
  if (shape_.board_cardinality == 0 || shape_.strategy_cardinality == 0) {
    throw std::invalid_argument("embedding cardinalities must be positive");
  }
  for (std::size_t w : shape_.block1) {
    if (w == 0) throw std::invalid_argument("dense widths must be positive");
  }
  for (std::size_t w : shape_.block2) {
    if (w == 0) throw std::invalid_argument("dense widths must be positive");
  }
  layout();
  feature_mean_.assign(shape_.numeric_dim, 0.0);
  feature_scale_.assign(shape_.numeric_dim, 1.0);

  Rng rng(seed);
  const std::size_t table = (shape_.board_cardinality + shape_.strategy_cardinality) * shape_.embedding_dim;
  for (std::size_t i = 0; i < table; ++i) params_[board_table_ + i] = rng.uniform(-0.05, 0.05);
  auto init = [&](const DenseSlot& s) {
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in));
    for (std::size_t i = 0; i < s.in * s.out; ++i) params_[s.w + i] = rng.uniform(-limit, limit);
  };
  for (const DenseSlot& s : block1_) init(s);
  for (const DenseSlot& s : block2_) init(s);
  init(head_);
}

void MlpRegressor::layout() {
  blocks_.clear();
  block1_.clear();
  block2_.clear();
  std::size_t offset = 0;
  auto add_block = [&](std::string name, std::size_t size) {
    blocks_.push_back({std::move(name), offset, size});
    offset += size;
    return offset - size;
  };
  auto add_dense = [&](const std::string& name, std::size_t in, std::size_t out) {
    DenseSlot s;
    s.in = in;
    s.out = out;
    s.w = add_block(name + ".weight", in * out);
    s.b = add_block(name + ".bias", out);
    return s;
  };

  if (shape_.embedding_dim > 0) {
    board_table_ = add_block("board_embedding", shape_.board_cardinality * shape_.embedding_dim);
    strategy_table_ = add_block("strategy_embedding", shape_.strategy_cardinality * shape_.embedding_dim);
  }
  std::size_t width = shape_.numeric_dim;
  for (std::size_t i = 0; i < shape_.block1.size(); ++i) {
    block1_.push_back(add_dense("block1." + std::to_string(i), width, shape_.block1[i]));
    width = shape_.block1[i];
  }
  width += 2 * shape_.embedding_dim;
  for (std::size_t i = 0; i < shape_.block2.size(); ++i) {
    block2_.push_back(add_dense("block2." + std::to_string(i), width, shape_.block2[i]));
    width = shape_.block2[i];
  }
  head_ = add_dense("head", width, 1);
  params_.assign(offset, 0.0);
}

void MlpRegressor::set_feature_scaler(std::vector<double> mean, std::vector<double> scale) {
  if (mean.size() != shape_.numeric_dim || scale.size() != shape_.numeric_dim) {
    throw std::invalid_argument("feature scaler dimension mismatch");
  }
  for (double s : scale) {
    if (!(s > 0) || !std::isfinite(s)) throw std::invalid_argument("feature scale must be positive");
  }
  feature_mean_ = std::move(mean);
  feature_scale_ = std::move(scale);
}

void MlpRegressor::set_target_scaler(double offset, double scale) {
  if (!(scale > 0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw std::invalid_argument("target scaler must be finite with positive scale");
  }
  target_offset_ = offset;
  target_scale_ = scale;
}

void MlpRegressor::fit_scalers(const Dataset& ds) {
  if (ds.empty()) throw DataError("cannot fit scalers on an empty dataset");
  const std::size_t d = shape_.numeric_dim;
  const double n = static_cast<double>(ds.size());
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  double tmean = 0, tvar = 0;
  for (const TrainingRecord& r : ds.records) {
    const ModelInput x = model_input(r.features);
    if (x.numeric.size() != d) throw DataError("dataset feature width does not match the model");
    for (std::size_t j = 0; j < d; ++j) mean[j] += x.numeric[j];
    tmean += target_value(r.targets, target_);
  }
  for (double& m : mean) m /= n;
  tmean /= n;
  for (const TrainingRecord& r : ds.records) {
    const auto num = numeric_features(r.features);
    for (std::size_t j = 0; j < d; ++j) var[j] += (num[j] - mean[j]) * (num[j] - mean[j]);
    const double t = target_value(r.targets, target_) - tmean;
    tvar += t * t;
  }
  std::vector<double> scale(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  const double tsd = std::sqrt(tvar / n);
  set_feature_scaler(std::move(mean), std::move(scale));
  set_target_scaler(tmean, tsd > 1e-12 ? tsd : 1.0);
}

void MlpRegressor::check_input(const ModelInput& x) const {
  if (x.numeric.size() != shape_.numeric_dim) {
    throw std::invalid_argument("input has " + std::to_string(x.numeric.size()) +
                                " numeric features, model expects " +
                                std::to_string(shape_.numeric_dim));
  }
  if (x.board_index < 0 || static_cast<std::size_t>(x.board_index) >= shape_.board_cardinality) {
    throw std::invalid_argument("board index " + std::to_string(x.board_index) +
                                " outside embedding table of size " +
                                std::to_string(shape_.board_cardinality));
  }
  if (x.strategy_index < 0 ||
      static_cast<std::size_t>(x.strategy_index) >= shape_.strategy_cardinality) {
    throw std::invalid_argument("strategy index " + std::to_string(x.strategy_index) +
                                " outside embedding table of size " +
                                std::to_string(shape_.strategy_cardinality));
  }
}

template <typename Scalar>
Scalar MlpRegressor::forward(const Scalar* p, const ModelInput& x, double* min_preact) const {
  std::vector<Scalar> h(shape_.numeric_dim);
  for (std::size_t j = 0; j < h.size(); ++j) {
    h[j] = (static_cast<Scalar>(x.numeric[j]) - static_cast<Scalar>(feature_mean_[j])) /
           static_cast<Scalar>(feature_scale_[j]);
  }
  auto dense_relu = [&](const DenseSlot& s, const std::vector<Scalar>& in) {
    std::vector<Scalar> out(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      Scalar z = p[s.b + o];
      const Scalar* row = p + s.w + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) z += row[i] * in[i];
      if (min_preact) *min_preact = std::min(*min_preact, static_cast<double>(std::abs(z)));
      out[o] = z > 0 ? z : Scalar(0);
    }
    return out;
  };
  for (const DenseSlot& s : block1_) h = dense_relu(s, h);
  const std::size_t e = shape_.embedding_dim;
  if (e > 0) {
    const Scalar* board = p + board_table_ + static_cast<std::size_t>(x.board_index) * e;
    const Scalar* strat = p + strategy_table_ + static_cast<std::size_t>(x.strategy_index) * e;
    h.insert(h.end(), board, board + e);
    h.insert(h.end(), strat, strat + e);
  }
  for (const DenseSlot& s : block2_) h = dense_relu(s, h);
  Scalar o = p[head_.b];
  for (std::size_t i = 0; i < head_.in; ++i) o += p[head_.w + i] * h[i];
  return static_cast<Scalar>(target_offset_) + static_cast<Scalar>(target_scale_) * o;
}

double MlpRegressor::predict(const ModelInput& x) const {
  check_input(x);
  return forward<double>(params_.data(), x, nullptr);
}

long double MlpRegressor::predict_wide(const ModelInput& x) const {
  check_input(x);
  std::vector<long double> wide(params_.begin(), params_.end());
  return forward<long double>(wide.data(), x, nullptr);
}

long double MlpRegressor::loss_wide(std::span<const long double> params, const ModelInput& x,
                                    double y) const {
  check_input(x);
  if (params.size() != params_.size()) throw std::invalid_argument("parameter vector size mismatch");
  return std::abs(forward<long double>(params.data(), x, nullptr) - static_cast<long double>(y));
}

double MlpRegressor::smoothness_margin(const ModelInput& x, double y) const {
  check_input(x);
  double m = std::numeric_limits<double>::infinity();
  const double yhat = forward<double>(params_.data(), x, &m);
  return std::min(m, std::abs(yhat - y) / target_scale_);
}

// Batched forward/backward over the flat parameter vector.
class MlpTrainer {
 public:
  explicit MlpTrainer(const MlpRegressor& m) : m_(m) {}

  // Forward pass for a batch; caches what backward() needs.
  const Eigen::RowVectorXd& forward(const std::vector<const ModelInput*>& batch) {
    const std::size_t n = batch.size();
    const std::size_t d = m_.shape_.numeric_dim;
    const double* p = m_.params_.data();
    boards_.resize(n);
    strategies_.resize(n);
    Mat a(d, n);
    for (std::size_t c = 0; c < n; ++c) {
      const ModelInput& x = *batch[c];
      for (std::size_t j = 0; j < d; ++j) a(j, c) = (x.numeric[j] - m_.feature_mean_[j]) / m_.feature_scale_[j];
      boards_[c] = static_cast<std::size_t>(x.board_index);
      strategies_[c] = static_cast<std::size_t>(x.strategy_index);
    }
    inputs_.clear();
    pre_.clear();
    auto dense = [&](const MlpRegressor::DenseSlot& s) {
      ConstWeights w(p + s.w, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in));
      ConstVec b(p + s.b, static_cast<Eigen::Index>(s.out));
      Mat z = w * a;
      z.colwise() += b;
      inputs_.push_back(std::move(a));
      a = z.cwiseMax(0.0);
      pre_.push_back(std::move(z));
    };
    for (const auto& s : m_.block1_) dense(s);
    const std::size_t e = m_.shape_.embedding_dim;
    if (e > 0) {
      const auto d1 = a.rows();
      Mat cat(d1 + static_cast<Eigen::Index>(2 * e), static_cast<Eigen::Index>(n));
      cat.topRows(d1) = a;
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t k = 0; k < e; ++k) {
          cat(d1 + static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = p[m_.board_table_ + boards_[c] * e + k];
          cat(d1 + static_cast<Eigen::Index>(e + k), static_cast<Eigen::Index>(c)) =
              p[m_.strategy_table_ + strategies_[c] * e + k];
        }
      }
      a = std::move(cat);
    }
    for (const auto& s : m_.block2_) dense(s);
    head_in_ = std::move(a);
    ConstVec wh(p + m_.head_.w, static_cast<Eigen::Index>(m_.head_.in));
    out_ = (wh.transpose() * head_in_).array() + p[m_.head_.b];
    out_ = (out_.array() * m_.target_scale_ + m_.target_offset_).matrix();
    return out_;
  }

  // Accumulates dL/dparams into grad given dL/dyhat per sample.
  void backward(const Eigen::RowVectorXd& dyhat, std::span<double> grad) {
    const double* p = m_.params_.data();
    double* g = grad.data();
    const Eigen::RowVectorXd dout = dyhat * m_.target_scale_;
    Vec(g + m_.head_.w, static_cast<Eigen::Index>(m_.head_.in)) += head_in_ * dout.transpose();
    g[m_.head_.b] += dout.sum();
    ConstVec wh(p + m_.head_.w, static_cast<Eigen::Index>(m_.head_.in));
    Mat da = wh * dout;

    std::size_t layer = inputs_.size();
    auto dense_back = [&](const MlpRegressor::DenseSlot& s) {
      --layer;
      Mat dz = da.array() * (pre_[layer].array() > 0.0).cast<double>();
      Weights(g + s.w, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in)).noalias() +=
          dz * inputs_[layer].transpose();
      Vec(g + s.b, static_cast<Eigen::Index>(s.out)) += dz.rowwise().sum();
      ConstWeights w(p + s.w, static_cast<Eigen::Index>(s.out), static_cast<Eigen::Index>(s.in));
      da = w.transpose() * dz;
    };
    for (auto it = m_.block2_.rbegin(); it != m_.block2_.rend(); ++it) dense_back(*it);
    const std::size_t e = m_.shape_.embedding_dim;
    if (e > 0) {
      const auto d1 = da.rows() - static_cast<Eigen::Index>(2 * e);
      for (Eigen::Index c = 0; c < da.cols(); ++c) {
        const auto cu = static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < e; ++k) {
          g[m_.board_table_ + boards_[cu] * e + k] += da(d1 + static_cast<Eigen::Index>(k), c);
          g[m_.strategy_table_ + strategies_[cu] * e + k] += da(d1 + static_cast<Eigen::Index>(e + k), c);
        }
      }
      Mat top = da.topRows(d1);
      da = std::move(top);
    }
    for (auto it = m_.block1_.rbegin(); it != m_.block1_.rend(); ++it) dense_back(*it);
  }

 private:
  const MlpRegressor& m_;
  std::vector<std::size_t> boards_, strategies_;
  std::vector<Mat> inputs_, pre_;
  Mat head_in_;
  Eigen::RowVectorXd out_;
};

namespace {

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

double MlpRegressor::loss_and_gradient(const ModelInput& x, double y, std::span<double> grad) const {
  check_input(x);
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  MlpTrainer t(*this);
  const std::vector<const ModelInput*> batch{&x};
  const double yhat = t.forward(batch)(0);
  Eigen::RowVectorXd d(1);
  d(0) = sign(yhat - y);
  t.backward(d, grad);
  return std::abs(yhat - y);
}

std::vector<double> MlpRegressor::predict(const Dataset& ds) const {
  std::vector<ModelInput> inputs;
  inputs.reserve(ds.size());
  for (const TrainingRecord& r : ds.records) {
    inputs.push_back(model_input(r.features));
    check_input(inputs.back());
  }
  std::vector<double> out;
  out.reserve(ds.size());
  MlpTrainer t(*this);
  constexpr std::size_t kChunk = 512;
  for (std::size_t begin = 0; begin < inputs.size(); begin += kChunk) {
    std::vector<const ModelInput*> batch;
    for (std::size_t i = begin; i < std::min(inputs.size(), begin + kChunk); ++i) batch.push_back(&inputs[i]);
    const auto& y = t.forward(batch);
    for (Eigen::Index i = 0; i < y.size(); ++i) out.push_back(y(i));
  }
  return out;
}

MlpRegressor build_model(Target target, std::uint64_t seed, std::size_t board_cardinality) {
  return MlpRegressor(target, tuned_shape(target, board_cardinality), seed);
}

std::pair<MlpRegressor, TrainHistory> train(MlpRegressor model, const Dataset& train_set,
                                            const Dataset& val_set, const TrainConfig& cfg) {
  if (train_set.empty() || val_set.empty()) throw DataError("training needs non-empty train and validation sets");
  if (train_set.schema_version != model.feature_schema_version() ||
      val_set.schema_version != model.feature_schema_version()) {
    throw DataError("dataset feature schema does not match the model");
  }
  if (cfg.batch_size == 0) throw DataError("batch size must be positive");

  const Target target = model.target();
  auto inputs_of = [&](const Dataset& ds) {
    std::vector<ModelInput> xs;
    std::vector<double> ys;
    for (const TrainingRecord& r : ds.records) {
      xs.push_back(model_input(r.features));
      try {
        model.check_input(xs.back());
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string("record incompatible with model: ") + e.what());
      }
      ys.push_back(target_value(r.targets, target));
    }
    return std::pair{std::move(xs), std::move(ys)};
  };
  const auto [train_x, train_y] = inputs_of(train_set);
  const auto [val_x, val_y] = inputs_of(val_set);

  try {
    model.fit_scalers(train_set);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("cannot standardize the training set: ") + e.what());
  }
  const std::size_t np = model.params_.size();
  std::vector<double> grad(np), m1(np, 0.0), m2(np, 0.0);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train_x.size());
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  std::vector<double> best = model.params_;
  double best_loss = std::numeric_limits<double>::infinity();
  const bool val_constant =
      std::all_of(val_y.begin(), val_y.end(), [&](double v) { return v == val_y.front(); });
  std::uint64_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<const ModelInput*> batch;
      Eigen::RowVectorXd y(static_cast<Eigen::Index>(end - begin));
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(&train_x[order[i]]);
        y(static_cast<Eigen::Index>(i - begin)) = train_y[order[i]];
      }
      MlpTrainer t(model);
      const Eigen::RowVectorXd err = t.forward(batch) - y;
      const double batch_loss = err.cwiseAbs().sum();
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss in epoch " + std::to_string(epoch + 1) + " at sample " +
                            std::to_string(begin) + "; try a lower learning rate");
      }
      loss_sum += batch_loss;
      const double inv_n = 1.0 / static_cast<double>(batch.size());
      const Eigen::RowVectorXd dyhat = err.unaryExpr([&](double v) { return sign(v) * inv_n; });
      std::fill(grad.begin(), grad.end(), 0.0);
      t.backward(dyhat, grad);

      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      double* p = model.params_.data();
      for (std::size_t i = 0; i < np; ++i) {
        m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grad[i];
        m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        p[i] -= cfg.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg.epsilon);
      }
    }

    std::vector<double> pred;
    pred.reserve(val_x.size());
    {
      MlpTrainer t(model);
      std::vector<const ModelInput*> batch;
      for (const ModelInput& x : val_x) batch.push_back(&x);
      const auto& yhat = t.forward(batch);
      for (Eigen::Index i = 0; i < yhat.size(); ++i) pred.push_back(yhat(i));
    }
    EpochStats st;
    st.train_loss = loss_sum / static_cast<double>(train_x.size());
    st.val_loss = metrics::mae(val_y, pred);
    st.val_smape = metrics::smape(val_y, pred);
    st.val_r2 = (val_constant || val_y.size() < 2) ? 0.0 : metrics::r2(val_y, pred);
    if (!std::isfinite(st.val_loss) || !std::isfinite(st.val_r2) || !std::isfinite(st.train_loss)) {
      throw TrainingError("non-finite validation metrics after epoch " + std::to_string(epoch + 1));
    }
    history.epochs.push_back(st);
    if (st.val_loss < best_loss) {
      best_loss = st.val_loss;
      best = model.params_;
      history.best_epoch = epoch;
    }
    if (st.val_loss <= cfg.stop_at_val_loss) break;
  }
  if (!history.epochs.empty()) model.params_ = std::move(best);
  return {std::move(model), std::move(history)};
}

GradCheckResult grad_check(const MlpRegressor& model, const ModelInput& x, double y,
                           const GradCheckOptions& opts) {
  const auto params = model.parameters();
  std::vector<double> analytic(params.size());
  model.loss_and_gradient(x, y, analytic);

  std::vector<std::size_t> coords;
  if (!opts.max_coordinates || *opts.max_coordinates >= params.size()) {
    coords.resize(params.size());
    std::iota(coords.begin(), coords.end(), 0);
  } else {
    // Every block gets an equal share; small blocks are checked in full.
    Rng rng(opts.seed);
    const auto& blocks = model.param_blocks();
    const std::size_t share = std::max<std::size_t>(1, *opts.max_coordinates / blocks.size());
    for (const ParamBlock& b : blocks) {
      if (b.size <= share) {
        for (std::size_t i = 0; i < b.size; ++i) coords.push_back(b.offset + i);
      } else {
        for (std::size_t k = 0; k < share; ++k) {
          coords.push_back(b.offset + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(b.size) - 1)));
        }
      }
    }
  }

  std::vector<long double> wide(params.begin(), params.end());
  // Gradients below this are indistinguishable from rounding in the loss.
  const long double floor = 1e-10L * static_cast<long double>(model.target_scale());
  GradCheckResult res;
  for (std::size_t idx : coords) {
    const long double orig = wide[idx];
    const long double hi = orig + opts.h, lo = orig - opts.h;
    wide[idx] = hi;
    const long double lp = model.loss_wide(wide, x, y);
    wide[idx] = lo;
    const long double lm = model.loss_wide(wide, x, y);
    wide[idx] = orig;
    const long double numeric = (lp - lm) / (hi - lo);
    const long double a = analytic[idx];
    const long double denom = std::max({std::abs(a), std::abs(numeric), floor});
    const double rel = static_cast<double>(std::abs(a - numeric) / denom);
    ++res.coordinates_checked;
    if (rel > res.max_relative_error || res.coordinates_checked == 1) {
      res.max_relative_error = rel;
      res.worst_index = idx;
      res.analytic_at_worst = static_cast<double>(a);
      res.numeric_at_worst = static_cast<double>(numeric);
    }
  }
  return res;
}

}  // namespace fpgacost
