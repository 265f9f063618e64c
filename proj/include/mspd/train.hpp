/*
 * Copyright 2026 the mspd authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MSPD_TRAIN_HPP
#define MSPD_TRAIN_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mspd/adam.hpp"
#include "mspd/model.hpp"

namespace mspd {

template <class T>
struct TrainSample {
  std::array<Tensor<T>, kNumAngles> inputs;
  Tensor<T> truth;  // packed like forward_packed's output
};

template <class T>
Tensor<T> pack_cube(const ImageCube& cube, const NetworkConfig& cfg) {
  require(static_cast<int>(cube.num_wavelengths()) == cfg.num_wavelengths, "pack: cube has ",
          cube.num_wavelengths(), " wavelengths, config expects ", cfg.num_wavelengths);
  std::vector<T> data(cube.values().begin(), cube.values().end());
  const std::int64_t c4 = 4 * cfg.num_wavelengths;
  Shape shape = cfg.conv_mode == ConvMode::Conv3D
                    ? Shape{1, 1, c4, cube.height(), cube.width()}
                    : Shape{1, c4, cube.height(), cube.width()};
  return Tensor<T>::from(std::move(shape), std::move(data));
}

template <class T>
TrainSample<T> prepare_sample(const MosaicImage& y, const ImageCube& truth,
                              const MspdNet<T>& net) {
  require(y.height() == truth.height() && y.width() == truth.width(),
          "train: mosaic ", y.height(), "x", y.width(), " does not match ground truth ",
          truth.height(), "x", truth.width());
  return {net.make_inputs(y), pack_cube<T>(truth, net.config())};
}

struct TrainOptions {
  int epochs = 50;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
};

struct TrainingLog {
  std::vector<EpochStats> epochs;

  void to_csv(std::ostream& os) const {
    os << "epoch,train_loss,val_loss,wall_time\n";
    char buf[128];
    for (const auto& e : epochs) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.3f\n", e.epoch, e.train_loss, e.val_loss,
                    e.wall_seconds);
      os << buf;
    }
  }

  void save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("train: cannot open ", path, " for writing");
    to_csv(os);
  }

  // the deterministic part of the log (everything but wall time)
  std::string loss_stream() const {
    std::string out;
    char buf[96];
    for (const auto& e : epochs) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_loss);
      out += buf;
    }
    return out;
  }
};

// Batch-size-1 optimization of the network's loss over the training set.
// Deterministic for a fixed options.seed. Throws on divergence, naming the
// offending global step.
template <class T>
TrainingLog train(MspdNet<T>& net, const std::vector<TrainSample<T>>& train_set,
                  const std::vector<TrainSample<T>>& val_set, const TrainOptions& opt) {
  require(!train_set.empty(), "train: empty training set");
  require(opt.epochs >= 0, "train: negative epoch count");

  auto named = net.named_parameters();
  std::vector<Tensor<T>> params;
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  for (auto& nt : named) {
    params.push_back(nt.tensor);
    names.push_back(nt.name);
    sizes.push_back(static_cast<std::size_t>(nt.tensor.numel()));
  }
  auto state = AdamState<T>::init(sizes, static_cast<T>(opt.learning_rate),
                                  static_cast<T>(opt.beta1), static_cast<T>(opt.beta2),
                                  static_cast<T>(opt.epsilon));

  const double lambda = net.config().gradient_loss_weight;
  Rng rng(opt.seed);
  TrainingLog log;
  std::int64_t global_step = 0;

  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    if (opt.shuffle) {
      Rng r = rng.fork(static_cast<std::uint64_t>(epoch));
      r.shuffle(order);
    }

    double train_loss_sum = 0.0;
    for (std::size_t idx : order) {
      ++global_step;
      const auto& sample = train_set[idx];
      for (auto& p : params) p.zero_grad();
      auto pred = net.forward_packed(sample.inputs);
      auto loss = loss_graph(pred, sample.truth, lambda);
      const double lv = static_cast<double>(loss.value());
      if (!std::isfinite(lv))
        fail("train: loss diverged (", lv, ") at step ", global_step, " (epoch ", epoch, ")");
      train_loss_sum += lv;
      backward(loss);
      adam_step(params, state, &names);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_loss_sum / static_cast<double>(train_set.size());
    if (!val_set.empty()) {
      NoGradGuard ng;
      double val_sum = 0.0;
      for (const auto& sample : val_set) {
        auto pred = net.forward_packed(sample.inputs);
        val_sum += static_cast<double>(loss_graph(pred, sample.truth, lambda).value());
      }
      stats.val_loss = val_sum / static_cast<double>(val_set.size());
    }
    stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(stats);
    if (opt.verbose)
      std::fprintf(stderr, "epoch %d: train %.6g val %.6g (%.2fs)\n", epoch, stats.train_loss,
                   stats.val_loss, stats.wall_seconds);
  }
  return log;
}

}  // namespace mspd

#endif  // MSPD_TRAIN_HPP
