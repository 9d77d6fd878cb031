// Copyright 2026 The Looplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "looplab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "looplab/common.hpp"
#include "looplab/kernels.hpp"

namespace looplab::learners {

namespace {

constexpr double kFeatureScale = 1.0 / 16.0;

void scale_features(std::span<const double> raw, std::span<double> out) {
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] * kFeatureScale;
}

}  // namespace

SoftmaxModel SoftmaxModel::zeros(int class_count, std::size_t feature_count) {
  SoftmaxModel model;
  model.class_count = class_count;
  model.feature_count = feature_count;
  model.weights.assign(static_cast<std::size_t>(class_count) * feature_count,
                       0.0);
  model.biases.assign(static_cast<std::size_t>(class_count), 0.0);
  return model;
}

std::span<const double> SoftmaxModel::row(int c) const {
  return {weights.data() + static_cast<std::size_t>(c) * feature_count,
          feature_count};
}

std::span<double> SoftmaxModel::row(int c) {
  return {weights.data() + static_cast<std::size_t>(c) * feature_count,
          feature_count};
}

std::vector<double> class_scores(const SoftmaxModel& model,
                                 std::span<const double> features) {
  if (features.size() != model.feature_count)
    throw ContractViolation("class_scores: wrong feature count");
  std::vector<double> scaled(features.size());
  scale_features(features, scaled);
  std::vector<double> scores(static_cast<std::size_t>(model.class_count));
  for (int c = 0; c < model.class_count; ++c) {
    scores[static_cast<std::size_t>(c)] =
        kernels::dot(model.row(c), scaled) +
        model.biases[static_cast<std::size_t>(c)];
  }
  return scores;
}

std::vector<double> class_probabilities(const SoftmaxModel& model,
                                        std::span<const double> features) {
  std::vector<double> scores = class_scores(model, features);
  const double max_score = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - max_score);
    total += s;
  }
  for (auto& s : scores) s /= total;
  return scores;
}

double cross_entropy_loss_and_gradient(const SoftmaxModel& model,
                                       std::span<const double> features,
                                       int label,
                                       std::span<double> grad_weights,
                                       std::span<double> grad_biases) {
  if (label < 0 || label >= model.class_count)
    throw ContractViolation("cross_entropy: label out of range");
  if (grad_weights.size() != model.weights.size() ||
      grad_biases.size() != model.biases.size())
    throw ContractViolation("cross_entropy: gradient buffer size mismatch");

  std::vector<double> scaled(features.size());
  scale_features(features, scaled);
  const std::vector<double> probs = class_probabilities(model, features);
  for (int c = 0; c < model.class_count; ++c) {
    const double delta =
        probs[static_cast<std::size_t>(c)] - (c == label ? 1.0 : 0.0);
    grad_biases[static_cast<std::size_t>(c)] = delta;
    auto row = grad_weights.subspan(
        static_cast<std::size_t>(c) * model.feature_count,
        model.feature_count);
    for (std::size_t d = 0; d < model.feature_count; ++d)
      row[d] = delta * scaled[d];
  }
  return -std::log(probs[static_cast<std::size_t>(label)]);
}

SoftmaxModel sgd_train(SoftmaxModel model, const data::VectorDataset& dataset,
                       int epochs, double learning_rate, Rng& rng) {
  if (!(learning_rate > 0.0))
    throw ContractViolation("sgd_train: learning_rate must be positive");
  if (dataset.empty())
    throw ContractViolation("sgd_train: dataset must be non-empty");

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> scaled(model.feature_count);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      const auto& sample = dataset.samples[idx];
      scale_features(sample.features, scaled);
      const std::vector<double> probs =
          class_probabilities(model, sample.features);
      const double loss =
          -std::log(probs[static_cast<std::size_t>(sample.label)]);
      if (!std::isfinite(loss))
        throw TrainingFailure("sgd_train: non-finite loss (learning rate "
                              "likely diverged)");
      for (int c = 0; c < model.class_count; ++c) {
        const double delta = probs[static_cast<std::size_t>(c)] -
                             (c == sample.label ? 1.0 : 0.0);
        kernels::axpy(-learning_rate * delta, scaled, model.row(c));
        model.biases[static_cast<std::size_t>(c)] -= learning_rate * delta;
      }
    }
  }
  return model;
}

int sgd_predict(const SoftmaxModel& model, std::span<const double> features) {
  const std::vector<double> scores = class_scores(model, features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<int>(best);
}

int knn_label(const data::VectorDataset& train,
              std::span<const double> features, std::size_t k) {
  if (train.size() < k)
    throw ContractViolation("knn_label: training set smaller than k");
  if (k == 0) throw ContractViolation("knn_label: k must be >= 1");

  std::vector<std::pair<double, std::size_t>> distances;
  distances.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    distances.emplace_back(
        kernels::squared_distance(train.samples[i].features, features), i);
  }
  std::partial_sort(distances.begin(), distances.begin() + k, distances.end());

  std::vector<std::size_t> votes(static_cast<std::size_t>(train.class_count),
                                 0);
  for (std::size_t i = 0; i < k; ++i) {
    ++votes[static_cast<std::size_t>(
        train.samples[distances[i].second].label)];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return static_cast<int>(best);
}

Population Population::cloned_from(const SoftmaxModel& model) {
  Population population;
  for (auto& member : population.members) member = model;
  population.fitness.fill(0.0);
  return population;
}

namespace {

double population_accuracy(const SoftmaxModel& model,
                           const data::VectorDataset& eval_set) {
  std::size_t hits = 0;
  for (const auto& sample : eval_set.samples) {
    if (sgd_predict(model, sample.features) == sample.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(eval_set.size());
}

}  // namespace

std::size_t champion_index(const Population& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < Population::kSize; ++i) {
    if (population.fitness[i] > population.fitness[best]) best = i;
  }
  return best;
}

Population ea_step(Population population,
                   const data::VectorDataset& train_pool,
                   const data::VectorDataset& eval_set, const EaParams& params,
                   Rng& rng) {
  if (train_pool.empty() || eval_set.empty())
    throw ContractViolation("ea_step: datasets must be non-empty");

  for (std::size_t i = 0; i < Population::kSize; ++i) {
    population.fitness[i] =
        population_accuracy(population.members[i], eval_set);
  }
  // Rank by fitness, ties toward the lower index so reruns are stable.
  std::array<std::size_t, Population::kSize> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return population.fitness[a] > population.fitness[b];
                   });

  Population next;
  next.members[0] = population.members[order[0]];
  next.members[1] = population.members[order[1]];
  next.fitness[0] = population.fitness[order[0]];
  next.fitness[1] = population.fitness[order[1]];

  const SoftmaxModel& parent_a = next.members[0];
  const SoftmaxModel& parent_b = next.members[1];
  for (std::size_t child_slot = Population::kParents;
       child_slot < Population::kSize; ++child_slot) {
    SoftmaxModel child = parent_a;
    for (std::size_t w = 0; w < child.weights.size(); ++w) {
      if (rng.uniform() < 0.5) child.weights[w] = parent_b.weights[w];
      child.weights[w] += rng.gaussian(0.0, params.mutation_std);
    }
    for (std::size_t b = 0; b < child.biases.size(); ++b) {
      if (rng.uniform() < 0.5) child.biases[b] = parent_b.biases[b];
      child.biases[b] += rng.gaussian(0.0, params.mutation_std);
    }
    child = sgd_train(std::move(child), train_pool, 1, params.learning_rate,
                      rng);
    next.members[child_slot] = std::move(child);
  }
  for (std::size_t i = 0; i < Population::kSize; ++i) {
    next.fitness[i] = population_accuracy(next.members[i], eval_set);
  }
  return next;
}

std::uint64_t MarkovSummarizer::total_count() const {
  std::uint64_t total = 0;
  for (const auto& [context, nexts] : transitions) {
    for (const auto& [token, count] : nexts) total += count;
  }
  return total;
}

metrics::TokenSeq summarize(const MarkovSummarizer& model,
                            const metrics::TokenSeq& article,
                            std::size_t max_len, Rng& rng) {
  if (article.empty())
    throw ContractViolation("summarize: article must be non-empty");
  if (max_len < 1) throw ContractViolation("summarize: max_len must be >= 1");

  std::unordered_set<std::string_view> article_tokens;
  for (const auto& token : article) article_tokens.insert(token);

  metrics::TokenSeq output;
  output.push_back(article[0]);
  if (article.size() >= 2 && max_len >= 2) output.push_back(article[1]);

  const double bias_multiplier = 1.0 + model.continuation_bias;
  while (output.size() >= 2 && output.size() < max_len) {
    const MarkovSummarizer::Context context{output[output.size() - 2],
                                            output[output.size() - 1]};
    const auto it = model.transitions.find(context);
    if (it == model.transitions.end() || it->second.empty()) break;

    double total_weight = 0.0;
    for (const auto& [token, count] : it->second) {
      total_weight += static_cast<double>(count) *
                      (article_tokens.contains(token) ? bias_multiplier : 1.0);
    }
    double pick = rng.uniform() * total_weight;
    const std::string* chosen = nullptr;
    for (const auto& [token, count] : it->second) {
      const double weight =
          static_cast<double>(count) *
          (article_tokens.contains(token) ? bias_multiplier : 1.0);
      pick -= weight;
      chosen = &token;
      if (pick <= 0.0) break;
    }
    output.push_back(*chosen);
  }
  return output;
}

MarkovSummarizer fine_tune_summarizer(MarkovSummarizer model,
                                      std::span<const TrainingPair> pairs) {
  for (const auto& pair : pairs) {
    const auto& summary = pair.summary;
    for (std::size_t i = 0; i + 2 < summary.size(); ++i) {
      ++model.transitions[{summary[i], summary[i + 1]}][summary[i + 2]];
    }
  }
  return model;
}

void save_model(const SoftmaxModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json obj;
  obj["kind"] = "softmax";
  obj["class_count"] = model.class_count;
  obj["feature_count"] = model.feature_count;
  obj["weights"] = model.weights;
  obj["biases"] = model.biases;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << obj.dump(2) << '\n';
}

SoftmaxModel load_softmax_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  nlohmann::json obj;
  try {
    in >> obj;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": invalid JSON: " + e.what());
  }
  if (obj.value("kind", "") != "softmax")
    throw LoadError(path.string() + ": not a softmax model file");
  SoftmaxModel model;
  model.class_count = obj.at("class_count").get<int>();
  model.feature_count = obj.at("feature_count").get<std::size_t>();
  model.weights = obj.at("weights").get<std::vector<double>>();
  model.biases = obj.at("biases").get<std::vector<double>>();
  if (model.weights.size() !=
          static_cast<std::size_t>(model.class_count) * model.feature_count ||
      model.biases.size() != static_cast<std::size_t>(model.class_count))
    throw LoadError(path.string() + ": inconsistent parameter shapes");
  return model;
}

void save_model(const MarkovSummarizer& model,
                const std::filesystem::path& path) {
  nlohmann::ordered_json obj;
  obj["kind"] = "markov_summarizer";
  obj["continuation_bias"] = model.continuation_bias;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& [context, nexts] : model.transitions) {
    nlohmann::ordered_json entry;
    entry["context"] = {context.first, context.second};
    nlohmann::ordered_json counts;
    for (const auto& [token, count] : nexts) counts[token] = count;
    entry["counts"] = std::move(counts);
    table.push_back(std::move(entry));
  }
  obj["transitions"] = std::move(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << obj.dump(2) << '\n';
}

MarkovSummarizer load_summarizer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  nlohmann::json obj;
  try {
    in >> obj;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": invalid JSON: " + e.what());
  }
  if (obj.value("kind", "") != "markov_summarizer")
    throw LoadError(path.string() + ": not a summarizer model file");
  MarkovSummarizer model;
  model.continuation_bias = obj.at("continuation_bias").get<double>();
  for (const auto& entry : obj.at("transitions")) {
    const auto& context = entry.at("context");
    MarkovSummarizer::Context key{context.at(0).get<std::string>(),
                                  context.at(1).get<std::string>()};
    auto& nexts = model.transitions[key];
    for (const auto& [token, count] : entry.at("counts").items()) {
      nexts[token] = count.get<std::uint64_t>();
    }
  }
  return model;
}

}  // namespace looplab::learners
