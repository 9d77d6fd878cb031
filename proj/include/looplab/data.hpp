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

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "looplab/metrics.hpp"
#include "looplab/rng.hpp"

namespace looplab::data {

inline constexpr std::size_t kFeatureCount = 64;
inline constexpr int kClassCount = 10;
inline constexpr double kFeatureMin = 0.0;
inline constexpr double kFeatureMax = 16.0;

struct LabeledSample {
  std::array<double, kFeatureCount> features{};
  int label = 0;

  bool operator==(const LabeledSample&) const = default;
};

struct VectorDataset {
  std::vector<LabeledSample> samples;
  int class_count = kClassCount;

  bool operator==(const VectorDataset&) const = default;
  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// CSV with 65 numeric columns per row: 64 features in [0, 16] followed by an
/// integer class label in [0, 10). No header, LF line endings.
VectorDataset load_vector_dataset(const std::filesystem::path& path);
void save_vector_dataset(const VectorDataset& dataset,
                         const std::filesystem::path& path);

struct SynthDigitsParams {
  double noise_std = 0.4;
  /// Cluster-center coordinates are drawn uniformly from this band.
  double center_low = 1.0;
  double center_high = 5.0;
  /// Each class is a mixture of this many tight Gaussian subclusters at
  /// independent random centers. With 10 * subclusters_per_class locations
  /// against a 10 x 65 parameter linear model, the locations compete for
  /// capacity: nearest neighbors stay near-perfect while a linear classifier
  /// tops out below 1 and label noise does transferable damage.
  std::size_t subclusters_per_class = 8;
  /// Fraction of samples drawn with smudge_scale * noise_std noise. These
  /// ambiguous samples put a hard cap on every classifier's accuracy.
  double smudge_fraction = 0.15;
  double smudge_scale = 4.0;
};

/// Draws n samples from 10 Gaussian mixture classes in 64 dimensions.
/// Centers are derived deterministically from the generator; labels are
/// balanced within +-1 and the sample order is shuffled. Values are clipped
/// to [0, 16].
VectorDataset synth_digits(std::size_t n, int class_count, Rng& rng,
                           const SynthDigitsParams& params = {});

struct TextPair {
  std::string id;
  metrics::TokenSeq article;
  metrics::TokenSeq reference;

  bool operator==(const TextPair&) const = default;
};

/// JSON Lines, one object per pair: {"id": ..., "article": ..., "reference":
/// ...} with article/reference as space-joined token strings.
std::vector<TextPair> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::vector<TextPair>& pairs,
                 const std::filesystem::path& path);

struct SynthCorpusParams {
  /// Words per grammar role. Positions cycle through five role pools
  /// (subject / verb / object / qualifier / marker); smaller pools mean more
  /// bigram collisions between articles and therefore a harder corpus.
  std::size_t pool_size = 20;
  std::size_t min_reference_len = 12;
  std::size_t max_reference_len = 18;
  std::size_t min_article_len = 60;
  std::size_t max_article_len = 110;
  /// Probability of a filler word between content words in the article body.
  double filler_rate = 0.25;
};

/// Templated article/reference pairs. The reference is the article's lead
/// "key sentence" (so it is a subsequence of the article by construction),
/// built from slot-cycled role pools; the body restates the key sentence's
/// vocabulary with filler words. An extractive generator can reach high
/// ROUGE-L on these pairs while random token chains score low.
std::vector<TextPair> synth_corpus(std::size_t n, Rng& rng,
                                   const SynthCorpusParams& params = {});

struct CorpusPartitions {
  std::vector<TextPair> generation_set;
  std::vector<TextPair> validation_set;
  std::vector<TextPair> test_set;
};

/// Uniform shuffle then slice: round(gen_fraction*n) generation pairs,
/// round(val_fraction*n) validation pairs, exactly test_count test pairs.
CorpusPartitions partition(const std::vector<TextPair>& pairs,
                           double gen_fraction, double val_fraction,
                           std::size_t test_count, Rng& rng);

}  // namespace looplab::data
