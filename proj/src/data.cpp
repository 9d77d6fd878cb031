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

#include "looplab/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "looplab/common.hpp"
#include "looplab/kernels.hpp"

namespace looplab::data {

namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double_field(const std::string& field, std::size_t line_no,
                          const char* what) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw LoadError("line " + std::to_string(line_no) + ": " + what +
                    " is not a finite number: '" + field + "'");
  }
  return value;
}

}  // namespace

VectorDataset load_vector_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  VectorDataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kFeatureCount + 1) {
      throw LoadError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(kFeatureCount + 1) + " columns, got " +
                      std::to_string(fields.size()));
    }
    LabeledSample sample;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const double v = parse_double_field(fields[i], line_no, "feature");
      if (v < kFeatureMin || v > kFeatureMax) {
        throw LoadError("line " + std::to_string(line_no) + ": feature " +
                        std::to_string(i) + " out of range [0, 16]: " +
                        fields[i]);
      }
      sample.features[i] = v;
    }
    const double label = parse_double_field(fields.back(), line_no, "label");
    if (label != std::floor(label) || label < 0 ||
        label >= static_cast<double>(kClassCount)) {
      throw LoadError("line " + std::to_string(line_no) +
                      ": label out of range [0, 10): " + fields.back());
    }
    sample.label = static_cast<int>(label);
    dataset.samples.push_back(sample);
  }
  return dataset;
}

void save_vector_dataset(const VectorDataset& dataset,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  for (const auto& sample : dataset.samples) {
    for (const double f : sample.features) out << format_double(f) << ',';
    out << sample.label << '\n';
  }
}

VectorDataset synth_digits(std::size_t n, int class_count, Rng& rng,
                           const SynthDigitsParams& params) {
  if (class_count != kClassCount)
    throw ContractViolation("synth_digits: class_count must be 10");
  if (n < static_cast<std::size_t>(class_count))
    throw ContractViolation("synth_digits: n must be >= class_count");
  if (params.subclusters_per_class < 1)
    throw ContractViolation("synth_digits: subclusters_per_class must be >= 1");
  if (!(params.smudge_fraction >= 0.0 && params.smudge_fraction <= 1.0))
    throw ContractViolation("synth_digits: smudge_fraction outside [0, 1]");

  std::vector<std::array<double, kFeatureCount>> centers(
      static_cast<std::size_t>(kClassCount) * params.subclusters_per_class);
  for (auto& center : centers) {
    for (auto& v : center)
      v = params.center_low +
          (params.center_high - params.center_low) * rng.uniform();
  }

  // Balanced label plan: the first n % 10 classes get one extra sample.
  std::vector<int> labels;
  labels.reserve(n);
  const std::size_t base_count = n / class_count;
  const std::size_t extras = n % class_count;
  for (int c = 0; c < class_count; ++c) {
    const std::size_t count =
        base_count + (static_cast<std::size_t>(c) < extras ? 1 : 0);
    labels.insert(labels.end(), count, c);
  }
  rng.shuffle(labels);

  VectorDataset dataset;
  dataset.class_count = class_count;
  dataset.samples.reserve(n);
  for (int label : labels) {
    LabeledSample sample;
    sample.label = label;
    const std::size_t sub = rng.index(params.subclusters_per_class);
    const auto& center =
        centers[static_cast<std::size_t>(label) * params.subclusters_per_class +
                sub];
    const double spread = params.noise_std *
                          (rng.uniform() < params.smudge_fraction
                               ? params.smudge_scale
                               : 1.0);
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      const double v = center[d] + rng.gaussian(0.0, spread);
      sample.features[d] = std::clamp(v, kFeatureMin, kFeatureMax);
    }
    dataset.samples.push_back(sample);
  }
  return dataset;
}

namespace {

constexpr std::array<const char*, 24> kWordBases = {
    "nor", "bel",  "car", "dov", "eth", "fal", "gor", "hul",
    "ist", "jun",  "kol", "lum", "mer", "nev", "oss", "pra",
    "quil", "ros", "tam", "urb", "vex", "wim", "yar", "zel"};

// One suffix per grammar role keeps the five pools disjoint.
constexpr std::array<const char*, 5> kRoleSuffixes = {"on", "eth", "ix", "ul",
                                                      "ame"};

constexpr std::array<const char*, 10> kFillers = {
    "the", "of",   "and",  "with",  "under",
    "near", "for", "into", "about", "across"};

std::vector<std::vector<std::string>> build_role_pools(std::size_t pool_size) {
  if (pool_size < 2 || pool_size > kWordBases.size())
    throw ContractViolation("synth_corpus: pool_size out of range");
  std::vector<std::vector<std::string>> pools(kRoleSuffixes.size());
  for (std::size_t r = 0; r < kRoleSuffixes.size(); ++r) {
    pools[r].reserve(pool_size);
    for (std::size_t w = 0; w < pool_size; ++w) {
      pools[r].push_back(std::string(kWordBases[w]) + kRoleSuffixes[r]);
    }
  }
  return pools;
}

}  // namespace

std::vector<TextPair> synth_corpus(std::size_t n, Rng& rng,
                                   const SynthCorpusParams& params) {
  if (n < 1) throw ContractViolation("synth_corpus: n must be >= 1");
  if (params.min_reference_len < 3 ||
      params.min_reference_len > params.max_reference_len)
    throw ContractViolation("synth_corpus: bad reference length range");
  if (params.max_reference_len >= params.min_article_len ||
      params.min_article_len > params.max_article_len)
    throw ContractViolation("synth_corpus: bad article length range");

  const auto pools = build_role_pools(params.pool_size);
  std::vector<TextPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TextPair pair;
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "pair-%05zu", i);
    pair.id = id_buf;

    // Key sentence: positions cycle through the role pools.
    const std::size_t ref_len =
        params.min_reference_len +
        rng.index(params.max_reference_len - params.min_reference_len + 1);
    pair.reference.reserve(ref_len);
    for (std::size_t p = 0; p < ref_len; ++p) {
      const auto& pool = pools[p % pools.size()];
      pair.reference.push_back(pool[rng.index(pool.size())]);
    }

    // Article: key sentence first, then a body that restates the key
    // sentence's vocabulary with filler words in between.
    const std::size_t target_len =
        params.min_article_len +
        rng.index(params.max_article_len - params.min_article_len + 1);
    pair.article = pair.reference;
    std::vector<std::string> content = pair.reference;
    rng.shuffle(content);
    std::size_t cursor = 0;
    while (pair.article.size() < target_len) {
      if (rng.uniform() < params.filler_rate) {
        pair.article.push_back(kFillers[rng.index(kFillers.size())]);
      } else {
        if (cursor == content.size()) {
          rng.shuffle(content);
          cursor = 0;
        }
        pair.article.push_back(content[cursor++]);
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<TextPair> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<TextPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("line " + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    if (!obj.contains("id") || !obj.contains("article") ||
        !obj.contains("reference")) {
      throw LoadError("line " + std::to_string(line_no) +
                      ": missing id/article/reference field");
    }
    TextPair pair;
    pair.id = obj.at("id").get<std::string>();
    pair.article = metrics::tokenize(obj.at("article").get<std::string>());
    pair.reference = metrics::tokenize(obj.at("reference").get<std::string>());
    if (pair.article.empty() || pair.reference.empty()) {
      throw LoadError("line " + std::to_string(line_no) +
                      ": article and reference must be non-empty");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_corpus(const std::vector<TextPair>& pairs,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  for (const auto& pair : pairs) {
    nlohmann::ordered_json obj;
    obj["id"] = pair.id;
    obj["article"] = metrics::join(pair.article);
    obj["reference"] = metrics::join(pair.reference);
    out << obj.dump() << '\n';
  }
}

CorpusPartitions partition(const std::vector<TextPair>& pairs,
                           double gen_fraction, double val_fraction,
                           std::size_t test_count, Rng& rng) {
  if (!(gen_fraction > 0.0) || !(val_fraction > 0.0))
    throw ContractViolation("partition: fractions must be positive");
  if (test_count > pairs.size())
    throw ContractViolation("partition: test_count exceeds corpus size");
  const auto n = static_cast<double>(pairs.size());
  const auto gen_count = static_cast<std::size_t>(std::llround(gen_fraction * n));
  const auto val_count = static_cast<std::size_t>(std::llround(val_fraction * n));
  if (gen_count + val_count + test_count > pairs.size())
    throw ContractViolation("partition: requested sizes exceed corpus size");
  if (gen_count == 0 || val_count == 0)
    throw ContractViolation("partition: fractions too small for corpus");

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  CorpusPartitions parts;
  std::size_t cursor = 0;
  auto take = [&](std::vector<TextPair>& out, std::size_t count) {
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(pairs[order[cursor++]]);
  };
  take(parts.generation_set, gen_count);
  take(parts.validation_set, val_count);
  take(parts.test_set, test_count);
  return parts;
}

}  // namespace looplab::data
