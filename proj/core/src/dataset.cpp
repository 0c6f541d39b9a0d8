// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dsgd/rng.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

Dataset::Dataset(RowMatrix features, std::vector<int> labels, int num_classes, Split split)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      split_(split) {
  if (num_classes_ < 1) throw InvariantError("Dataset: need at least one class");
  check_same_dim("Dataset rows vs labels", static_cast<std::size_t>(features_.rows()),
                 labels_.size());
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) throw InvariantError("Dataset: label out of range");
  }
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  RowMatrix rows(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<int> labels(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw std::out_of_range("Dataset::select: index out of range");
    rows.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(indices[i]));
    labels[i] = labels_[indices[i]];
  }
  return {std::move(rows), std::move(labels), num_classes_, split_};
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Dataset dataset_from_idx(const IdxImages& images, std::span<const std::uint8_t> labels,
                         int num_classes, Split split) {
  check_same_dim("dataset_from_idx images vs labels", images.count, labels.size());
  const auto f = static_cast<Eigen::Index>(images.image_size());
  RowMatrix features(static_cast<Eigen::Index>(images.count), f);
  for (std::size_t i = 0; i < images.pixels.size(); ++i) {
    features.data()[i] = static_cast<double>(images.pixels[i]) / 255.0;
  }
  std::vector<int> ys(labels.begin(), labels.end());
  return {std::move(features), std::move(ys), num_classes, split};
}

Dataset load_mnist(const std::filesystem::path& dir, Split split) {
  const std::string prefix = split == Split::kTrain ? "train" : "t10k";
  auto resolve = [&](const std::string& stem) {
    const auto plain = dir / stem;
    if (std::filesystem::exists(plain)) return plain;
    auto gz = plain;
    gz += ".gz";
    if (std::filesystem::exists(gz)) return gz;
    throw IdxError(IdxErrorKind::kIo, "MNIST file not found: " + plain.string() + "[.gz]");
  };
  const auto images = load_idx_images(resolve(prefix + "-images-idx3-ubyte"));
  const auto labels = load_idx_labels(resolve(prefix + "-labels-idx1-ubyte"), 10);
  return dataset_from_idx(images, labels, 10, split);
}

std::vector<std::size_t> stratified_subset_indices(const Dataset& data, std::size_t k,
                                                   std::uint64_t seed) {
  const std::size_t m = data.size();
  if (k > m) {
    throw std::invalid_argument("subset: requested " + std::to_string(k) + " of " +
                                std::to_string(m) + " examples");
  }
  const auto classes = static_cast<std::size_t>(data.num_classes());
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < m; ++i) {
    members[static_cast<std::size_t>(data.labels()[i])].push_back(i);
  }

  // Largest-remainder apportionment in exact integer arithmetic.
  std::vector<std::size_t> quota(classes);
  std::vector<std::size_t> remainder(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const std::uint64_t scaled = std::uint64_t{k} * members[c].size();
    quota[c] = static_cast<std::size_t>(scaled / m);
    remainder[c] = static_cast<std::size_t>(scaled % m);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < k; ++i, ++assigned) ++quota[order[i]];

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t c = 0; c < classes; ++c) {
    auto& pool = members[c];
    // Partial Fisher-Yates: the first quota[c] slots end up uniformly chosen.
    for (std::size_t i = 0; i < quota[c]; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Dataset subset(const Dataset& data, std::size_t k, std::uint64_t seed) {
  const auto idx = stratified_subset_indices(data, k, seed);
  return data.select(idx);
}

Dataset synthetic_gaussian_blobs(int classes, std::size_t per_class, std::size_t dim,
                                 std::uint64_t seed, double separation) {
  if (classes < 1 || per_class < 1 || dim < 1) {
    throw std::invalid_argument("synthetic_gaussian_blobs: counts must be positive");
  }
  if (static_cast<std::size_t>(classes) > 2 * dim) {
    throw std::invalid_argument("synthetic_gaussian_blobs: classes must not exceed 2 * dim");
  }
  const std::size_t m = static_cast<std::size_t>(classes) * per_class;
  RowMatrix features(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dim));
  std::vector<int> labels(m);
  Rng rng(seed);
  std::size_t row = 0;
  for (int c = 0; c < classes; ++c) {
    const std::size_t axis = static_cast<std::size_t>(c) % dim;
    const double sign = (static_cast<std::size_t>(c) / dim) % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double centre = j == axis ? sign * separation : 0.0;
        features(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
            centre + rng.normal();
      }
      labels[row] = c;
    }
  }
  return {std::move(features), std::move(labels), classes, Split::kTrain};
}

}  // namespace dsgd
