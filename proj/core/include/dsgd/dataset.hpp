// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dsgd/idx.hpp"

namespace dsgd {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Split { kTrain, kTest };

/// Labelled examples, one row per example.
class Dataset {
 public:
  Dataset(RowMatrix features, std::vector<int> labels, int num_classes, Split split);

  std::size_t size() const { return labels_.size(); }
  std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
  int num_classes() const { return num_classes_; }
  Split split() const { return split_; }

  const RowMatrix& features() const { return features_; }
  std::span<const int> labels() const { return labels_; }

  /// Rows `indices` in the given order.
  Dataset select(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;

 private:
  RowMatrix features_;
  std::vector<int> labels_;
  int num_classes_;
  Split split_;
};

/// Pixels divided by 255.
Dataset dataset_from_idx(const IdxImages& images, std::span<const std::uint8_t> labels,
                         int num_classes, Split split);

/// Loads `<dir>/{train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz]`.
Dataset load_mnist(const std::filesystem::path& dir, Split split);

/// Stratified subset of `k` rows, sorted by original index.
///
/// Class quotas follow largest-remainder apportionment of k * n_c / m, so each
/// class lands within one sample of its exact proportional share. Members of
/// each class are chosen by a seeded Fisher-Yates shuffle.
std::vector<std::size_t> stratified_subset_indices(const Dataset& data, std::size_t k,
                                                   std::uint64_t seed);
Dataset subset(const Dataset& data, std::size_t k, std::uint64_t seed);

/// Gaussian blobs with unit covariance. Class j is centred at
/// +/- separation * e_(j mod dim), sign alternating every `dim` classes.
/// Requires classes <= 2 * dim.
Dataset synthetic_gaussian_blobs(int classes, std::size_t per_class, std::size_t dim,
                                 std::uint64_t seed, double separation = 10.0);

}  // namespace dsgd
