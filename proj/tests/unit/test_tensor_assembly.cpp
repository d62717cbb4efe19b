#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/tensor_assembly.hpp"
#include "oracle.hpp"

using namespace sdti;

namespace {

// Dataset i holds the constant value 10*i + column in every cell and label
// pattern r % (i + 2) == 0.
Corpus tagged_corpus(std::size_t n, std::size_t rows, std::vector<std::size_t> widths) {
  std::vector<Dataset> ds;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset d;
    d.name = "d" + std::to_string(i);
    d.features = RealMatrix(rows, widths[i]);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < widths[i]; ++c) d.features(r, c) = 10.0 * static_cast<double>(i) + c;
    }
    d.labels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) d.labels[r] = r % (i + 2) == 0;
    ds.push_back(std::move(d));
  }
  return truncate_corpus(std::move(ds), rows);
}

}  // namespace

TEST(ZeroPad, AppendsZeroColumns) {
  RealMatrix x(2, 3);
  for (std::size_t i = 0; i < 6; ++i) x.data()[i] = static_cast<double>(i + 1);
  const RealMatrix p = zero_pad(x, 5);
  ASSERT_EQ(p.rows(), 2u);
  ASSERT_EQ(p.cols(), 5u);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(p(r, c), x(r, c));
    EXPECT_EQ(p(r, 3), 0.0);
    EXPECT_EQ(p(r, 4), 0.0);
  }
}

TEST(ZeroPad, SameWidthIsIdentity) {
  RealMatrix x(3, 2, 1.5);
  EXPECT_EQ(zero_pad(x, 2), x);
  EXPECT_THROW(zero_pad(x, 1), Error);
}

TEST(ZeroPad, ExtraWeightsAreIgnored) {
  Rng rng(2);
  RealMatrix x(4, 3);
  for (auto& v : x.data()) v = rng.normal();
  const RealMatrix p = zero_pad(x, 6);
  std::vector<double> w(6);
  for (auto& v : w) v = rng.normal() * 100.0;
  for (std::size_t r = 0; r < 4; ++r) {
    double full = 0.0, part = 0.0;
    for (std::size_t c = 0; c < 6; ++c) full += p(r, c) * w[c];
    for (std::size_t c = 0; c < 3; ++c) part += x(r, c) * w[c];
    EXPECT_EQ(full, part);
  }
}

TEST(IndexMap, DatasetMajorLayout) {
  const IndexMap map(3);
  EXPECT_EQ(map.combinations(), 9u);
  EXPECT_EQ(map.dataset_of(4), 1u);
  EXPECT_EQ(map.label_of(4), 1u);
  EXPECT_EQ(map.combination(2, 1), 7u);
  std::vector<std::size_t> diag;
  for (std::size_t q = 0; q < 9; ++q) {
    if (map.is_correct(q)) diag.push_back(q);
  }
  EXPECT_EQ(diag, (std::vector<std::size_t>{0, 4, 8}));
}

TEST(AssembleData, RepeatsEachDatasetNTimes) {
  const Corpus c = tagged_corpus(2, 4, {2, 3});
  const Tensor3 a = assemble_data_tensor(c);
  ASSERT_EQ(a.slices(), 4u);
  ASSERT_EQ(a.rows(), 4u);
  ASSERT_EQ(a.cols(), 3u);
  const double first_cell[] = {0.0, 0.0, 10.0, 10.0};
  for (std::size_t q = 0; q < 4; ++q) EXPECT_EQ(a(q, 0, 0), first_cell[q]);
  // Dataset 0 is padded in column 2.
  EXPECT_EQ(a(0, 3, 2), 0.0);
  EXPECT_EQ(a(1, 3, 2), 0.0);
  EXPECT_EQ(a(2, 3, 2), 12.0);
}

TEST(AssembleData, SingleDataset) {
  const Corpus c = tagged_corpus(1, 3, {2});
  const Tensor3 a = assemble_data_tensor(c);
  EXPECT_EQ(a.slices(), 1u);
  EXPECT_TRUE(IndexMap(1).is_correct(0));
}

TEST(AssembleData, ThreeDatasetsSliceFourIsDatasetOne) {
  const Corpus c = tagged_corpus(3, 2, {1, 1, 1});
  const Tensor3 a = assemble_data_tensor(c);
  EXPECT_EQ(a(4, 0, 0), 10.0);
}

TEST(AssembleLabels, CyclesLabelVectors) {
  const Corpus c = tagged_corpus(2, 6, {1, 1});
  const Tensor3 nl = assemble_label_tensor(c);
  ASSERT_EQ(nl.slices(), 4u);
  ASSERT_EQ(nl.cols(), 1u);
  for (std::size_t q = 0; q < 4; ++q) {
    const auto& src = c.datasets[q % 2].labels;
    for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(nl(q, r, 0), src[r]) << q << "," << r;
  }
}

TEST(AssembleData, EnumeratesAllPairs) {
  const Corpus c = tagged_corpus(2, 6, {1, 1});
  const auto t = assemble(c);
  std::set<std::pair<double, int>> pairs;
  for (std::size_t q = 0; q < 4; ++q) {
    int code = 0;
    for (std::size_t r = 0; r < 6; ++r) code = code * 2 + static_cast<int>((*t.labels)(q, r, 0));
    pairs.insert({(*t.data)(q, 0, 0), code});
  }
  EXPECT_EQ(pairs.size(), 4u);
}

TEST(AssembleData, ElementBudget) {
  const Corpus c = tagged_corpus(3, 10, {2, 4, 3});
  EXPECT_EQ(data_tensor_elements(c), 9u * 10u * 4u);
  try {
    assemble_data_tensor(c, 359);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Budget);
  }
  EXPECT_NO_THROW(assemble_data_tensor(c, 360));
}

TEST(Hyperparameters, EndpointsOfLogRange) {
  EXPECT_DOUBLE_EQ(std::pow(10.0, kLogLrLow), 1e-5);
  EXPECT_DOUBLE_EQ(std::pow(10.0, kLogLrHigh), 0.1);
}

TEST(Hyperparameters, BoundsAndTiling) {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const Hyperparameters h = sample_hyperparameters(3, rng);
    ASSERT_EQ(h.learning_rate.size(), 9u);
    ASSERT_EQ(h.betas.size(), 9u);
    for (std::size_t q = 0; q < 9; ++q) {
      EXPECT_GE(h.learning_rate[q], 1e-5);
      EXPECT_LE(h.learning_rate[q], 0.1);
      EXPECT_GE(h.betas[q][0], 0.85);
      EXPECT_LE(h.betas[q][0], 0.99);
      EXPECT_GE(h.betas[q][1], 0.98);
      EXPECT_LE(h.betas[q][1], 0.9999);
      const std::size_t head = (q / 3) * 3;
      EXPECT_EQ(h.learning_rate[q], h.learning_rate[head]);
      EXPECT_EQ(h.betas[q], h.betas[head]);
    }
  }
}

TEST(Hyperparameters, TwoDatasetsTileAsPairs) {
  Rng rng(5);
  const Hyperparameters h = sample_hyperparameters(2, rng);
  EXPECT_EQ(h.learning_rate[0], h.learning_rate[1]);
  EXPECT_EQ(h.learning_rate[2], h.learning_rate[3]);
  EXPECT_NE(h.learning_rate[0], h.learning_rate[2]);
}

TEST(InitWeights, GlorotBoundAndZeroBias) {
  EXPECT_DOUBLE_EQ(glorot_bound(5), 1.0);
  Rng rng(8);
  const Parameters p = init_weights(3, 5, rng);
  EXPECT_EQ(p.weights.slices(), 9u);
  EXPECT_EQ(p.weights.rows(), 5u);
  EXPECT_EQ(p.weights.cols(), 1u);
  EXPECT_EQ(p.biases.slices(), 9u);
  for (double w : p.weights.data()) {
    EXPECT_GE(w, -1.0);
    EXPECT_LE(w, 1.0);
  }
  for (double b : p.biases.data()) EXPECT_EQ(b, 0.0);
}

TEST(InitWeights, SlicesAreIndependent) {
  Rng rng(31);
  const std::size_t width = 10000;
  const Parameters p = init_weights(2, width, rng);
  std::vector<double> a(p.weights.slice(0).begin(), p.weights.slice(0).end());
  std::vector<double> b(p.weights.slice(3).begin(), p.weights.slice(3).end());
  const double ma = oracle::mean(a), mb = oracle::mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < width; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.05);
  // Uniform on [-bound, bound] has variance bound^2 / 3.
  const double bound = glorot_bound(width);
  EXPECT_NEAR(saa / width, bound * bound / 3.0, 0.05 * bound * bound / 3.0);
}

TEST(ResetEpochState, DeterministicForSeed) {
  const Corpus c = tagged_corpus(2, 5, {2, 3});
  auto a = assemble(c);
  auto b = assemble(c);
  Rng ra(3), rb(3);
  reset_epoch_state(a, ra);
  reset_epoch_state(b, rb);
  EXPECT_EQ(a.params.weights, b.params.weights);
  EXPECT_EQ(a.hyper.learning_rate, b.hyper.learning_rate);
  EXPECT_EQ(*a.data, *b.data);
}
