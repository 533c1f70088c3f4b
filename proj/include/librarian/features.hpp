#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/error.hpp"
#include "librarian/rng.hpp"

namespace librarian {

inline constexpr std::size_t kHistogramBins = 20;

/// Normalized 20-bin histogram per HSV channel.
struct HsvHistogram {
  std::array<double, kHistogramBins> hue{};
  std::array<double, kHistogramBins> sat{};
  std::array<double, kHistogramBins> val{};
};

inline void validate_histogram(const HsvHistogram& h) {
  for (const auto* channel : {&h.hue, &h.sat, &h.val}) {
    double sum = 0.0;
    for (double v : *channel) {
      if (v < 0.0) throw ValidationError("histogram: negative bin");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("histogram: channel does not sum to 1");
  }
}

namespace detail {

// bin = floor(x * 20); x = 1.0 clamps into the last bin.
inline std::size_t bin_of(double x) {
  const auto b = static_cast<std::size_t>(x * kHistogramBins);
  return b >= kHistogramBins ? kHistogramBins - 1 : b;
}

} // namespace detail

/// Builds the per-channel histogram of (h, s, v) samples, all in [0, 1].
inline HsvHistogram hsv_histogram(
    const std::vector<std::tuple<double, double, double>>& samples) {
  if (samples.empty()) throw DomainError("hsv_histogram: no samples");
  HsvHistogram out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [h, s, v] = samples[i];
    for (double c : {h, s, v})
      if (!(c >= 0.0 && c <= 1.0))
        throw DomainError("hsv_histogram: sample " + std::to_string(i) +
                          " outside [0, 1]");
    out.hue[detail::bin_of(h)] += 1.0;
    out.sat[detail::bin_of(s)] += 1.0;
    out.val[detail::bin_of(v)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  for (auto* channel : {&out.hue, &out.sat, &out.val})
    for (double& v : *channel) v /= n;
  return out;
}

/// dot(a, b) / (|a| |b|). Nonnegative inputs keep the result in [0, 1].
inline double cosine_similarity(std::span<const double> a,
                                std::span<const double> b) {
  if (a.size() != b.size())
    throw DomainError("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw DomainError("cosine_similarity: zero-norm input");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Similarity of a detection against a book: hue similarity plus 0.2 times
/// saturation similarity. The value channel is never read.
inline double spine_score(const HsvHistogram& det, const HsvHistogram& book) {
  return cosine_similarity(det.hue, book.hue) +
         0.2 * cosine_similarity(det.sat, book.sat);
}

/// Score matrix, rows keyed by detection index, columns by book id.
/// Entries produced by score_matrix() lie in [0, 1.2].
struct ScoreMatrix {
  std::vector<std::vector<double>> scores;
  std::vector<int> row_keys;
  std::vector<int> col_keys;

  std::size_t rows() const { return scores.size(); }
  std::size_t cols() const { return scores.empty() ? 0 : scores[0].size(); }
};

/// Scores every detection histogram against every book histogram.
inline ScoreMatrix score_matrix(const std::vector<HsvHistogram>& dets,
                                const std::vector<HsvHistogram>& books,
                                const std::vector<int>& book_ids) {
  if (dets.empty()) throw DomainError("score_matrix: no detections");
  if (books.empty()) throw DomainError("score_matrix: empty database");
  if (books.size() != book_ids.size())
    throw DomainError("score_matrix: book/id count mismatch");
  ScoreMatrix m;
  m.scores.resize(dets.size(), std::vector<double>(books.size(), 0.0));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    m.row_keys.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < books.size(); ++j)
      m.scores[i][j] = spine_score(dets[i], books[j]);
  }
  m.col_keys = book_ids;
  return m;
}

/// Draws `count` HSV samples from a spine color model and bins them.
/// Hue wraps around 1.0; saturation and value clamp to [0, 1].
inline HsvHistogram sample_spine_histogram(const SpineColorModel& model,
                                           int count, Rng& rng) {
  if (count < 1) throw DomainError("sample_spine_histogram: count must be >= 1");
  std::vector<std::tuple<double, double, double>> samples;
  samples.reserve(static_cast<std::size_t>(count));
  const auto wrap01 = [](double x) { return x - std::floor(x); };
  const auto clamp01 = [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
  for (int i = 0; i < count; ++i) {
    const double h = wrap01(model.hue_mean + model.hue_spread * rng.normal());
    const double s = clamp01(model.sat_mean + model.sat_spread * rng.normal());
    const double v = clamp01(model.val_mean + model.val_spread * rng.normal());
    samples.emplace_back(h, s, v);
  }
  return hsv_histogram(samples);
}

// Reference histograms stand in for histograms of database spine images.
// Each book gets a fixed nominal seed so references never change between runs.
inline constexpr std::uint64_t kReferenceSeedSalt = 0xB00C5E1FULL;
inline constexpr int kReferenceSampleCount = 1024;

inline HsvHistogram reference_histogram(const BookRecord& book) {
  Rng rng(hash_combine(kReferenceSeedSalt, static_cast<std::uint64_t>(book.id)));
  return sample_spine_histogram(book.spine_color, kReferenceSampleCount, rng);
}

inline std::vector<HsvHistogram> reference_histograms(const BookDatabase& db) {
  std::vector<HsvHistogram> out;
  out.reserve(db.size());
  for (const auto& book : db) out.push_back(reference_histogram(book));
  return out;
}

} // namespace librarian
