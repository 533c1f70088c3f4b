#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/error.hpp"
#include "librarian/features.hpp"
#include "librarian/geometry.hpp"
#include "librarian/matching.hpp"
#include "librarian/rng.hpp"

namespace librarian {

/// One detected book spine in one observation.
struct SpineDetection {
  std::vector<Point2> polygon_px;  // spine outline in the source image
  Point3 position;                 // shelf frame, mm, on the front plane
  double rect_width_mm = 0.0;      // rectified spine bbox
  double rect_height_mm = 0.0;
  HsvHistogram histogram;
  int book_id = kUnknownBookId;    // per-detection assignment
  double confidence = 0.0;         // score behind that assignment, [0, 1.2]
};

/// One camera frame's worth of detections.
struct Observation {
  int seq = 0;
  std::vector<SpineDetection> detections;
};

/// Intermediate clustering result: indices into the pooled detection list.
struct PositionCluster {
  std::vector<std::size_t> member_indices;
  Point3 centroid;
};

/// Fused belief about one physical book.
struct BookCluster {
  std::vector<SpineDetection> members;
  Point3 centroid;
  int book_id = kUnknownBookId;
  double confidence = 0.0;
  double est_width_mm = 0.0;
  double est_height_mm = 0.0;
};

struct WorldBelief {
  std::vector<BookCluster> clusters;
  int first_seq = 0;
  int last_seq = 0;
};

struct FusionConfig {
  int window = 10;     // observations per belief
  int prune_min = 4;   // clusters below this member count are dropped
};

/// k for the clustering step: the maximum number of recognitions in any
/// single observation. Zero means an empty scene.
inline int choose_k(const std::vector<Observation>& obs) {
  if (obs.empty()) throw DomainError("choose_k: no observations");
  std::size_t k = 0;
  for (const auto& o : obs) k = std::max(k, o.detections.size());
  return static_cast<int>(k);
}

/// Lloyd's k-means over 3D positions. Deterministic: the first centroid is
/// drawn from the seeded RNG, the rest by farthest-point seeding; distance
/// ties go to the lower index. Runs to a stable assignment or 100 rounds.
inline std::vector<PositionCluster> cluster_positions(
    const std::vector<Point3>& points, int k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k < 1) throw DomainError("cluster_positions: k must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw DomainError("cluster_positions: k exceeds the number of points");

  // Farthest-point seeding.
  Rng rng(seed);
  std::vector<Point3> centroids;
  std::vector<bool> chosen(n, false);
  const std::size_t first = static_cast<std::size_t>(rng.uniform_below(n));
  centroids.push_back(points[first]);
  chosen[first] = true;
  while (centroids.size() < static_cast<std::size_t>(k)) {
    std::size_t far = n;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      double d = std::numeric_limits<double>::max();
      for (const auto& c : centroids)
        d = std::min(d, squared_distance(points[i], c));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    centroids.push_back(points[far]);
    chosen[far] = true;
  }

  std::vector<std::size_t> assign(n, 0);
  for (int round = 0; round < 100; ++round) {
    // Assign each point to its nearest centroid.
    std::vector<std::size_t> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(points[i], centroids[c]);
        if (d < best) {
          best = d;
          next[i] = c;
        }
      }
    }
    if (round > 0 && next == assign) break;
    assign = next;

    // Recompute centroids as member means.
    std::vector<Point3> sums(centroids.size());
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[assign[i]].x += points[i].x;
      sums[assign[i]].y += points[i].y;
      sums[assign[i]].z += points[i].z;
      ++counts[assign[i]];
    }
    std::vector<bool> stolen(n, false);
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] > 0) {
        const double m = static_cast<double>(counts[c]);
        centroids[c] = {sums[c].x / m, sums[c].y / m, sums[c].z / m};
      }
    }
    // Re-seed empty clusters with the point farthest from its own centroid.
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (stolen[i] || counts[assign[i]] <= 1) continue;
        const double d = squared_distance(points[i], centroids[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids[c] = points[far];
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      stolen[far] = true;
    }
  }

  std::vector<PositionCluster> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    out[assign[i]].member_indices.push_back(i);
  for (std::size_t c = 0; c < out.size(); ++c) {
    Point3 sum;
    for (std::size_t i : out[c].member_indices) {
      sum.x += points[i].x;
      sum.y += points[i].y;
      sum.z += points[i].z;
    }
    const double m = static_cast<double>(out[c].member_indices.size());
    out[c].centroid = {sum.x / m, sum.y / m, sum.z / m};
  }
  return out;
}

/// Keeps exactly the clusters with at least `min_members` recognitions,
/// order preserved. Miss-detections rarely recur, so small clusters go.
inline std::vector<PositionCluster> prune_clusters(
    std::vector<PositionCluster> clusters, int min_members = 4) {
  std::erase_if(clusters, [&](const PositionCluster& c) {
    return c.member_indices.size() < static_cast<std::size_t>(min_members);
  });
  return clusters;
}

/// Mean of member confidences: c = (sum of conf(b_i)) / n.
inline double cluster_confidence(const std::vector<SpineDetection>& members) {
  if (members.empty()) throw DomainError("cluster_confidence: no members");
  double sum = 0.0;
  for (const auto& m : members) sum += m.confidence;
  return sum / static_cast<double>(members.size());
}

/// Greedy ID assignment over clusters: the score of a (cluster, book) cell
/// is the number of member detections voting for that book id. Clusters
/// left without a column get kUnknownBookId.
inline std::vector<int> assign_cluster_ids(
    const std::vector<PositionCluster>& clusters,
    const std::vector<SpineDetection>& pooled, const BookDatabase& db) {
  if (clusters.empty()) throw DomainError("assign_cluster_ids: no clusters");
  if (db.empty()) throw DomainError("assign_cluster_ids: empty database");

  ScoreMatrix votes;
  votes.scores.resize(clusters.size(), std::vector<double>(db.size(), 0.0));
  for (std::size_t r = 0; r < clusters.size(); ++r) {
    votes.row_keys.push_back(static_cast<int>(r));
    for (std::size_t i : clusters[r].member_indices) {
      for (std::size_t c = 0; c < db.size(); ++c) {
        if (pooled[i].book_id == db[c].id) {
          votes.scores[r][c] += 1.0;
          break;
        }
      }
    }
  }
  for (const auto& book : db) votes.col_keys.push_back(book.id);

  const Assignment a = greedy_assign(votes);
  std::vector<int> ids(clusters.size(), kUnknownBookId);
  for (const auto& p : a.pairs) ids[static_cast<std::size_t>(p.row_key)] = p.col_key;
  return ids;
}

/// Fuses a window of observations into the world belief: pool detections,
/// cluster by position, prune noise, vote ids, and average poses, sizes,
/// and confidences per cluster.
inline WorldBelief build_belief(const std::vector<Observation>& obs,
                                const BookDatabase& db, std::uint64_t seed,
                                const FusionConfig& config = {}) {
  WorldBelief belief;
  if (obs.empty()) throw DomainError("build_belief: no observations");
  belief.first_seq = obs.front().seq;
  belief.last_seq = obs.back().seq;

  std::vector<SpineDetection> pooled;
  for (const auto& o : obs)
    pooled.insert(pooled.end(), o.detections.begin(), o.detections.end());

  const int k = choose_k(obs);
  if (k == 0) return belief; // empty scene

  std::vector<Point3> positions;
  positions.reserve(pooled.size());
  for (const auto& d : pooled) positions.push_back(d.position);

  auto clusters = prune_clusters(cluster_positions(positions, k, seed),
                                 config.prune_min);
  if (clusters.empty()) return belief;

  const std::vector<int> ids = assign_cluster_ids(clusters, pooled, db);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    BookCluster out;
    out.centroid = clusters[c].centroid;
    out.book_id = ids[c];
    double w = 0.0, h = 0.0;
    for (std::size_t i : clusters[c].member_indices) {
      out.members.push_back(pooled[i]);
      w += pooled[i].rect_width_mm;
      h += pooled[i].rect_height_mm;
    }
    const double n = static_cast<double>(out.members.size());
    out.est_width_mm = w / n;
    out.est_height_mm = h / n;
    out.confidence =
        out.book_id == kUnknownBookId ? 0.0 : cluster_confidence(out.members);
    belief.clusters.push_back(std::move(out));
  }
  return belief;
}

} // namespace librarian
