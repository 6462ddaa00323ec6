#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "passmap/passage.hpp"

namespace passmap {

inline constexpr const char* kPriorSchema = "bimprior/1";

// As-planned opening, already expressed in the map frame.
struct PlannedPassage {
  EntityId id = 0;
  Point3 centroid = Point3::Zero();
  Vec2 extent{0.0, 0.0};  // (width, height), m, both > 0
  PassageKind kind = PassageKind::Doorway;
};

struct MatchedPair {
  EntityId detected_id = 0;
  EntityId planned_id = 0;
  double centroid_error = 0.0;  // m
  double extent_error = 0.0;    // m, norm of the (width, height) difference
};

// Each id lands in exactly one of matched/missing/spurious; misaligned is the
// part of matched with centroid_error > align_tol. All lists are sorted by id.
struct ValidationReport {
  std::vector<MatchedPair> matched;
  std::vector<EntityId> missing;   // planned ids
  std::vector<EntityId> spurious;  // detected ids
  std::vector<MatchedPair> misaligned;
};

// Index pairs (a, b) of a one-to-one matching between two point lists that
// pairs as many points as possible within `radius` and then minimizes the
// summed distance.
std::vector<std::pair<std::size_t, std::size_t>> match_centroids(const std::vector<Point3>& a,
                                                                 const std::vector<Point3>& b,
                                                                 double radius);

// Throws ConfigError unless match_radius > align_tol > 0, DegenerateInput for
// non-finite centroids.
ValidationReport validate_against_prior(const std::vector<Passage>& detected,
                                        const std::vector<PlannedPassage>& planned,
                                        double match_radius = 0.5, double align_tol = 0.15);

// Matched passages gain confidence >= 0.95; Unknown ones take the planned kind.
std::vector<Passage> upgrade_kinds_from_prior(std::vector<Passage> detected, const ValidationReport& report,
                                              const std::vector<PlannedPassage>& planned);

// One key=value per line.
std::string format_report(const ValidationReport& report);

std::string save_prior(const std::vector<PlannedPassage>& planned);
std::vector<PlannedPassage> load_prior(const std::string& document);
std::vector<PlannedPassage> read_prior(const std::filesystem::path& path);

}  // namespace passmap
