#include "passmap/bim_prior.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "passmap/assignment.hpp"
#include "passmap/dataset_io.hpp"

namespace passmap {

using nlohmann::json;
using namespace jsonu;

namespace {

constexpr double kPriorConfidence = 0.95;

std::string join_ids(const std::vector<EntityId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ids[i]);
  }
  return s;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> match_centroids(const std::vector<Point3>& a,
                                                                 const std::vector<Point3>& b,
                                                                 double radius) {
  CostMatrix cost(a.size(), std::vector<std::optional<double>>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = (a[i] - b[j]).norm();
      if (d <= radius) cost[i][j] = d;
    }
  }
  return solve_assignment(cost);
}

ValidationReport validate_against_prior(const std::vector<Passage>& detected,
                                        const std::vector<PlannedPassage>& planned, double match_radius,
                                        double align_tol) {
  if (!(align_tol > 0.0) || !(match_radius > align_tol)) {
    throw ConfigError("prior validation needs match_radius > align_tol > 0");
  }
  std::vector<Passage> det = detected;
  std::vector<PlannedPassage> plan = planned;
  std::sort(det.begin(), det.end(), [](const Passage& x, const Passage& y) { return x.id < y.id; });
  std::sort(plan.begin(), plan.end(), [](const PlannedPassage& x, const PlannedPassage& y) { return x.id < y.id; });

  std::vector<Point3> dc, pc;
  for (const auto& d : det) {
    if (!all_finite(d.centroid)) throw DegenerateInput("detected passage " + std::to_string(d.id) + " is not finite");
    dc.push_back(d.centroid);
  }
  for (const auto& p : plan) {
    if (!all_finite(p.centroid)) throw DegenerateInput("planned passage " + std::to_string(p.id) + " is not finite");
    pc.push_back(p.centroid);
  }

  ValidationReport report;
  std::vector<char> det_used(det.size(), 0), plan_used(plan.size(), 0);
  for (const auto& [i, j] : match_centroids(dc, pc, match_radius)) {
    det_used[i] = plan_used[j] = 1;
    MatchedPair m{det[i].id, plan[j].id, (dc[i] - pc[j]).norm(), (det[i].extent - plan[j].extent).norm()};
    report.matched.push_back(m);
    if (m.centroid_error > align_tol) report.misaligned.push_back(m);
  }
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (!plan_used[j]) report.missing.push_back(plan[j].id);
  }
  for (std::size_t i = 0; i < det.size(); ++i) {
    if (!det_used[i]) report.spurious.push_back(det[i].id);
  }
  auto by_detected = [](const MatchedPair& x, const MatchedPair& y) { return x.detected_id < y.detected_id; };
  std::sort(report.matched.begin(), report.matched.end(), by_detected);
  std::sort(report.misaligned.begin(), report.misaligned.end(), by_detected);
  return report;
}

std::vector<Passage> upgrade_kinds_from_prior(std::vector<Passage> detected, const ValidationReport& report,
                                              const std::vector<PlannedPassage>& planned) {
  std::map<EntityId, const PlannedPassage*> plan_by_id;
  for (const auto& p : planned) plan_by_id[p.id] = &p;
  std::map<EntityId, EntityId> match;
  for (const auto& m : report.matched) match[m.detected_id] = m.planned_id;
  for (auto& d : detected) {
    auto it = match.find(d.id);
    if (it == match.end()) continue;
    auto pit = plan_by_id.find(it->second);
    if (pit == plan_by_id.end()) continue;
    if (d.kind == PassageKind::Unknown) d.kind = pit->second->kind;
    d.confidence = std::max(d.confidence, kPriorConfidence);
  }
  return detected;
}

std::string format_report(const ValidationReport& r) {
  std::ostringstream out;
  out << "matched=" << r.matched.size() << "\n";
  out << "missing=" << r.missing.size() << "\n";
  out << "spurious=" << r.spurious.size() << "\n";
  out << "misaligned=" << r.misaligned.size() << "\n";
  for (const auto& m : r.matched) {
    out << "match=" << m.detected_id << ":" << m.planned_id << " centroid_error=" << format_double(m.centroid_error)
        << " extent_error=" << format_double(m.extent_error) << "\n";
  }
  out << "missing_ids=" << join_ids(r.missing) << "\n";
  out << "spurious_ids=" << join_ids(r.spurious) << "\n";
  std::vector<EntityId> mis;
  for (const auto& m : r.misaligned) mis.push_back(m.detected_id);
  out << "misaligned_ids=" << join_ids(mis) << "\n";
  return out.str();
}

std::string save_prior(const std::vector<PlannedPassage>& planned) {
  json list = json::array();
  for (const auto& p : planned) {
    list.push_back({{"id", p.id},
                    {"centroid", vec_json(p.centroid)},
                    {"extent", vec_json(p.extent)},
                    {"kind", std::string(to_string(p.kind))}});
  }
  json doc{{"schema", kPriorSchema}, {"passages", std::move(list)}};
  return doc.dump(1) + "\n";
}

std::vector<PlannedPassage> load_prior(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("prior document is not valid JSON: ") + e.what());
  }
  check_schema(doc, kPriorSchema);
  Object root(doc, "prior");
  root.req("schema");
  const json& list = as_array(root.req("passages"), root.at("passages"));
  root.finish();
  std::vector<PlannedPassage> out;
  std::set<EntityId> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Object o(list[i], "passages[" + std::to_string(i) + "]");
    PlannedPassage p;
    p.id = as_int(o.req("id"), o.at("id"));
    p.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    p.extent = as_vec2(o.req("extent"), o.at("extent"));
    const std::string kind = as_string(o.req("kind"), o.at("kind"));
    const auto k = passage_kind_from_string(kind);
    if (!k) throw SchemaError(o.at("kind") + ": unknown value '" + kind + "'");
    p.kind = *k;
    o.finish();
    if (!(p.extent.x() > 0.0) || !(p.extent.y() > 0.0)) throw SchemaError(o.at("extent") + ": must be positive");
    if (!all_finite(p.centroid)) throw SchemaError(o.at("centroid") + ": must be finite");
    if (!ids.insert(p.id).second) throw SchemaError(o.at("id") + ": duplicate id " + std::to_string(p.id));
    out.push_back(p);
  }
  return out;
}

std::vector<PlannedPassage> read_prior(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open prior file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_prior(ss.str());
  } catch (const SchemaVersionMismatch&) {
    throw;
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace passmap
