#pragma once

#include <span>
#include <string>
#include <vector>

#include "passmap/scene_graph.hpp"

namespace passmap {

// What happened while processing one keyframe. Bad instances never abort the
// keyframe; they are reported here instead.
struct KeyframeReport {
  std::int64_t kf_id = 0;
  std::size_t walls_observed = 0;
  std::size_t doors_observed = 0;
  bool refreshed = false;
  std::vector<std::string> warnings;
};

struct RuntimeOptions {
  unsigned threads = 1;  // per-wall gap detection workers
};

// Processes one keyframe into the graph:
//   class subsets -> downsample/range filter -> RANSAC planes -> wall and door
//   maps -> door association and coplanarity classification.
// Passages are refreshed every gap_check_interval keyframes and whenever a
// door becomes closed. Throws InvalidState when kf.id does not exceed every
// processed id.
SceneGraph process_keyframe(SceneGraph graph, const KeyFrame& kf, KeyframeReport* report = nullptr,
                            const RuntimeOptions& rt = {});

// Recomputes passages from the current walls, doors and trajectory using the
// enabled strategies, fuses them, and re-derives room connectivity.
void refresh_passages(SceneGraph& graph, const RuntimeOptions& rt = {},
                      std::vector<std::string>* warnings = nullptr);

SceneGraph make_graph(const PipelineConfig& cfg);

// Batch form: every keyframe in order, then a final refresh.
SceneGraph run_pipeline(std::span<const KeyFrame> keyframes, const PipelineConfig& cfg,
                        const std::vector<RoomRegion>& rooms = {}, const RuntimeOptions& rt = {});

// Every wall and door inlier in the global frame, labeled with its class and
// entity id + 1 as instance id, for external viewers.
LabeledPointCloud export_map_cloud(const SceneGraph& graph);

}  // namespace passmap
