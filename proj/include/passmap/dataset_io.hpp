#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "passmap/keyframe.hpp"

namespace passmap {

// On-disk keyframe sequence (format version 1):
//
//   manifest.json  {"version":1,"frames":[{"id":0,"timestamp":0.0,
//                    "pose":"poses/0.txt","cloud":"clouds/0.sply"}, ...]}
//   pose file      12 numbers, row-major 3x4 [R|t], camera-to-global
//   .sply file     "sply 1", "count N", then N lines "x y z class instance"
//
// Cloud coordinates are in the camera frame. See docs/dataset.md.
constexpr double kPoseTolerance = 1e-3;

// Loads every frame referenced by the manifest, returned in id order. Frames
// are parsed by up to `threads` workers (0 = hardware concurrency).
//
// Throws ManifestMissing, MalformedFrame and PoseNotRigid.
std::vector<KeyFrame> load_sequence(const std::filesystem::path& dir, unsigned threads = 1);

void save_sequence(const std::filesystem::path& dir, const std::vector<KeyFrame>& frames);

LabeledPointCloud read_sply(const std::filesystem::path& path);
void write_sply(const std::filesystem::path& path, const LabeledPointCloud& cloud);
std::string format_sply(const LabeledPointCloud& cloud);

// Raw 3x4 [R|t] as read; no rigidity check.
Eigen::Matrix<double, 3, 4> read_pose_matrix(const std::filesystem::path& path);
void write_pose(const std::filesystem::path& path, const CameraPose& pose);

// Shortest decimal representation that round-trips exactly.
std::string format_double(double v);

}  // namespace passmap
