#include "passmap/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "passmap/errors.hpp"

namespace passmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Whitespace tokenizer over an in-memory buffer.
class Tokens {
 public:
  explicit Tokens(std::string_view s) : s_(s) {}

  bool next(std::string_view& tok) {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= s_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok = s_.substr(start, pos_ - start);
    return true;
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

struct FrameEntry {
  std::int64_t id = 0;
  double timestamp = 0.0;
  std::string pose;
  std::string cloud;
};

KeyFrame load_frame(const fs::path& dir, const FrameEntry& e) {
  KeyFrame kf;
  kf.id = e.id;
  kf.timestamp = e.timestamp;

  const fs::path pose_path = dir / e.pose;
  const fs::path cloud_path = dir / e.cloud;
  if (!fs::exists(pose_path)) throw MalformedFrame(e.id, "missing pose file " + pose_path.string());
  if (!fs::exists(cloud_path)) {
    throw MalformedFrame(e.id, "missing cloud file " + cloud_path.string());
  }

  Eigen::Matrix<double, 3, 4> m;
  try {
    m = read_pose_matrix(pose_path);
  } catch (const MalformedFrame&) {
    throw;
  } catch (const Error& err) {
    throw MalformedFrame(e.id, err.what());
  }
  const Eigen::Matrix3d r = m.leftCols<3>();
  const double ortho = CameraPose::orthogonality_error(r);
  if (!(ortho <= kPoseTolerance) || !(r.determinant() > 0.0)) throw PoseNotRigid(e.id, ortho);
  if (!m.col(3).allFinite()) throw MalformedFrame(e.id, "non-finite camera center");
  kf.pose = CameraPose(r, m.col(3));

  try {
    kf.cloud = read_sply(cloud_path);
  } catch (const Error& err) {
    throw MalformedFrame(e.id, err.what());
  }
  return kf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

Eigen::Matrix<double, 3, 4> read_pose_matrix(const fs::path& path) {
  const std::string text = slurp(path);
  Tokens toks(text);
  Eigen::Matrix<double, 3, 4> m;
  std::string_view tok;
  for (int i = 0; i < 12; ++i) {
    if (!toks.next(tok)) throw Error(path.string() + ": expected 12 numbers, found " + std::to_string(i));
    double v = 0.0;
    if (!parse_number(tok, v) || !std::isfinite(v)) {
      throw Error(path.string() + ": bad number '" + std::string(tok) + "'");
    }
    m(i / 4, i % 4) = v;
  }
  if (toks.next(tok)) throw Error(path.string() + ": trailing data after 12 numbers");
  return m;
}

void write_pose(const fs::path& path, const CameraPose& pose) {
  std::string s;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double v = c < 3 ? pose.rotation()(r, c) : pose.center()[r];
      s += format_double(v);
      s += c < 3 ? ' ' : '\n';
    }
  }
  write_file(path, s);
}

LabeledPointCloud read_sply(const fs::path& path) {
  const std::string text = slurp(path);
  Tokens toks(text);
  std::string_view tok;
  auto fail = [&](const std::string& why) {
    throw Error(path.string() + ":" + std::to_string(toks.line()) + ": " + why);
  };
  if (!toks.next(tok) || tok != "sply") fail("missing 'sply' header");
  if (!toks.next(tok) || tok != "1") fail("unsupported sply version");
  if (!toks.next(tok) || tok != "count") fail("missing 'count'");
  std::size_t n = 0;
  if (!toks.next(tok) || !parse_number(tok, n)) fail("bad point count");

  LabeledPointCloud cloud;
  cloud.points.points.reserve(n);
  cloud.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double xyz[3];
    for (double& v : xyz) {
      if (!toks.next(tok)) fail("unexpected end of file at point " + std::to_string(i));
      if (!parse_number(tok, v) || !std::isfinite(v)) fail("bad coordinate '" + std::string(tok) + "'");
    }
    long cls = 0;
    std::uint32_t inst = 0;
    if (!toks.next(tok) || !parse_number(tok, cls)) fail("bad class id");
    const auto c = semantic_class_from_int(cls);
    if (!c) fail("unknown class id " + std::to_string(cls));
    if (!toks.next(tok) || !parse_number(tok, inst)) fail("bad instance id");
    cloud.points.points.emplace_back(xyz[0], xyz[1], xyz[2]);
    cloud.labels.push_back({*c, inst});
  }
  if (toks.next(tok)) fail("trailing data after " + std::to_string(n) + " points");
  return cloud;
}

std::string format_sply(const LabeledPointCloud& cloud) {
  std::string s = "sply 1\ncount " + std::to_string(cloud.size()) + "\n";
  s.reserve(s.size() + cloud.size() * 48);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points.points[i];
    const auto& l = cloud.labels[i];
    s += format_double(p.x());
    s += ' ';
    s += format_double(p.y());
    s += ' ';
    s += format_double(p.z());
    s += ' ';
    s += std::to_string(static_cast<int>(l.class_id));
    s += ' ';
    s += std::to_string(l.instance_id);
    s += '\n';
  }
  return s;
}

void write_sply(const fs::path& path, const LabeledPointCloud& cloud) {
  if (!cloud.consistent()) throw Error("label count does not match point count");
  write_file(path, format_sply(cloud));
}

std::vector<KeyFrame> load_sequence(const fs::path& dir, unsigned threads) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_regular_file(manifest_path)) throw ManifestMissing(manifest_path.string());

  json doc;
  try {
    doc = json::parse(slurp(manifest_path));
  } catch (const json::exception& e) {
    throw SchemaError(manifest_path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || doc["version"] != 1) {
    throw SchemaError(manifest_path.string() + ": expected \"version\": 1");
  }
  std::vector<FrameEntry> entries;
  const json frames = doc.value("frames", json::array());
  if (!frames.is_array()) throw SchemaError(manifest_path.string() + ": 'frames' must be a list");
  std::set<std::int64_t> seen;
  for (const auto& f : frames) {
    FrameEntry e;
    try {
      e.id = f.at("id").get<std::int64_t>();
      e.timestamp = f.at("timestamp").get<double>();
      e.pose = f.at("pose").get<std::string>();
      e.cloud = f.at("cloud").get<std::string>();
    } catch (const json::exception& ex) {
      const std::int64_t id = f.is_object() && f.contains("id") && f["id"].is_number_integer()
                                  ? f["id"].get<std::int64_t>()
                                  : -1;
      throw MalformedFrame(id, std::string("manifest entry: ") + ex.what());
    }
    if (!seen.insert(e.id).second) throw MalformedFrame(e.id, "duplicate frame id");
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const FrameEntry& a, const FrameEntry& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].timestamp < entries[i - 1].timestamp) {
      throw MalformedFrame(entries[i].id, "timestamps decrease along the id order");
    }
  }

  std::vector<KeyFrame> out(entries.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, entries.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) out[i] = load_frame(dir, entries[i]);
    return out;
  }
  // Strided partition; the first error by frame order is rethrown.
  std::vector<std::future<void>> workers;
  std::vector<std::exception_ptr> errors(entries.size());
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < entries.size(); i += threads) {
        try {
          out[i] = load_frame(dir, entries[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }));
  }
  for (auto& f : workers) f.get();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void save_sequence(const fs::path& dir, const std::vector<KeyFrame>& frames) {
  json manifest;
  manifest["version"] = 1;
  manifest["frames"] = json::array();
  for (const auto& kf : frames) {
    const std::string pose = "poses/" + std::to_string(kf.id) + ".txt";
    const std::string cloud = "clouds/" + std::to_string(kf.id) + ".sply";
    write_pose(dir / pose, kf.pose);
    write_sply(dir / cloud, kf.cloud);
    manifest["frames"].push_back(
        {{"id", kf.id}, {"timestamp", kf.timestamp}, {"pose", pose}, {"cloud", cloud}});
  }
  write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

}  // namespace passmap
