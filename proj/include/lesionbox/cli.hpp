#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lesionbox/phantom.hpp"

namespace lesionbox::cli {

// exit codes shared by all commands
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;  // I/O or parse failure
inline constexpr int kExitConsistency = 3; // cross-file consistency failure

struct GtExtractArgs {
  std::vector<std::string> mask_paths;
  int connectivity = 26;
  std::int64_t min_voxels = 1;
  std::string out_path = "truth.json";
};
int cmd_gt_extract(const GtExtractArgs& args, std::ostream& out,
                   std::ostream& err);

struct PreprocessArgs {
  std::string image_path;
  std::array<double, 3> target_spacing{0, 0, 0}; // 0 = keep input spacing
  bool nearest = false;
  std::string out_path;
};
int cmd_preprocess(const PreprocessArgs& args, std::ostream& out,
                   std::ostream& err);

struct EvalArgs {
  std::string detections_path;
  std::string truth_path; // empty = combined file
  double iou_threshold = 0.3;
  std::vector<double> operating_points{0.25, 0.5, 1.0, 2.0};
  std::string csv_path = "froc.csv";
  std::string svg_path = "froc.svg";
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct DetectBaselineArgs {
  std::string image_path;
  double threshold = 150.0;
  std::int64_t min_voxels = 1;
  double nms_iou = 0.5;
  std::string scan_id; // default: file stem
  std::string out_path = "detections.json";
};
int cmd_detect_baseline(const DetectBaselineArgs& args, std::ostream& out,
                        std::ostream& err);

struct PhantomArgs {
  PhantomSpec spec;
  std::string out_dir = ".";
};
int cmd_phantom(const PhantomArgs& args, std::ostream& out,
                std::ostream& err);

/// Parallelism cap from the LESIONBOX_THREADS environment variable
/// (defaults to the hardware concurrency, at least 1).
unsigned thread_limit();

/// Full argv-level entry point (CLI11 subcommands).
int run_cli(int argc, const char* const* argv);

} // namespace lesionbox::cli
