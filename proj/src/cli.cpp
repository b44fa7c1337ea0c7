#include "lesionbox/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "lesionbox/detection_json.hpp"
#include "lesionbox/froc.hpp"
#include "lesionbox/geometry.hpp"
#include "lesionbox/labels.hpp"
#include "lesionbox/nifti_io.hpp"
#include "lesionbox/preprocess.hpp"

namespace lesionbox::cli {
namespace {

namespace fs = std::filesystem;

std::string stem_of(const std::string& path) {
  std::string s = fs::path(path).filename().string();
  // strip .nii / .nii.gz
  for (const char* ext : {".gz", ".nii"}) {
    if (s.size() > std::strlen(ext) &&
        s.compare(s.size() - std::strlen(ext), std::string::npos, ext) == 0)
      s.resize(s.size() - std::strlen(ext));
  }
  return s;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out)
      throw Error("cannot open file for writing: " + tmp);
    out << text;
    if (!out)
      throw Error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<TruthEntry> truth_entries(const std::vector<LesionInstance>& insts) {
  std::vector<TruthEntry> out;
  out.reserve(insts.size());
  for (const auto& inst : insts)
    out.push_back({inst.box, inst.center});
  return out;
}

std::string format_fpps(double v) {
  char buf[32];
  if (v == std::floor(v))
    std::snprintf(buf, sizeof(buf), "%.1f", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

} // namespace

unsigned thread_limit() {
  if (const char* env = std::getenv("LESIONBOX_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1)
      return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_gt_extract(const GtExtractArgs& args, std::ostream& out,
                   std::ostream& err) {
  const std::size_t n = args.mask_paths.size();
  std::vector<ScanRecord> records(n);
  std::vector<std::string> failures(n);

  const unsigned workers =
      std::min<unsigned>(thread_limit(), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    for (std::size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
      const std::string& path = args.mask_paths[i];
      try {
        const Volume3 mask = read_nifti_file(path);
        const auto insts =
            connected_components(mask, args.connectivity, args.min_voxels);
        records[i] = {stem_of(path), {}, truth_entries(insts)};
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  for (unsigned w = 0; w + 1 < workers; ++w)
    pool.emplace_back(work);
  work();
  for (auto& t : pool)
    t.join();

  for (std::size_t i = 0; i < n; ++i)
    if (!failures[i].empty()) {
      err << "error: " << args.mask_paths[i] << ": " << failures[i] << "\n";
      return kExitInputError;
    }

  DetectionFile file;
  file.scans = std::move(records);
  try {
    write_text_atomic(args.out_path, serialize_detection_file(file));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  out << "wrote " << args.out_path << " (" << n << " scan"
      << (n == 1 ? "" : "s") << ")\n";
  return kExitOk;
}

int cmd_preprocess(const PreprocessArgs& args, std::ostream& out,
                   std::ostream& err) {
  try {
    const Volume3 input = read_nifti_file(args.image_path);

    const CropResult crop = crop_nonzero(input);
    out << "crop_offset: " << crop.offset[0] << " " << crop.offset[1] << " "
        << crop.offset[2] << "\n";

    const Volume3 normalized = zscore(crop.volume);
    double mean = 0.0;
    for (double v : normalized.data)
      mean += v;
    mean /= double(normalized.data.size());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", mean);
    out << "post_zscore_mean: " << buf << "\n";

    std::array<double, 3> target = args.target_spacing;
    for (int i = 0; i < 3; ++i)
      if (target[i] <= 0.0)
        target[i] = normalized.spacing[i];
    const Volume3 result =
        resample(normalized, target,
                 args.nearest ? ResampleMode::Nearest : ResampleMode::Trilinear);
    write_nifti_file(result, args.out_path);
    out << "wrote " << args.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << args.image_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  DetectionFile dets, truth;
  try {
    dets = read_detection_file(args.detections_path);
    truth = args.truth_path.empty() ? dets
                                    : read_detection_file(args.truth_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::map<std::string, const ScanRecord*> truth_by_id;
  for (const auto& rec : truth.scans)
    truth_by_id[rec.id] = &rec;
  for (const auto& rec : dets.scans)
    if (!truth_by_id.count(rec.id)) {
      err << "error: scan id \"" << rec.id << "\" has detections but no "
          << "truth entry\n";
      return kExitConsistency;
    }

  std::map<std::string, const ScanRecord*> dets_by_id;
  for (const auto& rec : dets.scans)
    dets_by_id[rec.id] = &rec;

  std::vector<ScanResult> scans;
  for (const auto& [id, trec] : truth_by_id) { // lexicographic by map order
    ScanResult sr;
    sr.scan_id = id;
    for (const auto& t : trec->truth)
      sr.gts.push_back(t.box);
    if (auto it = dets_by_id.find(id); it != dets_by_id.end())
      sr.detections = it->second->detections;
    scans.push_back(std::move(sr));
  }
  if (scans.empty()) {
    err << "error: no scans to evaluate\n";
    return kExitInputError;
  }

  const FrocReport rep =
      froc_report(scans, args.iou_threshold, args.operating_points);
  try {
    write_text_atomic(args.csv_path, rep.csv);
    write_text_atomic(args.svg_path, rep.svg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  out << "fpps, sensitivity\n";
  char buf[64];
  for (const auto& [q, s] : rep.table) {
    std::snprintf(buf, sizeof(buf), "%.4f", s);
    out << format_fpps(q) << ", " << buf << "\n";
  }
  out << "wrote " << args.csv_path << " and " << args.svg_path << "\n";
  return kExitOk;
}

int cmd_detect_baseline(const DetectBaselineArgs& args, std::ostream& out,
                        std::ostream& err) {
  try {
    const Volume3 image = read_nifti_file(args.image_path);
    std::vector<Detection> dets =
        baseline_detect(image, args.threshold, args.min_voxels);
    dets = nms(dets, args.nms_iou);

    ScanRecord rec;
    rec.id = args.scan_id.empty() ? stem_of(args.image_path) : args.scan_id;
    rec.detections = std::move(dets);
    DetectionFile file;
    file.scans.push_back(std::move(rec));
    write_text_atomic(args.out_path, serialize_detection_file(file));
    out << "wrote " << args.out_path << " (" << file.scans[0].detections.size()
        << " detections)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << args.image_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_phantom(const PhantomArgs& args, std::ostream& out,
                std::ostream& err) {
  try {
    const PhantomResult res = generate(args.spec);
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);

    const auto image_bytes = write_nifti(res.image);
    const auto mask_bytes = write_nifti(res.mask);
    write_text_atomic((dir / "image.nii").string(),
                      std::string(image_bytes.begin(), image_bytes.end()));
    write_text_atomic((dir / "mask.nii").string(),
                      std::string(mask_bytes.begin(), mask_bytes.end()));

    DetectionFile truth;
    truth.scans.push_back({"phantom_" + std::to_string(args.spec.seed),
                           {},
                           truth_entries(res.truth)});
    write_text_atomic((dir / "truth.json").string(),
                      serialize_detection_file(truth));
    out << "wrote " << (dir / "image.nii").string() << ", "
        << (dir / "mask.nii").string() << ", "
        << (dir / "truth.json").string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"lesionbox: 3-D lesion detection preprocessing and "
               "evaluation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  GtExtractArgs gt;
  auto* gt_cmd = app.add_subcommand(
      "gt-extract", "Extract lesion instances from NIfTI masks");
  gt_cmd->add_option("masks", gt.mask_paths, "Mask .nii/.nii.gz paths")
      ->required();
  gt_cmd->add_option("--connectivity", gt.connectivity, "6 or 26")
      ->check(CLI::IsMember({6, 26}))
      ->capture_default_str();
  gt_cmd->add_option("--min-voxels", gt.min_voxels,
                     "Drop instances smaller than this")
      ->capture_default_str();
  gt_cmd->add_option("-o,--out", gt.out_path, "Output truth JSON")
      ->capture_default_str();

  PreprocessArgs pre;
  std::vector<double> pre_spacing;
  auto* pre_cmd = app.add_subcommand(
      "preprocess", "Crop, z-score normalize, and resample a volume");
  pre_cmd->add_option("image", pre.image_path, "Input .nii/.nii.gz")
      ->required();
  pre_cmd->add_option("--spacing", pre_spacing,
                      "Target spacing in mm (x y z); default keeps input")
      ->expected(3);
  pre_cmd->add_flag("--nearest", pre.nearest,
                    "Nearest-neighbor resampling (for masks)");
  pre_cmd->add_option("-o,--out", pre.out_path, "Output .nii")->required();

  EvalArgs ev;
  auto* ev_cmd =
      app.add_subcommand("eval", "FROC evaluation of detections vs truth");
  ev_cmd->add_option("detections", ev.detections_path, "Detections JSON")
      ->required();
  ev_cmd->add_option("--truth", ev.truth_path,
                     "Truth JSON (omit when combined with detections)");
  ev_cmd->add_option("--iou-threshold", ev.iou_threshold,
                     "Match IoU threshold")
      ->capture_default_str();
  ev_cmd->add_option("--fpps", ev.operating_points,
                     "FPPS operating points (comma list)")
      ->delimiter(',')
      ->capture_default_str();
  ev_cmd->add_option("--csv", ev.csv_path, "Output CSV path")
      ->capture_default_str();
  ev_cmd->add_option("--svg", ev.svg_path, "Output SVG path")
      ->capture_default_str();

  DetectBaselineArgs det;
  auto* det_cmd = app.add_subcommand(
      "detect-baseline", "Threshold + connected-component baseline detector");
  det_cmd->add_option("image", det.image_path, "Input .nii/.nii.gz")
      ->required();
  det_cmd->add_option("--threshold", det.threshold, "Intensity threshold")
      ->capture_default_str();
  det_cmd->add_option("--min-voxels", det.min_voxels,
                      "Drop components smaller than this")
      ->capture_default_str();
  det_cmd->add_option("--nms-iou", det.nms_iou, "NMS IoU threshold")
      ->capture_default_str();
  det_cmd->add_option("--id", det.scan_id, "Scan id (default: file stem)");
  det_cmd->add_option("-o,--out", det.out_path, "Output detections JSON")
      ->capture_default_str();

  PhantomArgs ph;
  std::vector<int> ph_dims;
  std::vector<double> ph_spacing, ph_radius;
  auto* ph_cmd = app.add_subcommand(
      "phantom", "Generate a synthetic vessel/lesion phantom");
  ph_cmd->add_option("--seed", ph.spec.seed, "Random seed")
      ->capture_default_str();
  ph_cmd->add_option("--dims", ph_dims, "Voxel counts (x y z)")->expected(3);
  ph_cmd->add_option("--spacing", ph_spacing, "Spacing in mm (x y z)")
      ->expected(3);
  ph_cmd->add_option("--lesions", ph.spec.n_lesions, "Number of lesions")
      ->capture_default_str();
  ph_cmd->add_option("--radius-range", ph_radius,
                     "Lesion radius range in mm (min max)")
      ->expected(2);
  ph_cmd->add_option("--vessels", ph.spec.vessel_count, "Number of vessels")
      ->capture_default_str();
  ph_cmd->add_option("--noise-sigma", ph.spec.noise_sigma,
                     "Additive Gaussian noise sigma")
      ->capture_default_str();
  ph_cmd->add_option("--out-dir", ph.out_dir, "Output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (gt_cmd->parsed())
    return cmd_gt_extract(gt, std::cout, std::cerr);
  if (pre_cmd->parsed()) {
    if (pre_spacing.size() == 3)
      pre.target_spacing = {pre_spacing[0], pre_spacing[1], pre_spacing[2]};
    return cmd_preprocess(pre, std::cout, std::cerr);
  }
  if (ev_cmd->parsed())
    return cmd_eval(ev, std::cout, std::cerr);
  if (det_cmd->parsed())
    return cmd_detect_baseline(det, std::cout, std::cerr);
  if (ph_cmd->parsed()) {
    if (ph_dims.size() == 3)
      ph.spec.dims = {ph_dims[0], ph_dims[1], ph_dims[2]};
    if (ph_spacing.size() == 3)
      ph.spec.spacing = {ph_spacing[0], ph_spacing[1], ph_spacing[2]};
    if (ph_radius.size() == 2)
      ph.spec.lesion_radius_range = {ph_radius[0], ph_radius[1]};
    return cmd_phantom(ph, std::cout, std::cerr);
  }
  return kExitOk;
}

} // namespace lesionbox::cli
