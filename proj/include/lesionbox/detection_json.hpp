#pragma once

#include <string>
#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// One ground-truth entry in the interchange file: box plus center of mass.
struct TruthEntry {
  Box3 box;
  std::array<double, 3> center{0, 0, 0};
};

/// Per-scan record of the detection-interchange JSON document.
struct ScanRecord {
  std::string id;
  std::vector<Detection> detections;
  std::vector<TruthEntry> truth;
};

/// The interchange document:
/// { "scans": [ { "id": ..., "detections": [ { "box": {"min": [...],
///   "max": [...]}, "score": ... } ], "truth": [ { "box": {...},
///   "center": [...] } ] } ] }
/// "detections" and "truth" are each optional per scan.
struct DetectionFile {
  std::vector<ScanRecord> scans;
};

/// Parses and validates (unique ids, box invariants, scores in [0,1]).
/// Throws lesionbox::Error on malformed input.
DetectionFile parse_detection_file(const std::string& json_text);

/// Stable serialization: scans sorted by id, detections by descending score.
std::string serialize_detection_file(const DetectionFile& file);

DetectionFile read_detection_file(const std::string& path);
void write_detection_file(const DetectionFile& file, const std::string& path);

} // namespace lesionbox
