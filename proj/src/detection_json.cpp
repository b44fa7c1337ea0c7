#include "lesionbox/detection_json.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace lesionbox {
namespace {

using json = nlohmann::ordered_json;

std::array<double, 3> parse_triple(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(std::string(what) + " must be a 3-element array");
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) {
    if (!j[std::size_t(i)].is_number())
      throw Error(std::string(what) + " entries must be numbers");
    out[std::size_t(i)] = j[std::size_t(i)].get<double>();
  }
  return out;
}

Box3 parse_box(const json& j) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw Error("box must be an object with \"min\" and \"max\"");
  Box3 b;
  b.min = parse_triple(j.at("min"), "box.min");
  b.max = parse_triple(j.at("max"), "box.max");
  for (int i = 0; i < 3; ++i)
    if (b.max[i] < b.min[i])
      throw Error("box.max must be >= box.min per axis");
  return b;
}

json box_json(const Box3& b) {
  return json{{"min", {b.min[0], b.min[1], b.min[2]}},
              {"max", {b.max[0], b.max[1], b.max[2]}}};
}

} // namespace

DetectionFile parse_detection_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("scans") || !doc["scans"].is_array())
    throw Error("document must be an object with a \"scans\" array");

  DetectionFile file;
  std::set<std::string> ids;
  for (const json& js : doc["scans"]) {
    if (!js.is_object() || !js.contains("id") || !js["id"].is_string())
      throw Error("each scan needs a string \"id\"");
    ScanRecord rec;
    rec.id = js["id"].get<std::string>();
    if (!ids.insert(rec.id).second)
      throw Error("duplicate scan id: " + rec.id);
    if (js.contains("detections")) {
      for (const json& jd : js["detections"]) {
        Detection d;
        d.box = parse_box(jd.at("box"));
        if (!jd.contains("score") || !jd["score"].is_number())
          throw Error("detection needs a numeric \"score\"");
        d.score = jd["score"].get<double>();
        if (d.score < 0.0 || d.score > 1.0)
          throw Error("detection score must be in [0,1]");
        rec.detections.push_back(d);
      }
    }
    if (js.contains("truth")) {
      for (const json& jt : js["truth"]) {
        TruthEntry t;
        t.box = parse_box(jt.at("box"));
        if (jt.contains("center"))
          t.center = parse_triple(jt.at("center"), "truth.center");
        rec.truth.push_back(t);
      }
    }
    file.scans.push_back(std::move(rec));
  }
  return file;
}

std::string serialize_detection_file(const DetectionFile& file) {
  DetectionFile sorted = file;
  std::sort(sorted.scans.begin(), sorted.scans.end(),
            [](const ScanRecord& a, const ScanRecord& b) { return a.id < b.id; });
  for (ScanRecord& rec : sorted.scans)
    std::stable_sort(rec.detections.begin(), rec.detections.end(),
                     [](const Detection& a, const Detection& b) {
                       return a.score > b.score;
                     });

  json doc;
  doc["scans"] = json::array();
  for (const ScanRecord& rec : sorted.scans) {
    json js;
    js["id"] = rec.id;
    if (!rec.detections.empty() || rec.truth.empty()) {
      js["detections"] = json::array();
      for (const Detection& d : rec.detections)
        js["detections"].push_back(json{{"box", box_json(d.box)},
                                        {"score", d.score}});
    }
    if (!rec.truth.empty()) {
      js["truth"] = json::array();
      for (const TruthEntry& t : rec.truth)
        js["truth"].push_back(
            json{{"box", box_json(t.box)},
                 {"center", {t.center[0], t.center[1], t.center[2]}}});
    }
    doc["scans"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

DetectionFile read_detection_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_detection_file(text);
}

void write_detection_file(const DetectionFile& file, const std::string& path) {
  const std::string text = serialize_detection_file(file);
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw Error("cannot open file for writing: " + path);
  out << text;
  if (!out)
    throw Error("write failed: " + path);
}

} // namespace lesionbox
