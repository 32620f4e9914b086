// Copyright 2026 The PathFuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// PathML: a CAEX-style XML hierarchy Layers -> Tracks -> Points carrying robot
// poses, velocities and process parameters.
//
// The subset written and read here (see docs/pathml-schema.md):
//
//   CAEXFile FileName=...
//     InstanceHierarchy Name="PathML"
//       InternalElement Name=<project> RefBaseSystemUnitPath="PathML/Project"
//         Attribute ProcessType | GlueFlowRate_ml_min | WireFeedRate_mm_s |
//                   LayerHeight_mm | <extras...>
//         InternalElement Name=<layer> RefBaseSystemUnitPath="PathML/Layer"
//           Attribute Index
//           InternalElement Name=<track> RefBaseSystemUnitPath="PathML/Track"
//             Attribute ToolActive
//             InternalElement Name="Point_<k>" RefBaseSystemUnitPath="PathML/Point"
//               Attribute X_mm Y_mm Z_mm RX_deg RY_deg RZ_deg Velocity_mm_s
//
// Each Attribute holds its value in a <Value> child. Numbers are written with
// exactly six decimals, so two documents are semantically equal exactly when
// they serialize to the same bytes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <expat.h>

#include "pathfuse/detail/text.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/geometry.hpp"

namespace pathfuse {

enum class ProcessType { adhesive, welding, other };

inline const char* to_string(ProcessType p) {
  switch (p) {
    case ProcessType::adhesive: return "adhesive";
    case ProcessType::welding: return "welding";
    case ProcessType::other: return "other";
  }
  return "other";
}

inline std::optional<ProcessType> process_type_from_string(std::string_view s) {
  s = detail::trim(s);
  if (s == "adhesive") return ProcessType::adhesive;
  if (s == "welding") return ProcessType::welding;
  if (s == "other") return ProcessType::other;
  return std::nullopt;
}

struct ProcessParameters {
  ProcessType process_type = ProcessType::other;
  std::optional<double> glue_flow_rate;  // ml/min
  std::optional<double> wire_feed_rate;  // mm/s
  std::optional<double> layer_height;    // mm
  std::vector<std::pair<std::string, std::string>> extra;  // in file order
};

/// Robot-frame pose; angles are fixed X-Y-Z degrees.
struct PathPoint {
  double x = 0.0, y = 0.0, z = 0.0;
  double rx = 0.0, ry = 0.0, rz = 0.0;
  double velocity = 0.0;  // mm/s
};

/// A contiguous segment; the process tool is on for its whole length when
/// tool_active is set.
struct Track {
  std::string name;
  std::vector<PathPoint> points;
  bool tool_active = true;
};

struct Layer {
  std::string name;
  int index = 0;
  std::vector<Track> tracks;
};

struct PathMLDocument {
  std::string project_name;
  ProcessParameters process;
  std::vector<Layer> layers;
};

namespace pathml {

inline constexpr const char* kProcessType = "ProcessType";
inline constexpr const char* kGlueFlowRate = "GlueFlowRate_ml_min";
inline constexpr const char* kWireFeedRate = "WireFeedRate_mm_s";
inline constexpr const char* kLayerHeight = "LayerHeight_mm";
inline constexpr const char* kIndex = "Index";
inline constexpr const char* kToolActive = "ToolActive";
inline constexpr const char* kPointKeys[7] = {"X_mm",   "Y_mm",   "Z_mm",         "RX_deg",
                                              "RY_deg", "RZ_deg", "Velocity_mm_s"};

inline constexpr const char* kRoleProject = "PathML/Project";
inline constexpr const char* kRoleLayer = "PathML/Layer";
inline constexpr const char* kRoleTrack = "PathML/Track";
inline constexpr const char* kRolePoint = "PathML/Point";

inline bool is_reserved_process_key(std::string_view key) {
  return key == kProcessType || key == kGlueFlowRate || key == kWireFeedRate ||
         key == kLayerHeight;
}

inline std::string point_name(std::size_t k) { return "Point_" + std::to_string(k); }

}  // namespace pathml

// ---------------------------------------------------------------------------
// Validation

struct DocumentViolation {
  std::string path;  // element path, e.g. "proj/Layer_0/Track_0/Point_3"
  std::string rule;

  std::string to_string() const { return path + ": " + rule; }
  friend bool operator==(const DocumentViolation&, const DocumentViolation&) = default;
};

namespace detail {

inline void check_process(const ProcessParameters& p, const std::string& where,
                          std::vector<DocumentViolation>& out) {
  const auto bad = [](const std::optional<double>& v, bool strictly_positive) {
    return v && (!std::isfinite(*v) || (strictly_positive ? *v <= 0.0 : *v < 0.0));
  };
  if (p.process_type == ProcessType::adhesive && !p.glue_flow_rate) {
    out.push_back({where, "adhesive process requires GlueFlowRate_ml_min"});
  }
  if (p.process_type == ProcessType::welding && !p.wire_feed_rate) {
    out.push_back({where, "welding process requires WireFeedRate_mm_s"});
  }
  if (bad(p.glue_flow_rate, false)) out.push_back({where, "GlueFlowRate_ml_min must be >= 0"});
  if (bad(p.wire_feed_rate, false)) out.push_back({where, "WireFeedRate_mm_s must be >= 0"});
  if (bad(p.layer_height, true)) out.push_back({where, "LayerHeight_mm must be > 0"});
  std::set<std::string> seen;
  for (const auto& [key, value] : p.extra) {
    if (key.empty()) {
      out.push_back({where, "process attribute with empty name"});
    } else if (pathml::is_reserved_process_key(key)) {
      out.push_back({where, "extra process attribute '" + key + "' shadows a built-in"});
    } else if (!seen.insert(key).second) {
      out.push_back({where, "duplicate process attribute '" + key + "'"});
    }
  }
}

}  // namespace detail

/// Lists every broken invariant; empty means the document is valid.
inline std::vector<DocumentViolation> validate_document(const PathMLDocument& doc) {
  std::vector<DocumentViolation> out;
  const std::string root = doc.project_name;
  detail::check_process(doc.process, root, out);
  if (doc.layers.empty()) out.push_back({root, "document requires ≥ 1 Layer"});
  std::set<std::string> layer_names;
  for (const Layer& layer : doc.layers) {
    const std::string lpath = root + "/" + layer.name;
    if (!layer_names.insert(layer.name).second) {
      out.push_back({root, "duplicate layer name '" + layer.name + "'"});
    }
    if (layer.index < 0) out.push_back({lpath, "layer index must be ≥ 0"});
    if (layer.tracks.empty()) out.push_back({lpath, "Layer requires ≥ 1 Track"});
    std::set<std::string> track_names;
    for (const Track& track : layer.tracks) {
      const std::string tpath = lpath + "/" + track.name;
      if (!track_names.insert(track.name).second) {
        out.push_back({lpath, "duplicate track name '" + track.name + "'"});
      }
      if (track.points.size() < 2) out.push_back({tpath, "Track requires ≥ 2 Points"});
      for (std::size_t k = 0; k < track.points.size(); ++k) {
        const PathPoint& p = track.points[k];
        const std::string ppath = tpath + "/" + pathml::point_name(k);
        const double vals[7] = {p.x, p.y, p.z, p.rx, p.ry, p.rz, p.velocity};
        if (!std::all_of(std::begin(vals), std::end(vals),
                         [](double v) { return std::isfinite(v); })) {
          out.push_back({ppath, "point values must be finite"});
        } else if (p.velocity < 0.0) {
          out.push_back({ppath, "velocity must be ≥ 0"});
        }
      }
    }
  }
  return out;
}

/// Equality after quantizing every number to the six written decimals.
inline bool semantically_equal(const PathMLDocument& a, const PathMLDocument& b) {
  const auto q = [](double v) { return detail::format_fixed(v, 6); };
  const auto qo = [&](const std::optional<double>& x, const std::optional<double>& y) {
    return x.has_value() == y.has_value() && (!x || q(*x) == q(*y));
  };
  if (a.project_name != b.project_name) return false;
  if (a.process.process_type != b.process.process_type ||
      !qo(a.process.glue_flow_rate, b.process.glue_flow_rate) ||
      !qo(a.process.wire_feed_rate, b.process.wire_feed_rate) ||
      !qo(a.process.layer_height, b.process.layer_height) ||
      a.process.extra != b.process.extra) {
    return false;
  }
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const Layer& la = a.layers[l];
    const Layer& lb = b.layers[l];
    if (la.name != lb.name || la.index != lb.index || la.tracks.size() != lb.tracks.size()) {
      return false;
    }
    for (std::size_t t = 0; t < la.tracks.size(); ++t) {
      const Track& ta = la.tracks[t];
      const Track& tb = lb.tracks[t];
      if (ta.name != tb.name || ta.tool_active != tb.tool_active ||
          ta.points.size() != tb.points.size()) {
        return false;
      }
      for (std::size_t k = 0; k < ta.points.size(); ++k) {
        const PathPoint& pa = ta.points[k];
        const PathPoint& pb = tb.points[k];
        if (q(pa.x) != q(pb.x) || q(pa.y) != q(pb.y) || q(pa.z) != q(pb.z) ||
            q(pa.rx) != q(pb.rx) || q(pa.ry) != q(pb.ry) || q(pa.rz) != q(pb.rz) ||
            q(pa.velocity) != q(pb.velocity)) {
          return false;
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction

/// Single layer, single tool-on track, one point per fused point.
inline PathMLDocument build_document(const FusedPath& path, const ProcessParameters& process,
                                     const std::string& project) {
  if (path.frame != FrameId::R) {
    throw Error(ErrorKind::frame_mismatch, "PathML documents hold robot-frame {R} paths only");
  }
  validate_fused_path(path);
  std::vector<DocumentViolation> problems;
  detail::check_process(process, project, problems);
  if (!problems.empty()) throw Error(ErrorKind::validation, problems.front().to_string());

  Track track{"Track_0", {}, true};
  track.points.reserve(path.points.size());
  for (const FusedPoint& p : path.points) {
    track.points.push_back({p.position.x, p.position.y, p.position.z,
                            rad_to_deg(p.orientation.rx), rad_to_deg(p.orientation.ry),
                            rad_to_deg(p.orientation.rz), p.speed});
  }
  PathMLDocument doc;
  doc.project_name = project;
  doc.process = process;
  doc.layers.push_back({"Layer_0", 0, {std::move(track)}});
  return doc;
}

/// Stacks `n_layers` copies of the single layer, layer k shifted by
/// k * layer_height * direction.
inline PathMLDocument expand_layers(const PathMLDocument& doc, int n_layers,
                                    const Vec3& direction = {0.0, 0.0, 1.0}) {
  if (n_layers < 1) throw Error(ErrorKind::argument, "n_layers must be ≥ 1");
  if (!is_finite(direction) || std::abs(norm(direction) - 1.0) > 1e-9) {
    throw Error(ErrorKind::argument, "layer direction must be a unit vector");
  }
  if (doc.layers.size() != 1) {
    throw Error(ErrorKind::already_expanded,
                "expected exactly 1 layer, found " + std::to_string(doc.layers.size()));
  }
  if (!doc.process.layer_height || !(*doc.process.layer_height > 0.0)) {
    throw Error(ErrorKind::parameter, "layer expansion requires LayerHeight_mm > 0");
  }
  if (n_layers == 1) return doc;
  const double h = *doc.process.layer_height;
  PathMLDocument out = doc;
  out.layers.clear();
  for (int k = 0; k < n_layers; ++k) {
    const double dx = (k * h) * direction.x;
    const double dy = (k * h) * direction.y;
    const double dz = (k * h) * direction.z;
    Layer layer = doc.layers.front();
    layer.name = "Layer_" + std::to_string(k);
    layer.index = k;
    for (Track& t : layer.tracks) {
      for (PathPoint& p : t.points) {
        p.x += dx;
        p.y += dy;
        p.z += dz;
      }
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writer

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  void open(int depth, std::string_view tag, std::string_view attrs) {
    indent(depth);
    out_ += "<";
    out_ += tag;
    out_ += attrs;
    out_ += ">\n";
  }
  void close(int depth, std::string_view tag) {
    indent(depth);
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }
  void attribute(int depth, std::string_view name, std::string_view value,
                 std::string_view data_type = {}) {
    indent(depth);
    out_ += "<Attribute Name=\"" + xml_escape(name) + "\"";
    if (!data_type.empty()) {
      out_ += " AttributeDataType=\"";
      out_ += data_type;
      out_ += "\"";
    }
    out_ += "><Value>" + xml_escape(value) + "</Value></Attribute>\n";
  }
  void number(int depth, std::string_view name, double value) {
    attribute(depth, name, format_fixed(value, 6), "xs:double");
  }
  void raw(std::string_view s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }
  std::string out_;
};

inline std::string element_attrs(std::string_view name, std::string_view role) {
  return " Name=\"" + xml_escape(name) + "\" RefBaseSystemUnitPath=\"" + std::string(role) +
         "\"";
}

}  // namespace detail

/// Canonical UTF-8/LF serialization: fixed element and attribute order,
/// six-decimal numbers.
inline std::string write_xml(const PathMLDocument& doc) {
  detail::XmlWriter w;
  w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  w.open(0, "CAEXFile",
         " FileName=\"" + detail::xml_escape(doc.project_name) + ".pathml.xml\" SchemaVersion=\"3.0\"");
  w.open(1, "InstanceHierarchy", " Name=\"PathML\"");
  w.open(2, "InternalElement", detail::element_attrs(doc.project_name, pathml::kRoleProject));
  const ProcessParameters& pp = doc.process;
  w.attribute(3, pathml::kProcessType, to_string(pp.process_type), "xs:string");
  if (pp.glue_flow_rate) w.number(3, pathml::kGlueFlowRate, *pp.glue_flow_rate);
  if (pp.wire_feed_rate) w.number(3, pathml::kWireFeedRate, *pp.wire_feed_rate);
  if (pp.layer_height) w.number(3, pathml::kLayerHeight, *pp.layer_height);
  for (const auto& [key, value] : pp.extra) w.attribute(3, key, value, "xs:string");
  for (const Layer& layer : doc.layers) {
    w.open(3, "InternalElement", detail::element_attrs(layer.name, pathml::kRoleLayer));
    w.attribute(4, pathml::kIndex, std::to_string(layer.index), "xs:integer");
    for (const Track& track : layer.tracks) {
      w.open(4, "InternalElement", detail::element_attrs(track.name, pathml::kRoleTrack));
      w.attribute(5, pathml::kToolActive, track.tool_active ? "true" : "false", "xs:boolean");
      for (std::size_t k = 0; k < track.points.size(); ++k) {
        const PathPoint& p = track.points[k];
        w.open(5, "InternalElement",
               detail::element_attrs(pathml::point_name(k), pathml::kRolePoint));
        const double vals[7] = {p.x, p.y, p.z, p.rx, p.ry, p.rz, p.velocity};
        for (int i = 0; i < 7; ++i) w.number(6, pathml::kPointKeys[i], vals[i]);
        w.close(5, "InternalElement");
      }
      w.close(4, "InternalElement");
    }
    w.close(3, "InternalElement");
  }
  w.close(2, "InternalElement");
  w.close(1, "InstanceHierarchy");
  w.close(0, "CAEXFile");
  return w.take();
}

// ---------------------------------------------------------------------------
// Parser

enum class ParseMode {
  strict,   // any broken document invariant is a schema error
  lenient,  // structural errors only; audit the rest with validate_document
};

namespace detail {

/// Element tree built by the expat callbacks. Attributes keep document order.
struct XmlNode {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;
  std::vector<XmlNode> children;
};

class XmlTreeBuilder {
 public:
  XmlNode parse(std::string_view text) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                        &XML_ParserFree);
    if (!parser) throw Error(ErrorKind::io, "XML: cannot allocate parser");
    parser_ = parser.get();
    XML_SetUserData(parser.get(), this);
    XML_SetElementHandler(parser.get(), &XmlTreeBuilder::on_start, &XmlTreeBuilder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &XmlTreeBuilder::on_text);
    XML_SetStartDoctypeDeclHandler(parser.get(), &XmlTreeBuilder::on_doctype);
    if (text.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
      throw Error(ErrorKind::parse, "XML: document too large");
    }
    const XML_Status status =
        XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE);
    if (status != XML_STATUS_OK) {
      const std::size_t line = XML_GetCurrentLineNumber(parser.get());
      const std::string reason = doctype_ ? "DOCTYPE declarations are not accepted"
                                          : XML_ErrorString(XML_GetErrorCode(parser.get()));
      throw Error(ErrorKind::parse, "XML: " + reason, line);
    }
    return std::move(root_);
  }

 private:
  static void on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    auto* b = static_cast<XmlTreeBuilder*>(self);
    XmlNode node;
    node.tag = name;
    for (const XML_Char** a = attrs; *a; a += 2) node.attrs.emplace_back(a[0], a[1]);
    b->stack_.push_back(std::move(node));
  }
  static void on_end(void* self, const XML_Char*) {
    auto* b = static_cast<XmlTreeBuilder*>(self);
    XmlNode done = std::move(b->stack_.back());
    b->stack_.pop_back();
    if (b->stack_.empty()) {
      b->root_ = std::move(done);
    } else {
      b->stack_.back().children.push_back(std::move(done));
    }
  }
  static void on_text(void* self, const XML_Char* s, int len) {
    auto* b = static_cast<XmlTreeBuilder*>(self);
    if (!b->stack_.empty()) b->stack_.back().text.append(s, static_cast<std::size_t>(len));
  }
  static void on_doctype(void* self, const XML_Char*, const XML_Char*, const XML_Char*, int) {
    auto* b = static_cast<XmlTreeBuilder*>(self);
    b->doctype_ = true;
    XML_StopParser(b->parser_, XML_FALSE);
  }

  std::vector<XmlNode> stack_;
  XmlNode root_;
  bool doctype_ = false;
  XML_Parser parser_ = nullptr;
};

inline std::optional<std::string> xml_attr(const XmlNode& node, std::string_view name) {
  for (const auto& [k, v] : node.attrs) {
    if (k == name) return v;
  }
  return std::nullopt;
}

inline const XmlNode* first_child(const XmlNode& node, std::string_view tag) {
  for (const XmlNode& c : node.children) {
    if (c.tag == tag) return &c;
  }
  return nullptr;
}

/// Name -> Value text of the <Attribute> children, in document order.
inline std::vector<std::pair<std::string, std::string>> caex_attributes(
    const XmlNode& node, const std::string& where) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const XmlNode& child : node.children) {
    if (child.tag != "Attribute") continue;
    const auto name = xml_attr(child, "Name");
    if (!name) throw Error(ErrorKind::schema, where + ": Attribute without Name");
    const XmlNode* v = first_child(child, "Value");
    out.emplace_back(*name, v ? v->text : std::string());
  }
  return out;
}

inline const std::string* find_attr(
    const std::vector<std::pair<std::string, std::string>>& attrs, std::string_view name) {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

inline double require_number(const std::vector<std::pair<std::string, std::string>>& attrs,
                             const char* name, const std::string& where) {
  const std::string* text = find_attr(attrs, name);
  if (!text) throw Error(ErrorKind::schema, where + ": missing attribute " + name);
  const auto v = parse_double(trim(*text));
  if (!v) throw Error(ErrorKind::schema, where + ": attribute " + name + " is not a number");
  return *v;
}

enum class Role { project, layer, track, point };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::project: return "Project";
    case Role::layer: return "Layer";
    case Role::track: return "Track";
    case Role::point: return "Point";
  }
  return "?";
}

/// Role from RefBaseSystemUnitPath, else guessed from the attribute set, else
/// the role its depth implies.
inline Role element_role(const XmlNode& node, Role expected, const std::string& where) {
  if (const auto ref = xml_attr(node, "RefBaseSystemUnitPath")) {
    if (*ref == pathml::kRoleProject) return Role::project;
    if (*ref == pathml::kRoleLayer) return Role::layer;
    if (*ref == pathml::kRoleTrack) return Role::track;
    if (*ref == pathml::kRolePoint) return Role::point;
    throw Error(ErrorKind::schema, where + ": unknown RefBaseSystemUnitPath '" + *ref + "'");
  }
  const auto attrs = caex_attributes(node, where);
  if (find_attr(attrs, pathml::kPointKeys[0])) return Role::point;
  if (find_attr(attrs, pathml::kToolActive)) return Role::track;
  if (find_attr(attrs, pathml::kIndex)) return Role::layer;
  return expected;
}

inline std::string element_name(const XmlNode& node, const std::string& where) {
  const auto name = xml_attr(node, "Name");
  if (!name) throw Error(ErrorKind::schema, where + ": InternalElement without Name");
  return *name;
}

inline void expect_role(const XmlNode& node, Role expected, const std::string& where) {
  const Role got = element_role(node, expected, where);
  if (got != expected) {
    throw Error(ErrorKind::schema, where + ": hierarchy violation, " + role_name(got) +
                                       " found where a " + role_name(expected) +
                                       " is required");
  }
}

inline std::string child_path(const XmlNode& child, const std::string& where) {
  return where + "/" + xml_attr(child, "Name").value_or("?");
}

inline PathPoint parse_point(const XmlNode& node, const std::string& where) {
  const auto attrs = caex_attributes(node, where);
  PathPoint p;
  double* dst[7] = {&p.x, &p.y, &p.z, &p.rx, &p.ry, &p.rz, &p.velocity};
  for (int i = 0; i < 7; ++i) *dst[i] = require_number(attrs, pathml::kPointKeys[i], where);
  for (const XmlNode& child : node.children) {
    if (child.tag == "InternalElement") {
      throw Error(ErrorKind::schema, child_path(child, where) +
                                         ": hierarchy violation, a Point cannot contain elements");
    }
  }
  return p;
}

inline Track parse_track(const XmlNode& node, const std::string& where) {
  Track t;
  t.name = element_name(node, where);
  const auto attrs = caex_attributes(node, where);
  const std::string* active = find_attr(attrs, pathml::kToolActive);
  if (!active) throw Error(ErrorKind::schema, where + ": missing attribute ToolActive");
  const std::string_view a = trim(*active);
  if (a == "true" || a == "1") t.tool_active = true;
  else if (a == "false" || a == "0") t.tool_active = false;
  else throw Error(ErrorKind::schema, where + ": ToolActive must be true or false");
  for (const XmlNode& child : node.children) {
    if (child.tag != "InternalElement") continue;
    const std::string cpath = child_path(child, where);
    expect_role(child, Role::point, cpath);
    t.points.push_back(parse_point(child, cpath));
  }
  return t;
}

inline Layer parse_layer(const XmlNode& node, const std::string& where, int ordinal) {
  Layer layer;
  layer.name = element_name(node, where);
  const auto attrs = caex_attributes(node, where);
  layer.index = ordinal;
  if (const std::string* idx = find_attr(attrs, pathml::kIndex)) {
    const auto v = parse_int(trim(*idx));
    if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
      throw Error(ErrorKind::schema, where + ": Index is not an integer");
    }
    layer.index = static_cast<int>(*v);
  }
  for (const XmlNode& child : node.children) {
    if (child.tag != "InternalElement") continue;
    const std::string cpath = child_path(child, where);
    expect_role(child, Role::track, cpath);
    layer.tracks.push_back(parse_track(child, cpath));
  }
  return layer;
}

inline PathMLDocument parse_project(const XmlNode& node, const std::string& where) {
  PathMLDocument doc;
  doc.project_name = element_name(node, where);
  const std::string path = doc.project_name;
  const auto attrs = caex_attributes(node, path);
  ProcessParameters& pp = doc.process;
  for (const auto& [key, value] : attrs) {
    const auto number = [&, &key = key, &value = value]() {
      const auto v = parse_double(trim(value));
      if (!v) throw Error(ErrorKind::schema, path + ": attribute " + key + " is not a number");
      return *v;
    };
    if (key == pathml::kProcessType) {
      const auto t = process_type_from_string(trim(value));
      if (!t) throw Error(ErrorKind::schema, path + ": unknown ProcessType '" + value + "'");
      pp.process_type = *t;
    } else if (key == pathml::kGlueFlowRate) {
      pp.glue_flow_rate = number();
    } else if (key == pathml::kWireFeedRate) {
      pp.wire_feed_rate = number();
    } else if (key == pathml::kLayerHeight) {
      pp.layer_height = number();
    } else {
      pp.extra.emplace_back(key, value);
    }
  }
  if (!find_attr(attrs, pathml::kProcessType)) {
    throw Error(ErrorKind::schema, path + ": missing attribute ProcessType");
  }
  int ordinal = 0;
  for (const XmlNode& child : node.children) {
    if (child.tag != "InternalElement") continue;
    const std::string cpath = child_path(child, path);
    expect_role(child, Role::layer, cpath);
    doc.layers.push_back(parse_layer(child, cpath, ordinal++));
  }
  return doc;
}

}  // namespace detail

/// Reads a PathML file. Attribute order and whitespace between elements do
/// not matter; unknown project-level attributes land in process.extra.
inline PathMLDocument parse_xml(std::string_view text, ParseMode mode = ParseMode::strict) {
  const detail::XmlNode root = detail::XmlTreeBuilder{}.parse(text);
  if (root.tag != "CAEXFile") throw Error(ErrorKind::schema, "root element must be CAEXFile");
  const detail::XmlNode* hierarchy = nullptr;
  for (const detail::XmlNode& child : root.children) {
    if (child.tag != "InstanceHierarchy") continue;
    if (detail::xml_attr(child, "Name").value_or("") != "PathML") continue;
    if (hierarchy) throw Error(ErrorKind::schema, "CAEXFile: more than one PathML InstanceHierarchy");
    hierarchy = &child;
  }
  if (!hierarchy) throw Error(ErrorKind::schema, "CAEXFile: missing InstanceHierarchy Name=\"PathML\"");
  const detail::XmlNode* project = nullptr;
  for (const detail::XmlNode& child : hierarchy->children) {
    if (child.tag != "InternalElement") continue;
    if (project) throw Error(ErrorKind::schema, "PathML: expected exactly one project element");
    project = &child;
  }
  if (!project) throw Error(ErrorKind::schema, "PathML: missing project element");
  detail::expect_role(*project, detail::Role::project, "PathML");
  PathMLDocument doc = detail::parse_project(*project, "PathML");
  if (mode == ParseMode::strict) {
    const auto violations = validate_document(doc);
    if (!violations.empty()) throw Error(ErrorKind::schema, violations.front().to_string());
  }
  return doc;
}

}  // namespace pathfuse
